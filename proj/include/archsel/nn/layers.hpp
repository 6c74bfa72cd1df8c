/*
 * Copyright 2026 The archsel Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef ARCHSEL_NN_LAYERS_HPP
#define ARCHSEL_NN_LAYERS_HPP

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "archsel/core/errors.hpp"
#include "archsel/core/tensor.hpp"

namespace archsel::nn {

enum class LayerKind : std::uint8_t {
    Conv2d,
    MaxPool2x2,
    Dense,
    Relu,
    Tanh,
    Flatten,
    SoftmaxXent,
};

std::string layer_kind_name(LayerKind kind);

/// One layer of a sequential network. Only the fields of the matching kind
/// are meaningful (conv2d: out_channels + kernel_size, dense: units).
/// Convolutions are valid (no padding), stride 1; pooling is 2x2, stride 2.
struct LayerSpec {
    LayerKind kind = LayerKind::Relu;
    int out_channels = 0;
    int kernel_size = 0;
    int units = 0;

    static LayerSpec conv2d(int out_channels, int kernel_size) {
        return {LayerKind::Conv2d, out_channels, kernel_size, 0};
    }
    static LayerSpec maxpool() { return {LayerKind::MaxPool2x2, 0, 0, 0}; }
    static LayerSpec dense(int units) { return {LayerKind::Dense, 0, 0, units}; }
    static LayerSpec relu() { return {LayerKind::Relu, 0, 0, 0}; }
    static LayerSpec tanh() { return {LayerKind::Tanh, 0, 0, 0}; }
    static LayerSpec flatten() { return {LayerKind::Flatten, 0, 0, 0}; }
    static LayerSpec softmax_xent() { return {LayerKind::SoftmaxXent, 0, 0, 0}; }

    bool operator==(const LayerSpec&) const = default;
};

namespace detail {

// im2col patch matrices are built in sample chunks so the scratch stays
// below this many bytes even for wide layers.
inline constexpr std::int64_t kIm2colBudgetBytes = 64LL * 1024 * 1024;

template <typename S>
using MatX = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;
template <typename S>
using MapRowMajor =
    Eigen::Map<Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;
template <typename S>
using ConstMapRowMajor =
    Eigen::Map<const Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;

/// Cross-correlation of a batch: in [B,Ci,H,W] * w [Co,Ci,k,k] + bias -> out [B,Co,Ho,Wo].
template <typename S>
void conv2d_forward_impl(const S* in, int batch, int ci, int h, int w, const S* weights, int co,
                         int k, const S* bias, S* out) {
    const int ho = h - k + 1;
    const int wo = w - k + 1;
    const int rows = ci * k * k;
    const int cols_per_sample = ho * wo;
    const std::int64_t bytes_per_sample =
        static_cast<std::int64_t>(rows) * cols_per_sample * static_cast<std::int64_t>(sizeof(S));
    const int chunk = std::max<int>(1, static_cast<int>(kIm2colBudgetBytes / std::max<std::int64_t>(1, bytes_per_sample)));

    ConstMapRowMajor<S> w_mat(weights, co, rows);
    MatX<S> patches;
    MatX<S> y;
    for (int b0 = 0; b0 < batch; b0 += chunk) {
        const int bs = std::min(chunk, batch - b0);
        const int cols = bs * cols_per_sample;
        patches.resize(rows, cols);
        for (int bl = 0; bl < bs; ++bl) {
            const int b = b0 + bl;
            for (int i = 0; i < ho; ++i) {
                for (int j = 0; j < wo; ++j) {
                    const int col = (bl * ho + i) * wo + j;
                    S* dst = patches.col(col).data();
                    for (int c = 0; c < ci; ++c) {
                        const S* plane = in + (static_cast<std::int64_t>(b) * ci + c) * h * w;
                        for (int di = 0; di < k; ++di) {
                            const S* src = plane + (i + di) * w + j;
                            for (int dj = 0; dj < k; ++dj) *dst++ = src[dj];
                        }
                    }
                }
            }
        }
        y.noalias() = w_mat * patches;
        for (int bl = 0; bl < bs; ++bl) {
            const int b = b0 + bl;
            for (int c = 0; c < co; ++c) {
                S* dst = out + (static_cast<std::int64_t>(b) * co + c) * cols_per_sample;
                const S bv = bias[c];
                for (int p = 0; p < cols_per_sample; ++p) dst[p] = y(c, bl * cols_per_sample + p) + bv;
            }
        }
    }
}

/// Gradients of the convolution above. grad_w/grad_b accumulate the sum over
/// the batch; all outputs must be zeroed by the caller. grad_in may be null
/// when the input gradient is not needed.
template <typename S>
void conv2d_backward_impl(const S* grad_out, const S* in, int batch, int ci, int h, int w,
                          const S* weights, int co, int k, S* grad_in, S* grad_w, S* grad_b) {
    const int ho = h - k + 1;
    const int wo = w - k + 1;
    const int rows = ci * k * k;
    const int cols_per_sample = ho * wo;
    const std::int64_t bytes_per_sample =
        static_cast<std::int64_t>(rows) * cols_per_sample * static_cast<std::int64_t>(sizeof(S));
    const int chunk = std::max<int>(1, static_cast<int>(kIm2colBudgetBytes / std::max<std::int64_t>(1, bytes_per_sample)));

    ConstMapRowMajor<S> w_mat(weights, co, rows);
    MapRowMajor<S> gw_mat(grad_w, co, rows);
    Eigen::Map<Eigen::Matrix<S, Eigen::Dynamic, 1>> gb_vec(grad_b, co);

    MatX<S> patches, dy, dp;
    for (int b0 = 0; b0 < batch; b0 += chunk) {
        const int bs = std::min(chunk, batch - b0);
        const int cols = bs * cols_per_sample;
        patches.resize(rows, cols);
        dy.resize(co, cols);
        for (int bl = 0; bl < bs; ++bl) {
            const int b = b0 + bl;
            for (int i = 0; i < ho; ++i) {
                for (int j = 0; j < wo; ++j) {
                    const int col = (bl * ho + i) * wo + j;
                    S* dst = patches.col(col).data();
                    for (int c = 0; c < ci; ++c) {
                        const S* plane = in + (static_cast<std::int64_t>(b) * ci + c) * h * w;
                        for (int di = 0; di < k; ++di) {
                            const S* src = plane + (i + di) * w + j;
                            for (int dj = 0; dj < k; ++dj) *dst++ = src[dj];
                        }
                    }
                }
            }
            for (int c = 0; c < co; ++c) {
                const S* src = grad_out + (static_cast<std::int64_t>(b) * co + c) * cols_per_sample;
                for (int p = 0; p < cols_per_sample; ++p) dy(c, bl * cols_per_sample + p) = src[p];
            }
        }
        gw_mat.noalias() += dy * patches.transpose();
        gb_vec.noalias() += dy.rowwise().sum();
        if (!grad_in) continue;
        dp.noalias() = w_mat.transpose() * dy;
        for (int bl = 0; bl < bs; ++bl) {
            const int b = b0 + bl;
            for (int i = 0; i < ho; ++i) {
                for (int j = 0; j < wo; ++j) {
                    const int col = (bl * ho + i) * wo + j;
                    const S* src = dp.col(col).data();
                    for (int c = 0; c < ci; ++c) {
                        S* plane = grad_in + (static_cast<std::int64_t>(b) * ci + c) * h * w;
                        for (int di = 0; di < k; ++di) {
                            S* dst = plane + (i + di) * w + j;
                            for (int dj = 0; dj < k; ++dj) dst[dj] += *src++;
                        }
                    }
                }
            }
        }
    }
}

inline void check_conv_shapes(const std::vector<int>& in, const std::vector<int>& w,
                              const std::vector<int>& b, int batch_rank) {
    if (static_cast<int>(in.size()) != batch_rank)
        throw ShapeMismatchError("conv2d input must have rank " + std::to_string(batch_rank));
    if (w.size() != 4) throw ShapeMismatchError("conv2d weights must be [Co,Ci,k,k]");
    if (b.size() != 1 || b[0] != w[0]) throw ShapeMismatchError("conv2d bias must be [Co]");
    if (w[2] != w[3]) throw ShapeMismatchError("conv2d kernel must be square");
    const int off = batch_rank - 3;
    if (in[off] != w[1]) throw ShapeMismatchError("conv2d channel mismatch");
    if (w[2] > in[off + 1] || w[2] > in[off + 2])
        throw ShapeMismatchError("conv2d kernel larger than input extent");
}

} // namespace detail

template <typename S>
struct Conv2dGrads {
    TensorT<S> input;
    TensorT<S> weights;
    TensorT<S> bias;
};

/// input [Ci,H,W], weights [Co,Ci,k,k], bias [Co] -> [Co,H-k+1,W-k+1]
template <typename S>
TensorT<S> conv2d_forward(const TensorT<S>& input, const TensorT<S>& weights, const TensorT<S>& bias) {
    detail::check_conv_shapes(input.shape(), weights.shape(), bias.shape(), 3);
    const int k = weights.dim(2);
    TensorT<S> out({weights.dim(0), input.dim(1) - k + 1, input.dim(2) - k + 1});
    detail::conv2d_forward_impl(input.data(), 1, input.dim(0), input.dim(1), input.dim(2),
                                weights.data(), weights.dim(0), k, bias.data(), out.data());
    return out;
}

template <typename S>
Conv2dGrads<S> conv2d_backward(const TensorT<S>& grad_out, const TensorT<S>& cached_input,
                               const TensorT<S>& weights) {
    const int k = weights.dim(2);
    std::vector<int> expected{weights.dim(0), cached_input.dim(1) - k + 1, cached_input.dim(2) - k + 1};
    if (cached_input.rank() != 3 || weights.rank() != 4 || grad_out.shape() != expected)
        throw ShapeMismatchError("conv2d_backward shape mismatch");
    if (cached_input.dim(0) != weights.dim(1)) throw ShapeMismatchError("conv2d channel mismatch");
    Conv2dGrads<S> g{TensorT<S>(cached_input.shape()), TensorT<S>(weights.shape()),
                     TensorT<S>({weights.dim(0)})};
    detail::conv2d_backward_impl(grad_out.data(), cached_input.data(), 1, cached_input.dim(0),
                                 cached_input.dim(1), cached_input.dim(2), weights.data(),
                                 weights.dim(0), k, g.input.data(), g.weights.data(), g.bias.data());
    return g;
}

/// Batched variants over [B,Ci,H,W]; weight/bias gradients are summed over the batch.
template <typename S>
TensorT<S> conv2d_forward_batch(const TensorT<S>& input, const TensorT<S>& weights,
                                const TensorT<S>& bias) {
    detail::check_conv_shapes(input.shape(), weights.shape(), bias.shape(), 4);
    const int k = weights.dim(2);
    TensorT<S> out({input.dim(0), weights.dim(0), input.dim(2) - k + 1, input.dim(3) - k + 1});
    detail::conv2d_forward_impl(input.data(), input.dim(0), input.dim(1), input.dim(2), input.dim(3),
                                weights.data(), weights.dim(0), k, bias.data(), out.data());
    return out;
}

template <typename S>
Conv2dGrads<S> conv2d_backward_batch(const TensorT<S>& grad_out, const TensorT<S>& cached_input,
                                     const TensorT<S>& weights, bool need_input_grad = true) {
    const int k = weights.dim(2);
    std::vector<int> expected{cached_input.dim(0), weights.dim(0), cached_input.dim(2) - k + 1,
                              cached_input.dim(3) - k + 1};
    if (cached_input.rank() != 4 || grad_out.shape() != expected)
        throw ShapeMismatchError("conv2d_backward shape mismatch");
    Conv2dGrads<S> g{need_input_grad ? TensorT<S>(cached_input.shape()) : TensorT<S>(),
                     TensorT<S>(weights.shape()), TensorT<S>({weights.dim(0)})};
    detail::conv2d_backward_impl(grad_out.data(), cached_input.data(), cached_input.dim(0),
                                 cached_input.dim(1), cached_input.dim(2), cached_input.dim(3),
                                 weights.data(), weights.dim(0), k,
                                 need_input_grad ? g.input.data() : nullptr, g.weights.data(),
                                 g.bias.data());
    return g;
}

/// 2x2 max pooling, stride 2; odd trailing rows/columns are dropped.
/// Ties go to the first element in (0,0),(0,1),(1,0),(1,1) scan order.
/// Works on [C,H,W] or batched [B,C,H,W] input.
template <typename S>
TensorT<S> maxpool2x2_forward(const TensorT<S>& input, std::vector<std::int32_t>* argmax = nullptr) {
    const int rank = input.rank();
    if (rank != 3 && rank != 4) throw ShapeMismatchError("maxpool input must be [C,H,W] or [B,C,H,W]");
    const int h = input.dim(rank - 2), w = input.dim(rank - 1);
    if (h < 2 || w < 2) throw ShapeMismatchError("maxpool needs spatial extent >= 2");
    const int planes = static_cast<int>(input.size() / (static_cast<Eigen::Index>(h) * w));
    const int ho = h / 2, wo = w / 2;

    std::vector<int> out_shape = input.shape();
    out_shape[static_cast<std::size_t>(rank - 2)] = ho;
    out_shape[static_cast<std::size_t>(rank - 1)] = wo;
    TensorT<S> out(out_shape);
    if (argmax) argmax->resize(static_cast<std::size_t>(out.size()));

    const S* src = input.data();
    S* dst = out.data();
    for (int p = 0; p < planes; ++p) {
        const S* plane = src + static_cast<std::int64_t>(p) * h * w;
        for (int i = 0; i < ho; ++i) {
            for (int j = 0; j < wo; ++j) {
                const int base = (2 * i) * w + 2 * j;
                int best = base;
                S bv = plane[base];
                const int cand[3] = {base + 1, base + w, base + w + 1};
                for (int c : cand) {
                    if (plane[c] > bv) {
                        bv = plane[c];
                        best = c;
                    }
                }
                const std::int64_t oi = static_cast<std::int64_t>(p) * ho * wo + i * wo + j;
                dst[oi] = bv;
                if (argmax) (*argmax)[static_cast<std::size_t>(oi)] =
                    static_cast<std::int32_t>(p * h * w + best);
            }
        }
    }
    return out;
}

/// Routes grad_out entries to the argmax positions of the forward pass.
template <typename S>
TensorT<S> maxpool2x2_backward(const TensorT<S>& grad_out, const TensorT<S>& cached_input) {
    std::vector<std::int32_t> argmax;
    TensorT<S> fwd = maxpool2x2_forward(cached_input, &argmax);
    if (grad_out.shape() != fwd.shape()) throw ShapeMismatchError("maxpool2x2_backward shape mismatch");
    TensorT<S> grad_in(cached_input.shape());
    const S* go = grad_out.data();
    S* gi = grad_in.data();
    for (Eigen::Index i = 0; i < grad_out.size(); ++i) gi[argmax[static_cast<std::size_t>(i)]] += go[i];
    return grad_in;
}

/// y = W x + b with W stored row-major as [out,in]. The input may be any
/// rank; it is read as a flat vector of length `in`.
template <typename S>
TensorT<S> dense_forward(const TensorT<S>& input, const TensorT<S>& weights, const TensorT<S>& bias) {
    if (weights.rank() != 2) throw ShapeMismatchError("dense weights must be [out,in]");
    const int out_dim = weights.dim(0), in_dim = weights.dim(1);
    if (input.size() != in_dim) throw ShapeMismatchError("dense input size mismatch");
    if (bias.rank() != 1 || bias.dim(0) != out_dim) throw ShapeMismatchError("dense bias must be [out]");
    TensorT<S> out({out_dim});
    detail::ConstMapRowMajor<S> w_mat(weights.data(), out_dim, in_dim);
    Eigen::Map<Eigen::Matrix<S, Eigen::Dynamic, 1>>(out.data(), out_dim).noalias() =
        w_mat * Eigen::Map<const Eigen::Matrix<S, Eigen::Dynamic, 1>>(input.data(), in_dim) +
        Eigen::Map<const Eigen::Matrix<S, Eigen::Dynamic, 1>>(bias.data(), out_dim);
    return out;
}

template <typename S>
struct DenseGrads {
    TensorT<S> input;
    TensorT<S> weights;
    TensorT<S> bias;
};

template <typename S>
DenseGrads<S> dense_backward(const TensorT<S>& grad_out, const TensorT<S>& cached_input,
                             const TensorT<S>& weights) {
    const int out_dim = weights.dim(0), in_dim = weights.dim(1);
    if (grad_out.size() != out_dim || cached_input.size() != in_dim)
        throw ShapeMismatchError("dense_backward shape mismatch");
    DenseGrads<S> g{TensorT<S>(cached_input.shape()), TensorT<S>(weights.shape()), TensorT<S>({out_dim})};
    detail::ConstMapRowMajor<S> w_mat(weights.data(), out_dim, in_dim);
    Eigen::Map<const Eigen::Matrix<S, Eigen::Dynamic, 1>> dy(grad_out.data(), out_dim);
    Eigen::Map<const Eigen::Matrix<S, Eigen::Dynamic, 1>> x(cached_input.data(), in_dim);
    detail::MapRowMajor<S>(g.weights.data(), out_dim, in_dim).noalias() = dy * x.transpose();
    g.bias.raw() = grad_out.raw();
    Eigen::Map<Eigen::Matrix<S, Eigen::Dynamic, 1>>(g.input.data(), in_dim).noalias() =
        w_mat.transpose() * dy;
    return g;
}

/// Batched dense over [B,in] -> [B,out]; weight/bias grads summed over the batch.
template <typename S>
TensorT<S> dense_forward_batch(const TensorT<S>& input, const TensorT<S>& weights,
                               const TensorT<S>& bias) {
    const int out_dim = weights.dim(0), in_dim = weights.dim(1);
    const int batch = input.dim(0);
    if (input.size() != static_cast<Eigen::Index>(batch) * in_dim)
        throw ShapeMismatchError("dense batch input size mismatch");
    TensorT<S> out({batch, out_dim});
    detail::ConstMapRowMajor<S> w_mat(weights.data(), out_dim, in_dim);
    detail::ConstMapRowMajor<S> x(input.data(), batch, in_dim);
    detail::MapRowMajor<S> y(out.data(), batch, out_dim);
    y.noalias() = x * w_mat.transpose();
    y.rowwise() += Eigen::Map<const Eigen::Matrix<S, Eigen::Dynamic, 1>>(bias.data(), out_dim).transpose();
    return out;
}

template <typename S>
DenseGrads<S> dense_backward_batch(const TensorT<S>& grad_out, const TensorT<S>& cached_input,
                                   const TensorT<S>& weights) {
    const int out_dim = weights.dim(0), in_dim = weights.dim(1);
    const int batch = cached_input.dim(0);
    if (grad_out.size() != static_cast<Eigen::Index>(batch) * out_dim)
        throw ShapeMismatchError("dense_backward batch shape mismatch");
    DenseGrads<S> g{TensorT<S>(cached_input.shape()), TensorT<S>(weights.shape()), TensorT<S>({out_dim})};
    detail::ConstMapRowMajor<S> w_mat(weights.data(), out_dim, in_dim);
    detail::ConstMapRowMajor<S> x(cached_input.data(), batch, in_dim);
    detail::ConstMapRowMajor<S> dy(grad_out.data(), batch, out_dim);
    detail::MapRowMajor<S>(g.weights.data(), out_dim, in_dim).noalias() = dy.transpose() * x;
    Eigen::Map<Eigen::Matrix<S, Eigen::Dynamic, 1>>(g.bias.data(), out_dim).noalias() =
        dy.colwise().sum().transpose();
    detail::MapRowMajor<S>(g.input.data(), batch, in_dim).noalias() = dy * w_mat;
    return g;
}

template <typename S>
TensorT<S> relu_forward(const TensorT<S>& input) {
    return TensorT<S>(input.shape(), input.raw().max(S(0)));
}

template <typename S>
TensorT<S> relu_backward(const TensorT<S>& grad_out, const TensorT<S>& cached_input) {
    if (!grad_out.same_shape(cached_input)) throw ShapeMismatchError("relu_backward shape mismatch");
    return TensorT<S>(grad_out.shape(),
                      (cached_input.raw() > S(0)).select(grad_out.raw(), S(0)));
}

template <typename S>
TensorT<S> tanh_forward(const TensorT<S>& input) {
    return TensorT<S>(input.shape(), input.raw().tanh());
}

template <typename S>
TensorT<S> tanh_backward(const TensorT<S>& grad_out, const TensorT<S>& cached_input) {
    if (!grad_out.same_shape(cached_input)) throw ShapeMismatchError("tanh_backward shape mismatch");
    auto t = cached_input.raw().tanh();
    return TensorT<S>(grad_out.shape(), grad_out.raw() * (S(1) - t * t));
}

template <typename S>
TensorT<S> flatten(const TensorT<S>& input) {
    return input.reshaped({static_cast<int>(input.size())});
}

/// Numerically stable cross-entropy of a softmax over raw logits.
/// Returns (loss, d loss / d logits).
template <typename S>
std::pair<S, TensorT<S>> softmax_cross_entropy(const TensorT<S>& logits, int label) {
    if (logits.rank() != 1 || logits.dim(0) < 2)
        throw ShapeMismatchError("softmax_cross_entropy needs >= 2 logits");
    const int K = logits.dim(0);
    if (label < 0 || label >= K)
        throw LabelOutOfRangeError("label " + std::to_string(label) + " outside [0," + std::to_string(K) + ")");
    const S mx = logits.raw().maxCoeff();
    TensorT<S> grad(logits.shape(), (logits.raw() - mx).exp());
    const S sum = grad.raw().sum();
    const S loss = std::log(sum) - (logits[label] - mx);
    grad.raw() /= sum;
    grad[label] -= S(1);
    return {loss, std::move(grad)};
}

} // namespace archsel::nn

#endif
