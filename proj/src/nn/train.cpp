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

#include "archsel/nn/train.hpp"

#include <cmath>
#include <cstring>
#include <utility>

#include "archsel/core/rng.hpp"

namespace archsel::nn {

namespace {

constexpr Eigen::Index kFeatureCacheBudgetBytes = 256LL * 1024 * 1024;
constexpr int kEvalBatch = 256;

Eigen::Index shape_size(const std::vector<int>& s) {
    Eigen::Index n = 1;
    for (int d : s) n *= d;
    return n;
}

std::vector<int> batch_shape(int batch, const std::vector<int>& sample_shape) {
    std::vector<int> s;
    s.reserve(sample_shape.size() + 1);
    s.push_back(batch);
    s.insert(s.end(), sample_shape.begin(), sample_shape.end());
    return s;
}

/// Copies the rows `indices[first, first+count)` of feats [N, dims] into a
/// [count, dims] batch tensor.
Tensor gather_rows(const Tensor& feats, const std::vector<int>& indices, int first, int count,
                   const std::vector<int>& sample_shape) {
    const Eigen::Index row = shape_size(sample_shape);
    Tensor out(batch_shape(count, sample_shape));
    for (int b = 0; b < count; ++b) {
        const int src = indices[static_cast<std::size_t>(first + b)];
        std::memcpy(out.data() + static_cast<Eigen::Index>(b) * row,
                    feats.data() + static_cast<Eigen::Index>(src) * row,
                    static_cast<std::size_t>(row) * sizeof(double));
    }
    return out;
}

Tensor contiguous_rows(const Tensor& feats, int first, int count, const std::vector<int>& sample_shape) {
    const Eigen::Index row = shape_size(sample_shape);
    Tensor out(batch_shape(count, sample_shape));
    std::memcpy(out.data(), feats.data() + static_cast<Eigen::Index>(first) * row,
                static_cast<std::size_t>(count * row) * sizeof(double));
    return out;
}

/// Forward through layers [from, to) on a [B, ...] batch; returns the final
/// activation. When trace != nullptr, the input of every layer plus the final
/// output are stored there.
Tensor forward_batch(const NetworkState& net, int from, int to, Tensor act,
                     std::vector<Tensor>* trace) {
    for (int l = from; l < to; ++l) {
        if (trace) trace->push_back(act);
        const LayerSpec& layer = net.layers[static_cast<std::size_t>(l)];
        switch (layer.kind) {
            case LayerKind::Conv2d:
                act = conv2d_forward_batch(act, net.params[static_cast<std::size_t>(l)].weights,
                                           net.params[static_cast<std::size_t>(l)].bias);
                break;
            case LayerKind::MaxPool2x2:
                act = maxpool2x2_forward(act);
                break;
            case LayerKind::Dense:
                act = dense_forward_batch(act, net.params[static_cast<std::size_t>(l)].weights,
                                          net.params[static_cast<std::size_t>(l)].bias);
                break;
            case LayerKind::Relu:
                act = relu_forward(act);
                break;
            case LayerKind::Tanh:
                act = tanh_forward(act);
                break;
            case LayerKind::Flatten:
                act = act.reshaped(batch_shape(act.dim(0), net.out_shapes[static_cast<std::size_t>(l)]));
                break;
            case LayerKind::SoftmaxXent:
                break;
        }
    }
    if (trace) trace->push_back(act);
    return act;
}

/// Activations entering layer `cut` for all samples, computed in fixed-size
/// chunks. For cut == 0 callers should use the images tensor directly.
Tensor precompute_features(const NetworkState& net, const Tensor& images, int cut) {
    const int n = images.dim(0);
    const std::vector<int>& feat_shape =
        cut < net.layer_count() ? net.in_shapes[static_cast<std::size_t>(cut)] : net.out_shapes.back();
    Tensor feats(batch_shape(n, feat_shape));
    const Eigen::Index row = shape_size(feat_shape);
    std::vector<int> sample_shape(images.shape().begin() + 1, images.shape().end());
    for (int first = 0; first < n; first += kEvalBatch) {
        const int count = std::min(kEvalBatch, n - first);
        Tensor out = forward_batch(net, 0, cut, contiguous_rows(images, first, count, sample_shape), nullptr);
        std::memcpy(feats.data() + static_cast<Eigen::Index>(first) * row, out.data(),
                    static_cast<std::size_t>(count * row) * sizeof(double));
    }
    return feats;
}

int error_count(const Tensor& logits, const std::vector<int>& labels, int first, int count) {
    const int k = logits.dim(1);
    int errors = 0;
    for (int b = 0; b < count; ++b) {
        const double* row = logits.data() + static_cast<Eigen::Index>(b) * k;
        int best = 0;
        for (int c = 1; c < k; ++c)
            if (row[c] > row[best]) best = c;
        if (best != labels[static_cast<std::size_t>(first + b)]) ++errors;
    }
    return errors;
}

double error_rate_from(const NetworkState& net, int from, const Tensor& feats,
                       const std::vector<int>& labels) {
    const int n = feats.dim(0);
    std::vector<int> sample_shape(feats.shape().begin() + 1, feats.shape().end());
    int errors = 0;
    for (int first = 0; first < n; first += kEvalBatch) {
        const int count = std::min(kEvalBatch, n - first);
        Tensor logits = forward_batch(net, from, net.layer_count(),
                                      contiguous_rows(feats, first, count, sample_shape), nullptr);
        errors += error_count(logits, labels, first, count);
    }
    return static_cast<double>(errors) / static_cast<double>(n);
}

struct LayerGrads {
    Tensor weights;
    Tensor bias;
};

void check_labels(const data::Dataset& ds, int num_classes, const char* which) {
    for (int label : ds.labels)
        if (label < 0 || label >= num_classes)
            throw LabelOutOfRangeError(std::string(which) + " label " + std::to_string(label) +
                                       " outside [0," + std::to_string(num_classes) + ")");
}

} // namespace

TrainResult train(NetworkState& net, const data::Dataset& train_split, const data::Dataset& val_split,
                  const TrainConfig& cfg) {
    const int layer_count = net.layer_count();
    if (train_split.n() < 1 || val_split.n() < 1) throw ShapeMismatchError("train: empty dataset split");
    if (train_split.sample_shape() != net.input_shape)
        throw ShapeMismatchError("train: dataset sample shape " +
                                 Tensor::shape_string(train_split.sample_shape()) +
                                 " does not match network input " + Tensor::shape_string(net.input_shape));
    if (val_split.sample_shape() != net.input_shape)
        throw ShapeMismatchError("train: validation sample shape does not match network input");
    if (net.layers.back().kind != LayerKind::SoftmaxXent)
        throw ShapeMismatchError("train: network must end with a softmax-xent layer");
    if (cfg.batch_size < 1) throw ShapeMismatchError("train: batch_size must be >= 1");
    if (!(cfg.learning_rate > 0.0)) throw ShapeMismatchError("train: learning_rate must be > 0");
    if (!(cfg.momentum >= 0.0 && cfg.momentum < 1.0)) throw ShapeMismatchError("train: momentum must be in [0,1)");
    if (!cfg.freeze_mask.empty() && static_cast<int>(cfg.freeze_mask.size()) != layer_count)
        throw ShapeMismatchError("train: freeze_mask length does not match layer count");
    check_labels(train_split, net.num_classes, "train");
    check_labels(val_split, net.num_classes, "validation");

    TrainResult result;
    if (cfg.epochs == 0) return result;

    std::vector<std::uint8_t> frozen(static_cast<std::size_t>(layer_count), 0);
    if (!cfg.freeze_mask.empty()) frozen = cfg.freeze_mask;

    // Longest prefix whose parameterized layers are all frozen; activations at
    // its boundary are invariant across epochs and get cached.
    int cut = 0;
    while (cut < layer_count &&
           (!net.params[static_cast<std::size_t>(cut)].has_params() || frozen[static_cast<std::size_t>(cut)]))
        ++cut;
    if (cut > 0) {
        const std::vector<int>& feat_shape =
            cut < layer_count ? net.in_shapes[static_cast<std::size_t>(cut)] : net.out_shapes.back();
        const Eigen::Index bytes = static_cast<Eigen::Index>(train_split.n() + val_split.n()) *
                                   shape_size(feat_shape) * static_cast<Eigen::Index>(sizeof(double));
        if (bytes > kFeatureCacheBudgetBytes) cut = 0;
    }

    const Tensor* train_feats = &train_split.images;
    const Tensor* val_feats = &val_split.images;
    Tensor train_cache, val_cache;
    if (cut > 0) {
        train_cache = precompute_features(net, train_split.images, cut);
        val_cache = precompute_features(net, val_split.images, cut);
        train_feats = &train_cache;
        val_feats = &val_cache;
    }
    std::vector<int> feat_shape(train_feats->shape().begin() + 1, train_feats->shape().end());

    const int n = train_split.n();
    const int k = net.num_classes;
    Xoshiro256ss shuffle_rng(derive_seed(cfg.seed, 0x53485546ULL)); // "SHUF"

    std::vector<LayerGrads> grads(static_cast<std::size_t>(layer_count));
    std::vector<Tensor> backup_w(static_cast<std::size_t>(layer_count));
    std::vector<Tensor> backup_b(static_cast<std::size_t>(layer_count));
    std::vector<Tensor> trace;

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        std::vector<int> perm = random_permutation(n, shuffle_rng);
        double loss_sum = 0.0;
        for (int first = 0; first < n; first += cfg.batch_size) {
            const int bs = std::min(cfg.batch_size, n - first);
            Tensor batch = gather_rows(*train_feats, perm, first, bs, feat_shape);

            trace.clear();
            Tensor logits = forward_batch(net, cut, layer_count, std::move(batch), &trace);

            // softmax-xent at the terminal layer: per-sample losses and the
            // 1/B-scaled logit gradients that make all downstream gradients
            // minibatch means.
            double batch_loss = 0.0;
            Tensor dlogits(logits.shape());
            Tensor row({k});
            for (int b = 0; b < bs; ++b) {
                std::memcpy(row.data(), logits.data() + static_cast<Eigen::Index>(b) * k,
                            static_cast<std::size_t>(k) * sizeof(double));
                auto [loss, grad] =
                    softmax_cross_entropy(row, train_split.labels[static_cast<std::size_t>(perm[static_cast<std::size_t>(first + b)])]);
                batch_loss += loss;
                const double scale = 1.0 / static_cast<double>(bs);
                double* dst = dlogits.data() + static_cast<Eigen::Index>(b) * k;
                for (int c = 0; c < k; ++c) dst[c] = grad[c] * scale;
            }
            if (!std::isfinite(batch_loss)) {
                result.diverged = true;
                return result;
            }
            loss_sum += batch_loss;

            // Backward through the suffix. trace[j] is the input of layer
            // cut + j; the last trace entry is the logits batch.
            Tensor d = std::move(dlogits);
            const int suffix = layer_count - cut;
            for (int j = suffix - 2; j >= 0; --j) {
                const int l = cut + j;
                const LayerSpec& layer = net.layers[static_cast<std::size_t>(l)];
                const Tensor& cached = trace[static_cast<std::size_t>(j)];
                const bool need_input_grad = j > 0;
                switch (layer.kind) {
                    case LayerKind::Conv2d: {
                        auto g = conv2d_backward_batch(d, cached, net.params[static_cast<std::size_t>(l)].weights,
                                                       need_input_grad);
                        grads[static_cast<std::size_t>(l)] = {std::move(g.weights), std::move(g.bias)};
                        d = std::move(g.input);
                        break;
                    }
                    case LayerKind::Dense: {
                        auto g = dense_backward_batch(d, cached, net.params[static_cast<std::size_t>(l)].weights);
                        grads[static_cast<std::size_t>(l)] = {std::move(g.weights), std::move(g.bias)};
                        d = std::move(g.input);
                        break;
                    }
                    case LayerKind::MaxPool2x2:
                        if (need_input_grad) d = maxpool2x2_backward(d, cached);
                        break;
                    case LayerKind::Relu:
                        if (need_input_grad) d = relu_backward(d, cached);
                        break;
                    case LayerKind::Tanh:
                        if (need_input_grad) d = tanh_backward(d, cached);
                        break;
                    case LayerKind::Flatten:
                        if (need_input_grad) d = d.reshaped(cached.shape());
                        break;
                    case LayerKind::SoftmaxXent:
                        break;
                }
                if (!need_input_grad) break;
            }

            // Momentum update on unfrozen layers, with a pre-update snapshot so
            // a non-finite step can be rolled back.
            bool updated_finite = true;
            for (int l = cut; l < layer_count; ++l) {
                LayerParams& p = net.params[static_cast<std::size_t>(l)];
                if (!p.has_params() || frozen[static_cast<std::size_t>(l)]) continue;
                backup_w[static_cast<std::size_t>(l)] = p.weights;
                backup_b[static_cast<std::size_t>(l)] = p.bias;
                const LayerGrads& g = grads[static_cast<std::size_t>(l)];
                p.weights_momentum.raw() =
                    cfg.momentum * p.weights_momentum.raw() - cfg.learning_rate * g.weights.raw();
                p.weights.raw() += p.weights_momentum.raw();
                p.bias_momentum.raw() = cfg.momentum * p.bias_momentum.raw() - cfg.learning_rate * g.bias.raw();
                p.bias.raw() += p.bias_momentum.raw();
                if (!p.weights.all_finite() || !p.bias.all_finite()) updated_finite = false;
            }
            if (!updated_finite) {
                for (int l = cut; l < layer_count; ++l) {
                    LayerParams& p = net.params[static_cast<std::size_t>(l)];
                    if (!p.has_params() || frozen[static_cast<std::size_t>(l)]) continue;
                    p.weights = backup_w[static_cast<std::size_t>(l)];
                    p.bias = backup_b[static_cast<std::size_t>(l)];
                    p.weights_momentum.set_zero();
                    p.bias_momentum.set_zero();
                }
                result.diverged = true;
                return result;
            }
            ++result.steps;
        }
        EpochStats stats;
        stats.train_loss = loss_sum / static_cast<double>(n);
        stats.val_error = error_rate_from(net, cut, *val_feats, val_split.labels);
        result.history.push_back(stats);
    }
    return result;
}

double evaluate(const NetworkState& net, const data::Dataset& split) {
    if (split.n() < 1) throw ShapeMismatchError("evaluate: empty dataset split");
    if (split.sample_shape() != net.input_shape)
        throw ShapeMismatchError("evaluate: dataset sample shape does not match network input");
    check_labels(split, net.num_classes, "evaluate");
    return error_rate_from(net, 0, split.images, split.labels);
}

} // namespace archsel::nn
