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

#include "archsel/nn/network.hpp"

#include <cmath>
#include <numeric>

#include "archsel/core/rng.hpp"

namespace archsel::nn {

std::string layer_kind_name(LayerKind kind) {
    switch (kind) {
        case LayerKind::Conv2d: return "conv2d";
        case LayerKind::MaxPool2x2: return "maxpool2x2";
        case LayerKind::Dense: return "dense";
        case LayerKind::Relu: return "relu";
        case LayerKind::Tanh: return "tanh";
        case LayerKind::Flatten: return "flatten";
        case LayerKind::SoftmaxXent: return "softmax-xent";
    }
    return "?";
}

namespace {

Eigen::Index shape_size(const std::vector<int>& s) {
    Eigen::Index n = 1;
    for (int d : s) n *= d;
    return n;
}

std::vector<int> infer_output_shape(const LayerSpec& layer, const std::vector<int>& in) {
    switch (layer.kind) {
        case LayerKind::Conv2d: {
            if (in.size() != 3) throw ShapeMismatchError("conv2d needs a [C,H,W] input");
            if (layer.out_channels < 1) throw ShapeMismatchError("conv2d needs out_channels >= 1");
            const int k = layer.kernel_size;
            if (k != 3 && k != 5 && k != 7) throw ShapeMismatchError("conv2d kernel must be 3, 5 or 7");
            if (k > in[1] || k > in[2])
                throw ShapeMismatchError("conv2d kernel " + std::to_string(k) + " larger than input " +
                                         Tensor::shape_string(in));
            return {layer.out_channels, in[1] - k + 1, in[2] - k + 1};
        }
        case LayerKind::MaxPool2x2: {
            if (in.size() != 3) throw ShapeMismatchError("maxpool needs a [C,H,W] input");
            if (in[1] < 2 || in[2] < 2) throw ShapeMismatchError("maxpool needs spatial extent >= 2");
            return {in[0], in[1] / 2, in[2] / 2};
        }
        case LayerKind::Dense: {
            if (layer.units < 1) throw ShapeMismatchError("dense needs units >= 1");
            return {layer.units};
        }
        case LayerKind::Relu:
        case LayerKind::Tanh:
            return in;
        case LayerKind::Flatten:
            return {static_cast<int>(shape_size(in))};
        case LayerKind::SoftmaxXent: {
            if (in.size() != 1 || in[0] < 2)
                throw ShapeMismatchError("softmax-xent needs a rank-1 input of >= 2 logits");
            return in;
        }
    }
    throw ShapeMismatchError("unknown layer kind");
}

} // namespace

NetworkState make_network(const std::vector<LayerSpec>& layers, const std::vector<int>& input_shape) {
    if (layers.empty()) throw ShapeMismatchError("network needs at least one layer");
    NetworkState net;
    net.layers = layers;
    net.input_shape = input_shape;
    net.params.resize(layers.size());
    net.in_shapes.reserve(layers.size());
    net.out_shapes.reserve(layers.size());

    std::vector<int> shape = input_shape;
    int first_dense = -1;
    for (std::size_t i = 0; i < layers.size(); ++i) {
        const LayerSpec& layer = layers[i];
        net.in_shapes.push_back(shape);
        std::vector<int> out = infer_output_shape(layer, shape);

        if (layer.kind == LayerKind::Dense && first_dense < 0) first_dense = static_cast<int>(i);
        if ((layer.kind == LayerKind::Conv2d || layer.kind == LayerKind::MaxPool2x2) && first_dense >= 0)
            throw ShapeMismatchError("conv/pool layer after the dense head (index " + std::to_string(i) + ")");
        if (layer.kind == LayerKind::SoftmaxXent && i + 1 != layers.size())
            throw ShapeMismatchError("softmax-xent must be the terminal layer");

        if (layer.kind == LayerKind::Conv2d) {
            const int k = layer.kernel_size;
            net.params[i].weights = Tensor({layer.out_channels, shape[0], k, k});
            net.params[i].bias = Tensor({layer.out_channels});
        } else if (layer.kind == LayerKind::Dense) {
            net.params[i].weights = Tensor({layer.units, static_cast<int>(shape_size(shape))});
            net.params[i].bias = Tensor({layer.units});
        }
        if (net.params[i].has_params()) {
            net.params[i].weights_momentum = Tensor(net.params[i].weights.shape());
            net.params[i].bias_momentum = Tensor(net.params[i].bias.shape());
        }
        net.out_shapes.push_back(out);
        shape = std::move(out);
    }
    net.split_index = first_dense >= 0 ? first_dense : static_cast<int>(layers.size());
    net.num_classes = shape.size() == 1 ? shape[0] : 0;
    return net;
}

void init_weights(NetworkState& net, std::uint64_t seed) {
    Xoshiro256ss rng(seed);
    for (std::size_t i = 0; i < net.layers.size(); ++i) {
        LayerParams& p = net.params[i];
        if (!p.has_params()) continue;
        double fan_in = 0.0, fan_out = 0.0;
        if (net.layers[i].kind == LayerKind::Conv2d) {
            const int k = net.layers[i].kernel_size;
            fan_in = static_cast<double>(p.weights.dim(1)) * k * k;
            fan_out = static_cast<double>(p.weights.dim(0)) * k * k;
        } else {
            fan_in = static_cast<double>(p.weights.dim(1));
            fan_out = static_cast<double>(p.weights.dim(0));
        }
        const double a = std::sqrt(6.0 / (fan_in + fan_out));
        double* w = p.weights.data();
        for (Eigen::Index j = 0; j < p.weights.size(); ++j) w[j] = a * (2.0 * rng.next_double() - 1.0);
        p.bias.set_zero();
        p.weights_momentum.set_zero();
        p.bias_momentum.set_zero();
    }
}

Tensor forward(const NetworkState& net, const Tensor& sample) {
    if (sample.shape() != net.input_shape)
        throw ShapeMismatchError("forward: sample shape " + Tensor::shape_string(sample.shape()) +
                                 " does not match network input " + Tensor::shape_string(net.input_shape));
    Tensor act = sample;
    for (std::size_t i = 0; i < net.layers.size(); ++i) {
        const LayerSpec& layer = net.layers[i];
        switch (layer.kind) {
            case LayerKind::Conv2d:
                act = conv2d_forward(act, net.params[i].weights, net.params[i].bias);
                break;
            case LayerKind::MaxPool2x2:
                act = maxpool2x2_forward(act);
                break;
            case LayerKind::Dense:
                act = dense_forward(act, net.params[i].weights, net.params[i].bias);
                break;
            case LayerKind::Relu:
                act = relu_forward(act);
                break;
            case LayerKind::Tanh:
                act = tanh_forward(act);
                break;
            case LayerKind::Flatten:
                act = flatten(act);
                break;
            case LayerKind::SoftmaxXent:
                break; // loss layer; logits pass through
        }
    }
    return act;
}

} // namespace archsel::nn
