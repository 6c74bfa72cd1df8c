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

#ifndef ARCHSEL_NN_NETWORK_HPP
#define ARCHSEL_NN_NETWORK_HPP

#include <cstdint>
#include <vector>

#include "archsel/nn/layers.hpp"

namespace archsel::nn {

/// Weights, bias and the matching momentum buffers of one layer. Empty
/// tensors for parameterless layers.
struct LayerParams {
    Tensor weights;
    Tensor bias;
    Tensor weights_momentum;
    Tensor bias_momentum;

    bool has_params() const { return weights.size() > 0; }
};

/// A sequential network. `split_index` marks the boundary between the
/// convolutional feature extractor (indices < split_index) and the fully
/// connected head (indices >= split_index).
struct NetworkState {
    std::vector<LayerSpec> layers;
    std::vector<LayerParams> params;
    std::vector<std::vector<int>> in_shapes;  // per-layer input shape (sample, no batch dim)
    std::vector<std::vector<int>> out_shapes; // per-layer output shape
    std::vector<int> input_shape;             // [C,H,W] (or any shape for dense-only nets)
    int split_index = 0;
    int num_classes = 0;

    int layer_count() const { return static_cast<int>(layers.size()); }
};

/// Builds the per-layer shape trace, allocates zeroed parameters and momentum
/// buffers, and locates the feature/head split. Throws ShapeMismatchError if
/// any layer is invalid for its input shape or if a conv/pool layer appears
/// after the first dense layer.
NetworkState make_network(const std::vector<LayerSpec>& layers, const std::vector<int>& input_shape);

/// Deterministic uniform Glorot-style initialization: weights uniform in
/// [-a, a] with a = sqrt(6 / (fan_in + fan_out)); biases and momentum zero.
void init_weights(NetworkState& net, std::uint64_t seed);

/// Single-sample forward pass; returns the K logits. The terminal
/// softmax-xent layer passes logits through unchanged.
Tensor forward(const NetworkState& net, const Tensor& sample);

} // namespace archsel::nn

#endif
