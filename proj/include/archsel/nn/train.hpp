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

#ifndef ARCHSEL_NN_TRAIN_HPP
#define ARCHSEL_NN_TRAIN_HPP

#include <cstdint>
#include <vector>

#include "archsel/data/dataset.hpp"
#include "archsel/nn/network.hpp"

namespace archsel::nn {

struct TrainConfig {
    double learning_rate = 0.01;
    double momentum = 0.9;     // classical momentum: v <- mu v - eta g, w <- w + v
    int batch_size = 64;
    int epochs = 0;
    std::uint64_t seed = 0;    // drives the per-epoch shuffle order
    std::vector<std::uint8_t> freeze_mask; // per-layer; empty = nothing frozen
};

struct EpochStats {
    double train_loss = 0.0;
    double val_error = 0.0;
};

struct TrainResult {
    std::vector<EpochStats> history; // one entry per completed epoch
    bool diverged = false;           // a non-finite loss or parameter aborted training
    long steps = 0;                  // completed minibatch updates
};

/// Minibatch SGD with momentum. Gradients are minibatch means; the shuffle
/// order each epoch derives deterministically from cfg.seed. Frozen layers
/// are never touched. When every parameterized layer in a prefix of the
/// network is frozen, activations at the prefix boundary are computed once
/// and reused across epochs; the head trains on the same inputs it would
/// see recomputing them every epoch. On divergence the network keeps the
/// parameters of the last finite step and the result carries diverged = true.
TrainResult train(NetworkState& net, const data::Dataset& train_split,
                  const data::Dataset& val_split, const TrainConfig& cfg);

/// Fraction of samples whose argmax logit disagrees with the label;
/// ties resolve to the lowest class index.
double evaluate(const NetworkState& net, const data::Dataset& split);

} // namespace archsel::nn

#endif
