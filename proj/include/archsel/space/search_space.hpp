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

#ifndef ARCHSEL_SPACE_SEARCH_SPACE_HPP
#define ARCHSEL_SPACE_SEARCH_SPACE_HPP

#include <Eigen/Core>

#include <string>
#include <vector>

#include <json.hpp>

#include "archsel/nn/network.hpp"

namespace archsel::space {

enum class ParamKind { Integer, Categorical, Continuous };

/// One search dimension. Integer ranges are inclusive [lo,hi]; categorical
/// values are an ordered string list; continuous ranges map affinely (or
/// log10-affinely) from the unit interval.
struct ParamDef {
    std::string name;
    ParamKind kind = ParamKind::Continuous;
    double lo = 0.0;
    double hi = 1.0;
    bool log10_scale = false;
    std::vector<std::string> values;

    bool operator==(const ParamDef&) const = default;
};

struct SearchSpace {
    std::vector<ParamDef> params;
    int input_channels = 1;
    int input_height = 28;
    int input_width = 28;
    int num_classes = 10;

    int dim() const { return static_cast<int>(params.size()); }
    const ParamDef* find(const std::string& name) const;

    bool operator==(const SearchSpace&) const = default;
};

struct ConvBlock {
    int out_channels = 0;
    int kernel_size = 0;
    bool pool = false;

    bool operator==(const ConvBlock&) const = default;
};

enum class Nonlinearity { Relu, Tanh };

/// A concrete candidate: conv feature stack, nonlinearity, hidden FC widths
/// (the K-way output layer is implicit) and the training hyperparameters.
struct ArchitectureSpec {
    std::vector<ConvBlock> conv_blocks;
    Nonlinearity nonlinearity = Nonlinearity::Relu;
    std::vector<int> fc_layers;
    double learning_rate = 0.01;
    double momentum = 0.9;

    bool operator==(const ArchitectureSpec&) const = default;
};

/// Point in the unit cube [0,1]^d; the domain the optimizer works on.
using ParamVector = Eigen::VectorXd;

/// Per-layer output shapes of the conv stack plus the flattened dimension.
struct ShapeTrace {
    std::vector<std::vector<int>> stages; // [C,H,W] after each conv and each pool
    int flat_dim = 0;
};

/// Maps a unit-cube vector to a concrete architecture. Integer ranges use
/// floor(lo + v*(hi-lo+1)) clamped to hi; categoricals floor(v*len) clamped;
/// continuous parameters map affinely (log10-affinely when flagged).
///
/// Structural parameters are resolved by name: n_conv, conv{i}_channels,
/// conv{i}_kernel (fallback "kernel", default 3), conv{i}_pool (fallback
/// "pool", default true), n_fc, fc{i}_units, nonlinearity, learning_rate,
/// momentum. Throws InfeasibleArchitectureError when the decoded spec
/// collapses spatially and ConfigError when a required name is missing.
ArchitectureSpec decode(const SearchSpace& space, const ParamVector& v);

/// Inverse of decode up to cell quantization: decode(space, encode(space, s))
/// reproduces s exactly for discrete parameters and within 1e-9 relative for
/// continuous ones. Throws NotRepresentableError otherwise.
ParamVector encode(const SearchSpace& space, const ArchitectureSpec& spec);

/// Full shape algebra of the conv stack; throws InfeasibleArchitectureError
/// (with the offending block index and trace prefix) on spatial collapse.
ShapeTrace validate(const ArchitectureSpec& spec, int input_channels, int input_height,
                    int input_width, int num_classes);

/// Exact trainable parameter count (conv: Co*Ci*k^2 + Co; dense: in*out + out).
long param_count(const ArchitectureSpec& spec, int input_channels, int input_height, int input_width,
                 int num_classes);

/// Layer list realizing the spec: per block conv + nonlinearity (+ pool),
/// then flatten, hidden dense layers with nonlinearities, the K-way output
/// layer and the terminal softmax-xent.
std::vector<nn::LayerSpec> to_layer_specs(const ArchitectureSpec& spec, int num_classes);

/// Builds a runnable, zero-initialized network for the spec.
nn::NetworkState instantiate(const ArchitectureSpec& spec, int input_channels, int input_height,
                             int input_width, int num_classes);

/// Compact human-readable identifier, e.g. "c8k3p-c16k5-f64-relu-lr1.0e-02-m0.90".
std::string describe(const ArchitectureSpec& spec);

/// The space used by the shipped experiments: 2-4 conv blocks, per-block
/// channels 4-64 and pooling on/off, global kernel {3,5}, 0-2 hidden FC
/// layers of 16-256 units, nonlinearity {relu,tanh}, log-scale learning rate
/// [1e-4,1e-1] and momentum [0,0.95].
SearchSpace default_space(int input_channels, int input_height, int input_width, int num_classes);

/// The fixed 16-architecture suite used by the correlation and timing
/// experiments (28x28 single-channel inputs).
std::vector<ArchitectureSpec> default_suite16();

nlohmann::json to_json(const ArchitectureSpec& spec);
ArchitectureSpec architecture_from_json(const nlohmann::json& j);
nlohmann::json to_json(const SearchSpace& space);
SearchSpace space_from_json(const nlohmann::json& j);
SearchSpace load_space(const std::string& path);

} // namespace archsel::space

#endif
