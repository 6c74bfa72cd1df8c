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

#ifndef ARCHSEL_EST_ESTIMATORS_HPP
#define ARCHSEL_EST_ESTIMATORS_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "archsel/core/timing.hpp"
#include "archsel/data/dataset.hpp"
#include "archsel/space/search_space.hpp"

namespace archsel::est {

enum class EstimatorMode { Full, Heuristic, RandomWeights };

std::string estimator_mode_name(EstimatorMode mode);
EstimatorMode estimator_mode_from_name(const std::string& name);

/// Split-training estimator settings: phase 1 trains the whole network
/// end-to-end for conv_epochs, phase 2 freezes everything below the
/// feature/head split and trains the FC head for fc_epochs. Each of the
/// n_seeds repetitions re-initializes the weights from a derived seed.
///
/// Seed chain (part of the reproducibility contract): repetition i uses
/// seed_i = derive_seed(master_seed, i); weights initialize from
/// derive_seed(seed_i, 1), phase 1 shuffles from derive_seed(seed_i, 2),
/// phase 2 from derive_seed(seed_i, 3). estimate_full uses the same chain
/// with its single training phase in slot 2.
struct HeuristicConfig {
    int conv_epochs = 2;
    int fc_epochs = 15;
    int n_seeds = 5;
    int batch_size = 64;
    int workers = 1;
    std::uint64_t master_seed = 0;
};

/// Plain multi-seed full training.
struct FullTrainConfig {
    int epochs = 50;
    int n_seeds = 10;
    int batch_size = 64;
    int workers = 1;
    std::uint64_t master_seed = 0;
};

struct SeedOutcome {
    double val_error = 0.0;
    int phase1_epochs = 0; // full-network epochs actually run
    int phase2_epochs = 0; // head-only epochs actually run
    bool diverged = false;

    bool operator==(const SeedOutcome&) const = default;
};

struct EvaluationResult {
    std::string architecture_id;
    EstimatorMode mode = EstimatorMode::Full;
    std::vector<double> per_seed_errors;
    std::vector<SeedOutcome> seeds;
    double best = 0.0; // min over seeds
    double mean = 0.0;
    double wall_time_seconds = 0.0; // end-to-end elapsed, not summed CPU
    int diverged_count = 0;
    int workers = 1;
};

/// n_seeds independent full trainings of all layers. Diverged runs score 1.0.
EvaluationResult estimate_full(const space::ArchitectureSpec& spec, const data::Dataset& train,
                               const data::Dataset& val, const FullTrainConfig& cfg);

/// The split-training heuristic: per seed, conv_epochs end-to-end epochs,
/// then fc_epochs head-only epochs with the feature extractor frozen.
EvaluationResult estimate_heuristic(const space::ArchitectureSpec& spec, const data::Dataset& train,
                                    const data::Dataset& val, const HeuristicConfig& cfg);

/// Baseline with the convolutional stack frozen at its random
/// initialization; only the FC head trains (conv_epochs is ignored).
EvaluationResult estimate_random_weights(const space::ArchitectureSpec& spec, const data::Dataset& train,
                                         const data::Dataset& val, const HeuristicConfig& cfg);

using archsel::measure_time;

} // namespace archsel::est

#endif
