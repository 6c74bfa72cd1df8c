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

#include "archsel/est/estimators.hpp"

#include <algorithm>
#include <numeric>

#include "archsel/core/errors.hpp"
#include "archsel/core/parallel.hpp"
#include "archsel/core/rng.hpp"
#include "archsel/nn/train.hpp"

namespace archsel::est {

namespace {

// seed-stream tags for the per-seed derivations
constexpr std::uint64_t kInitStream = 1;
constexpr std::uint64_t kPhase1Stream = 2;
constexpr std::uint64_t kPhase2Stream = 3;

nn::TrainConfig base_train_config(const space::ArchitectureSpec& spec, int batch_size, int epochs,
                                  std::uint64_t seed) {
    nn::TrainConfig tc;
    tc.learning_rate = spec.learning_rate;
    tc.momentum = spec.momentum;
    tc.batch_size = batch_size;
    tc.epochs = epochs;
    tc.seed = seed;
    return tc;
}

std::vector<std::uint8_t> freeze_below_split(const nn::NetworkState& net) {
    std::vector<std::uint8_t> mask(static_cast<std::size_t>(net.layer_count()), 0);
    for (int i = 0; i < net.split_index; ++i) mask[static_cast<std::size_t>(i)] = 1;
    return mask;
}

EvaluationResult aggregate(const space::ArchitectureSpec& spec, EstimatorMode mode,
                           std::vector<SeedOutcome> seeds, double wall_seconds, int workers) {
    EvaluationResult r;
    r.architecture_id = space::describe(spec);
    r.mode = mode;
    r.seeds = std::move(seeds);
    r.per_seed_errors.reserve(r.seeds.size());
    for (const SeedOutcome& s : r.seeds) {
        r.per_seed_errors.push_back(s.val_error);
        if (s.diverged) ++r.diverged_count;
    }
    r.best = *std::min_element(r.per_seed_errors.begin(), r.per_seed_errors.end());
    r.mean = std::accumulate(r.per_seed_errors.begin(), r.per_seed_errors.end(), 0.0) /
             static_cast<double>(r.per_seed_errors.size());
    r.wall_time_seconds = wall_seconds;
    r.workers = workers;
    return r;
}

/// One heuristic/random-weights seed: phase 1 trains everything end-to-end,
/// phase 2 trains only the head with the feature extractor frozen. With
/// conv_epochs == 0 the conv stack keeps its random initialization.
SeedOutcome run_split_seed(const space::ArchitectureSpec& spec, const data::Dataset& train,
                           const data::Dataset& val, const HeuristicConfig& cfg, int conv_epochs,
                           std::uint64_t seed) {
    nn::NetworkState net =
        space::instantiate(spec, train.channels(), train.height(), train.width(), train.num_classes);
    nn::init_weights(net, derive_seed(seed, kInitStream));

    SeedOutcome out;
    if (conv_epochs > 0) {
        nn::TrainConfig phase1 =
            base_train_config(spec, cfg.batch_size, conv_epochs, derive_seed(seed, kPhase1Stream));
        nn::TrainResult r1 = nn::train(net, train, val, phase1);
        out.phase1_epochs = static_cast<int>(r1.history.size());
        if (r1.diverged) {
            out.diverged = true;
            out.val_error = 1.0;
            return out;
        }
    }
    nn::TrainConfig phase2 =
        base_train_config(spec, cfg.batch_size, cfg.fc_epochs, derive_seed(seed, kPhase2Stream));
    phase2.freeze_mask = freeze_below_split(net);
    nn::TrainResult r2 = nn::train(net, train, val, phase2);
    out.phase2_epochs = static_cast<int>(r2.history.size());
    if (r2.diverged) {
        out.diverged = true;
        out.val_error = 1.0;
        return out;
    }
    out.val_error = nn::evaluate(net, val);
    return out;
}

EvaluationResult estimate_split(const space::ArchitectureSpec& spec, const data::Dataset& train,
                                const data::Dataset& val, const HeuristicConfig& cfg, int conv_epochs,
                                EstimatorMode mode) {
    if (cfg.n_seeds < 1) throw ConfigError("estimator needs n_seeds >= 1");
    space::validate(spec, train.channels(), train.height(), train.width(), train.num_classes);
    std::vector<SeedOutcome> seeds(static_cast<std::size_t>(cfg.n_seeds));
    const double wall = measure_time([&] {
        parallel_for(cfg.n_seeds, cfg.workers, [&](int i) {
            seeds[static_cast<std::size_t>(i)] = run_split_seed(
                spec, train, val, cfg, conv_epochs, derive_seed(cfg.master_seed, static_cast<std::uint64_t>(i)));
        });
    });
    return aggregate(spec, mode, std::move(seeds), wall, cfg.workers);
}

} // namespace

std::string estimator_mode_name(EstimatorMode mode) {
    switch (mode) {
        case EstimatorMode::Full: return "full";
        case EstimatorMode::Heuristic: return "heuristic";
        case EstimatorMode::RandomWeights: return "random_weights";
    }
    return "?";
}

EstimatorMode estimator_mode_from_name(const std::string& name) {
    if (name == "full") return EstimatorMode::Full;
    if (name == "heuristic") return EstimatorMode::Heuristic;
    if (name == "random_weights") return EstimatorMode::RandomWeights;
    throw ConfigError("unknown estimator mode '" + name + "'");
}

EvaluationResult estimate_full(const space::ArchitectureSpec& spec, const data::Dataset& train,
                               const data::Dataset& val, const FullTrainConfig& cfg) {
    if (cfg.n_seeds < 1) throw ConfigError("estimator needs n_seeds >= 1");
    space::validate(spec, train.channels(), train.height(), train.width(), train.num_classes);
    std::vector<SeedOutcome> seeds(static_cast<std::size_t>(cfg.n_seeds));
    const double wall = measure_time([&] {
        parallel_for(cfg.n_seeds, cfg.workers, [&](int i) {
            const std::uint64_t seed = derive_seed(cfg.master_seed, static_cast<std::uint64_t>(i));
            nn::NetworkState net =
                space::instantiate(spec, train.channels(), train.height(), train.width(), train.num_classes);
            nn::init_weights(net, derive_seed(seed, kInitStream));
            nn::TrainConfig tc =
                base_train_config(spec, cfg.batch_size, cfg.epochs, derive_seed(seed, kPhase1Stream));
            nn::TrainResult r = nn::train(net, train, val, tc);
            SeedOutcome out;
            out.phase1_epochs = static_cast<int>(r.history.size());
            if (r.diverged) {
                out.diverged = true;
                out.val_error = 1.0;
            } else {
                out.val_error = nn::evaluate(net, val);
            }
            seeds[static_cast<std::size_t>(i)] = out;
        });
    });
    return aggregate(spec, EstimatorMode::Full, std::move(seeds), wall, cfg.workers);
}

EvaluationResult estimate_heuristic(const space::ArchitectureSpec& spec, const data::Dataset& train,
                                    const data::Dataset& val, const HeuristicConfig& cfg) {
    return estimate_split(spec, train, val, cfg, cfg.conv_epochs, EstimatorMode::Heuristic);
}

EvaluationResult estimate_random_weights(const space::ArchitectureSpec& spec, const data::Dataset& train,
                                         const data::Dataset& val, const HeuristicConfig& cfg) {
    return estimate_split(spec, train, val, cfg, 0, EstimatorMode::RandomWeights);
}

} // namespace archsel::est
