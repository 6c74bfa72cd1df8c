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

#ifndef ARCHSEL_HARNESS_EXPERIMENT_HPP
#define ARCHSEL_HARNESS_EXPERIMENT_HPP

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "archsel/bo/loop.hpp"
#include "archsel/data/dataset.hpp"
#include "archsel/est/estimators.hpp"
#include "archsel/harness/report.hpp"
#include "archsel/space/search_space.hpp"

namespace archsel::harness {

enum class ExperimentKind { Correlation, Timing, Search };

struct SyntheticParams {
    int num_classes = 10;
    int train_per_class = 600;
    int val_per_class = 100;
    int channels = 1;
    int height = 28;
    int width = 28;
    double noise_sigma = 0.45;
};

/// Where the experiment's data comes from. kind is one of
/// "idx" (big-endian IDX image/label pairs), "usps" (text layout),
/// "fixture" (the binary ASFX container) or "synthetic".
struct DatasetConfig {
    std::string kind = "synthetic";
    std::string name;
    std::string train_images, train_labels, val_images, val_labels; // idx
    std::string train_path, val_path;                               // usps / fixture
    SyntheticParams synth;
    int subset_train_per_class = 0; // 0 disables stratified subsetting
    int subset_val_per_class = 0;
    bool normalize = true;
};

struct ConfirmConfig {
    int n_seeds = 5;
    int epochs = -1; // -1: use the full estimator's epoch count
};

struct ExperimentConfig {
    ExperimentKind kind = ExperimentKind::Correlation;
    DatasetConfig dataset;
    std::vector<space::ArchitectureSpec> architectures; // empty + use_default_suite for the shipped 16
    bool use_default_suite = false;
    space::SearchSpace search_space;
    bool use_default_space = true;
    est::FullTrainConfig full;
    est::HeuristicConfig heuristic;
    est::HeuristicConfig random_weights;
    bo::BoConfig bo;
    ConfirmConfig confirm;
    std::uint64_t seed = 1;
    int workers = 1;
    std::string out_dir = "out";
    bool self_correlation = false; // test hook: the heuristic column repeats the full estimator
    nlohmann::json raw;            // canonical config json used for the run id
};

/// Parses a config file; relative dataset paths resolve against the config's
/// directory, and referenced files must exist. Throws ConfigError.
ExperimentConfig load_experiment_config(const std::string& path);
ExperimentConfig experiment_config_from_json(nlohmann::json j, const std::string& base_dir);

struct LoadedData {
    data::Dataset train;
    data::Dataset val;
};

/// Loads, subsets and normalizes per the config. Subsetting happens first;
/// normalization stats come from the (subset) training split only.
LoadedData load_dataset(const ExperimentConfig& cfg);

/// Resolved architecture list for correlation/timing runs.
std::vector<space::ArchitectureSpec> resolve_architectures(const ExperimentConfig& cfg);

/// Runs full + heuristic estimators over the architecture list, computes the
/// two Pearson correlations and persists CSV + JSON reports into out_dir.
CorrelationReport run_correlation_experiment(const ExperimentConfig& cfg);

/// Measures 1-seed full training against the multi-seed heuristic and
/// random-weights estimators, architecture by architecture (sequentially, so
/// wall times are clean), and persists the report.
TimingReport run_timing_comparison(const ExperimentConfig& cfg);

/// Bayesian-optimization search with the heuristic estimator as objective,
/// followed by a multi-seed full-training confirmation of the incumbent.
SearchReport run_architecture_search(const ExperimentConfig& cfg);

/// One-architecture, one-mode estimate (the CLI `estimate` subcommand).
est::EvaluationResult run_single_estimate(const ExperimentConfig& cfg,
                                          const space::ArchitectureSpec& spec, est::EstimatorMode mode);

} // namespace archsel::harness

#endif
