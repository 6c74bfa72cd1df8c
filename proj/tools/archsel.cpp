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

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>
#include <json.hpp>

#include "archsel/core/errors.hpp"
#include "archsel/harness/experiment.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitRuntime = 4;

struct CommonFlags {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<int> workers;
    std::optional<std::string> out_dir;
    std::optional<std::string> dataset;
};

void add_common(CLI::App* cmd, CommonFlags& flags, bool config_required = true) {
    auto* opt = cmd->add_option("--config", flags.config_path, "experiment config file (JSON)");
    if (config_required) opt->required();
    cmd->add_option("--seed", flags.seed, "override the master seed");
    cmd->add_option("--workers", flags.workers, "override the worker count");
    cmd->add_option("--out", flags.out_dir, "override the output directory");
    cmd->add_option("--dataset", flags.dataset,
                    "override the dataset: \"synthetic\", a directory with the MNIST IDX files, or a "
                    "dataset-config JSON file");
}

/// Turns any relative path fields of a dataset block into absolute ones, so
/// the block can be spliced into a config that resolves against a different
/// base directory.
void absolutize_dataset_paths(nlohmann::json& dataset, const std::filesystem::path& base) {
    for (const char* key : {"train_images", "train_labels", "val_images", "val_labels", "train", "val"}) {
        if (!dataset.contains(key)) continue;
        std::filesystem::path p(dataset[key].get<std::string>());
        if (p.is_relative()) dataset[key] = (base / p).lexically_normal().string();
    }
}

archsel::harness::ExperimentConfig load_with_overrides(const CommonFlags& flags) {
    using namespace archsel;
    harness::ExperimentConfig cfg = harness::load_experiment_config(flags.config_path);
    if (flags.seed) {
        cfg.seed = *flags.seed;
        cfg.raw["seed"] = *flags.seed;
    }
    if (flags.dataset) {
        const std::string& ds = *flags.dataset;
        nlohmann::json dataset_json;
        if (ds == "synthetic") {
            dataset_json = {{"kind", "synthetic"}, {"name", "synthetic"}};
        } else if (std::filesystem::is_directory(ds)) {
            const std::string dir = std::filesystem::absolute(ds).lexically_normal().string();
            dataset_json = {{"kind", "idx"},
                            {"name", "mnist"},
                            {"train_images", dir + "/train-images-idx3-ubyte"},
                            {"train_labels", dir + "/train-labels-idx1-ubyte"},
                            {"val_images", dir + "/t10k-images-idx3-ubyte"},
                            {"val_labels", dir + "/t10k-labels-idx1-ubyte"}};
        } else {
            std::ifstream in(ds);
            if (!in) throw ConfigError("cannot open dataset override " + ds);
            try {
                in >> dataset_json;
            } catch (const nlohmann::json::exception& e) {
                throw ConfigError(ds + ": " + e.what());
            }
            absolutize_dataset_paths(dataset_json, std::filesystem::absolute(ds).parent_path());
        }
        nlohmann::json raw = cfg.raw;
        raw["dataset"] = dataset_json;
        // the rest of the config keeps resolving against its own directory
        cfg = harness::experiment_config_from_json(
            raw, std::filesystem::path(flags.config_path).parent_path().string());
        if (flags.seed) cfg.seed = *flags.seed;
    }
    if (flags.workers) cfg.workers = *flags.workers;
    if (flags.out_dir) cfg.out_dir = *flags.out_dir;
    return cfg;
}

int dispatch(int argc, char** argv) {
    using namespace archsel;
    CLI::App app{"CNN architecture selection: split-training estimators, Kriging-based optimization "
                 "and the experiment harness"};
    app.require_subcommand(1);

    CommonFlags correlate_flags, time_flags, search_flags, estimate_flags;
    std::string estimate_mode = "heuristic";
    int estimate_suite_index = -1;
    std::string estimate_arch_file;
    std::string report_in, report_out = "out";

    CLI::App* correlate = app.add_subcommand("correlate", "correlation study: heuristic vs full training");
    add_common(correlate, correlate_flags);

    CLI::App* time_cmd = app.add_subcommand("time", "timing comparison of the three estimators");
    add_common(time_cmd, time_flags);

    CLI::App* search = app.add_subcommand("search", "Bayesian-optimization architecture search");
    add_common(search, search_flags);

    CLI::App* estimate = app.add_subcommand("estimate", "estimate one architecture with one mode");
    add_common(estimate, estimate_flags);
    estimate->add_option("--mode", estimate_mode, "full | heuristic | random_weights")
        ->check(CLI::IsMember({"full", "heuristic", "random_weights"}));
    estimate->add_option("--suite-index", estimate_suite_index, "index into the shipped 16-architecture suite");
    estimate->add_option("--arch", estimate_arch_file, "architecture JSON file");

    CLI::App* report = app.add_subcommand("report", "re-emit CSV/JSON files from a stored report");
    report->add_option("--in", report_in, "stored report JSON")->required();
    report->add_option("--out", report_out, "output directory");

    CLI11_PARSE(app, argc, argv);

    if (correlate->parsed()) {
        harness::ExperimentConfig cfg = load_with_overrides(correlate_flags);
        harness::CorrelationReport rep = harness::run_correlation_experiment(cfg);
        std::printf("correlation run %s: n=%d corr_mean_best=%.4f corr_best_best=%.4f%s\n",
                    rep.run_id.c_str(), rep.n_architectures(), rep.corr_mean_best, rep.corr_best_best,
                    rep.high_noise ? " [high-noise]" : "");
        std::printf("reports written to %s\n", cfg.out_dir.c_str());
        return kExitOk;
    }
    if (time_cmd->parsed()) {
        harness::ExperimentConfig cfg = load_with_overrides(time_flags);
        harness::TimingReport rep = harness::run_timing_comparison(cfg);
        std::printf("timing run %s: ratio_heuristic=%.4f ratio_random_weights=%.4f\n", rep.run_id.c_str(),
                    rep.ratio_heuristic, rep.ratio_random_weights);
        std::printf("reports written to %s\n", cfg.out_dir.c_str());
        return kExitOk;
    }
    if (search->parsed()) {
        harness::ExperimentConfig cfg = load_with_overrides(search_flags);
        harness::SearchReport rep = harness::run_architecture_search(cfg);
        std::printf("search run %s: incumbent %s objective=%.4f confirmed best=%.4f mean=%.4f\n",
                    rep.run_id.c_str(), rep.incumbent_id.c_str(), rep.incumbent_objective,
                    rep.confirmation.best, rep.confirmation.mean);
        std::printf("reports written to %s\n", cfg.out_dir.c_str());
        return kExitOk;
    }
    if (estimate->parsed()) {
        harness::ExperimentConfig cfg = load_with_overrides(estimate_flags);
        space::ArchitectureSpec spec;
        if (!estimate_arch_file.empty()) {
            std::ifstream in(estimate_arch_file);
            if (!in) throw ConfigError("cannot open architecture file " + estimate_arch_file);
            nlohmann::json j;
            try {
                in >> j;
            } catch (const nlohmann::json::exception& e) {
                throw ConfigError(estimate_arch_file + ": " + e.what());
            }
            spec = space::architecture_from_json(j);
        } else {
            const auto suite = space::default_suite16();
            if (estimate_suite_index < 0 || estimate_suite_index >= static_cast<int>(suite.size()))
                throw ConfigError("estimate needs --arch <file> or --suite-index in [0," +
                                  std::to_string(suite.size()) + ")");
            spec = suite[static_cast<std::size_t>(estimate_suite_index)];
        }
        est::EvaluationResult result =
            harness::run_single_estimate(cfg, spec, est::estimator_mode_from_name(estimate_mode));
        std::cout << harness::to_json(result).dump(2) << "\n";
        return kExitOk;
    }
    if (report->parsed()) {
        std::ifstream in(report_in);
        if (!in) throw ConfigError("cannot open report " + report_in);
        nlohmann::json j;
        try {
            in >> j;
        } catch (const nlohmann::json::exception& e) {
            throw ConfigError(report_in + ": " + e.what());
        }
        for (const std::string& path : harness::emit_report_json(j, report_out))
            std::printf("wrote %s\n", path.c_str());
        return kExitOk;
    }
    return kExitConfig;
}

} // namespace

int main(int argc, char** argv) {
    try {
        return dispatch(argc, argv);
    } catch (const archsel::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const archsel::DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return kExitData;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
}
