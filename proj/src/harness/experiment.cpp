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

#include "archsel/harness/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "archsel/core/errors.hpp"
#include "archsel/core/parallel.hpp"
#include "archsel/core/rng.hpp"
#include "archsel/core/timing.hpp"
#include "archsel/harness/stats.hpp"

namespace archsel::harness {

namespace {

// seed streams rooted at the experiment master seed
constexpr std::uint64_t kSynthTrainStream = 101;
constexpr std::uint64_t kSynthValStream = 102;
constexpr std::uint64_t kSubsetTrainStream = 103;
constexpr std::uint64_t kSubsetValStream = 104;
constexpr std::uint64_t kFullArchBase = 0x1000;
constexpr std::uint64_t kHeuristicArchBase = 0x2000;
constexpr std::uint64_t kRandomArchBase = 0x3000;
constexpr std::uint64_t kBoStream = 0x4000;
constexpr std::uint64_t kBoObjectiveStream = 0x4100;
constexpr std::uint64_t kConfirmStream = 0x4200;

ExperimentKind kind_from_name(const std::string& name) {
    if (name == "correlation") return ExperimentKind::Correlation;
    if (name == "timing") return ExperimentKind::Timing;
    if (name == "search") return ExperimentKind::Search;
    throw ConfigError("experiment kind must be correlation/timing/search, got '" + name + "'");
}

std::string resolve_path(const std::string& base_dir, const std::string& path) {
    if (path.empty() || base_dir.empty()) return path;
    std::filesystem::path p(path);
    if (p.is_absolute()) return path;
    return (std::filesystem::path(base_dir) / p).lexically_normal().string();
}

void require_file(const std::string& path, const std::string& what) {
    if (!std::filesystem::exists(path))
        throw ConfigError(what + " does not exist: " + path);
}

est::HeuristicConfig heuristic_from_json(const nlohmann::json& j, est::HeuristicConfig base) {
    base.conv_epochs = j.value("conv_epochs", base.conv_epochs);
    base.fc_epochs = j.value("fc_epochs", base.fc_epochs);
    base.n_seeds = j.value("n_seeds", base.n_seeds);
    base.batch_size = j.value("batch_size", base.batch_size);
    return base;
}

} // namespace

ExperimentConfig experiment_config_from_json(nlohmann::json j, const std::string& base_dir) {
    try {
        ExperimentConfig cfg;
        cfg.raw = j;
        cfg.kind = kind_from_name(j.at("kind").get<std::string>());
        cfg.seed = j.value("seed", 1ULL);
        cfg.workers = j.value("workers", 1);
        cfg.out_dir = resolve_path(base_dir, j.value("out_dir", std::string("out")));
        cfg.self_correlation = j.value("self_correlation", false);

        const nlohmann::json& d = j.at("dataset");
        cfg.dataset.kind = d.at("kind").get<std::string>();
        cfg.dataset.name = d.value("name", cfg.dataset.kind);
        cfg.dataset.normalize = d.value("normalize", true);
        cfg.dataset.subset_train_per_class = d.value("subset_train_per_class", 0);
        cfg.dataset.subset_val_per_class = d.value("subset_val_per_class", 0);
        if (cfg.dataset.kind == "idx") {
            cfg.dataset.train_images = resolve_path(base_dir, d.at("train_images").get<std::string>());
            cfg.dataset.train_labels = resolve_path(base_dir, d.at("train_labels").get<std::string>());
            cfg.dataset.val_images = resolve_path(base_dir, d.at("val_images").get<std::string>());
            cfg.dataset.val_labels = resolve_path(base_dir, d.at("val_labels").get<std::string>());
            require_file(cfg.dataset.train_images, "idx image file");
            require_file(cfg.dataset.train_labels, "idx label file");
            require_file(cfg.dataset.val_images, "idx image file");
            require_file(cfg.dataset.val_labels, "idx label file");
        } else if (cfg.dataset.kind == "usps" || cfg.dataset.kind == "fixture") {
            cfg.dataset.train_path = resolve_path(base_dir, d.at("train").get<std::string>());
            cfg.dataset.val_path = resolve_path(base_dir, d.at("val").get<std::string>());
            require_file(cfg.dataset.train_path, "dataset file");
            require_file(cfg.dataset.val_path, "dataset file");
        } else if (cfg.dataset.kind == "synthetic") {
            SyntheticParams& s = cfg.dataset.synth;
            s.num_classes = d.value("classes", s.num_classes);
            s.train_per_class = d.value("train_per_class", s.train_per_class);
            s.val_per_class = d.value("val_per_class", s.val_per_class);
            s.channels = d.value("channels", s.channels);
            s.height = d.value("height", s.height);
            s.width = d.value("width", s.width);
            s.noise_sigma = d.value("noise_sigma", s.noise_sigma);
        } else {
            throw ConfigError("dataset kind must be idx/usps/fixture/synthetic, got '" + cfg.dataset.kind +
                              "'");
        }

        if (j.contains("architectures")) {
            const nlohmann::json& archs = j.at("architectures");
            if (archs.is_string()) {
                if (archs.get<std::string>() != "default16")
                    throw ConfigError("architectures must be \"default16\" or a list");
                cfg.use_default_suite = true;
            } else {
                for (const auto& a : archs) cfg.architectures.push_back(space::architecture_from_json(a));
            }
        } else if (cfg.kind != ExperimentKind::Search) {
            cfg.use_default_suite = true;
        }

        if (j.contains("space")) {
            const nlohmann::json& sp = j.at("space");
            if (sp.is_string()) {
                if (sp.get<std::string>() != "default")
                    throw ConfigError("space must be \"default\" or an inline definition");
                cfg.use_default_space = true;
            } else {
                cfg.search_space = space::space_from_json(sp);
                cfg.use_default_space = false;
            }
        }

        if (j.contains("full")) {
            const nlohmann::json& f = j.at("full");
            cfg.full.epochs = f.value("epochs", cfg.full.epochs);
            cfg.full.n_seeds = f.value("n_seeds", cfg.full.n_seeds);
            cfg.full.batch_size = f.value("batch_size", cfg.full.batch_size);
        }
        if (j.contains("heuristic")) cfg.heuristic = heuristic_from_json(j.at("heuristic"), cfg.heuristic);
        cfg.random_weights = cfg.heuristic;
        if (j.contains("random_weights"))
            cfg.random_weights = heuristic_from_json(j.at("random_weights"), cfg.random_weights);

        if (j.contains("bo")) {
            const nlohmann::json& b = j.at("bo");
            cfg.bo.n_init = b.value("n_init", cfg.bo.n_init);
            cfg.bo.n_iter = b.value("n_iter", cfg.bo.n_iter);
            cfg.bo.kernel = bo::kernel_kind_from_name(b.value("kernel", std::string("matern52")));
            cfg.bo.proposal.candidates = b.value("candidates", cfg.bo.proposal.candidates);
            cfg.bo.proposal.refine_from = b.value("refine_from", cfg.bo.proposal.refine_from);
            cfg.bo.proposal.refine_rounds = b.value("refine_rounds", cfg.bo.proposal.refine_rounds);
            cfg.bo.max_resamples = b.value("max_resamples", cfg.bo.max_resamples);
            cfg.bo.gp_starts = b.value("gp_starts", cfg.bo.gp_starts);
        }
        if (j.contains("confirm")) {
            cfg.confirm.n_seeds = j.at("confirm").value("n_seeds", cfg.confirm.n_seeds);
            cfg.confirm.epochs = j.at("confirm").value("epochs", cfg.confirm.epochs);
        }
        return cfg;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("bad experiment config: ") + e.what());
    }
}

ExperimentConfig load_experiment_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(path + ": " + e.what());
    }
    return experiment_config_from_json(std::move(j), std::filesystem::path(path).parent_path().string());
}

LoadedData load_dataset(const ExperimentConfig& cfg) {
    const DatasetConfig& d = cfg.dataset;
    LoadedData data;
    if (d.kind == "idx") {
        data.train = data::load_idx(d.train_images, d.train_labels);
        data.val = data::load_idx(d.val_images, d.val_labels);
    } else if (d.kind == "usps") {
        data.train = data::load_usps(d.train_path);
        data.val = data::load_usps(d.val_path);
    } else if (d.kind == "fixture") {
        data.train = data::load_fixture(d.train_path);
        data.val = data::load_fixture(d.val_path);
    } else {
        const SyntheticParams& s = d.synth;
        data.train = data::synthesize(s.num_classes, s.train_per_class, s.channels, s.height, s.width,
                                      s.noise_sigma, derive_seed(cfg.seed, kSynthTrainStream));
        data.val = data::synthesize(s.num_classes, s.val_per_class, s.channels, s.height, s.width,
                                    s.noise_sigma, derive_seed(cfg.seed, kSynthValStream));
    }
    data.train.name = d.name;
    data.val.name = d.name;
    data.train.split = "train";
    data.val.split = "validation";
    // align class counts (a subset loader may have seen fewer classes)
    const int k = std::max(data.train.num_classes, data.val.num_classes);
    data.train.num_classes = k;
    data.val.num_classes = k;

    if (d.subset_train_per_class > 0)
        data.train = data::subset_stratified(data.train, d.subset_train_per_class,
                                             derive_seed(cfg.seed, kSubsetTrainStream));
    if (d.subset_val_per_class > 0)
        data.val = data::subset_stratified(data.val, d.subset_val_per_class,
                                           derive_seed(cfg.seed, kSubsetValStream));
    if (d.normalize) {
        const data::NormStats stats = data::compute_norm_stats(data.train);
        data.train = data::normalize(data.train, stats);
        data.val = data::normalize(data.val, stats);
    }
    return data;
}

std::vector<space::ArchitectureSpec> resolve_architectures(const ExperimentConfig& cfg) {
    if (!cfg.architectures.empty()) return cfg.architectures;
    if (cfg.use_default_suite) return space::default_suite16();
    throw ConfigError("experiment needs an architecture list or \"default16\"");
}

CorrelationReport run_correlation_experiment(const ExperimentConfig& cfg) {
    const LoadedData data = load_dataset(cfg);
    const std::vector<space::ArchitectureSpec> archs = resolve_architectures(cfg);
    if (archs.size() < 3) throw ConfigError("correlation experiment needs at least 3 architectures");
    for (const auto& spec : archs)
        space::validate(spec, data.train.channels(), data.train.height(), data.train.width(),
                        data.train.num_classes);

    std::vector<ArchRow> rows(archs.size());
    parallel_for(static_cast<int>(archs.size()), cfg.workers, [&](int i) {
        const space::ArchitectureSpec& spec = archs[static_cast<std::size_t>(i)];
        est::FullTrainConfig full_cfg = cfg.full;
        full_cfg.workers = 1;
        full_cfg.master_seed = derive_seed(cfg.seed, kFullArchBase + static_cast<std::uint64_t>(i));
        est::EvaluationResult full = est::estimate_full(spec, data.train, data.val, full_cfg);

        est::EvaluationResult heuristic;
        if (cfg.self_correlation) {
            heuristic = full;
            heuristic.mode = est::EstimatorMode::Heuristic;
        } else {
            est::HeuristicConfig h = cfg.heuristic;
            h.workers = 1;
            h.master_seed = derive_seed(cfg.seed, kHeuristicArchBase + static_cast<std::uint64_t>(i));
            heuristic = est::estimate_heuristic(spec, data.train, data.val, h);
        }
        rows[static_cast<std::size_t>(i)] = {space::describe(spec), spec, std::move(full),
                                             std::move(heuristic)};
    });

    CorrelationReport report;
    report.run_id = run_id_from(cfg.raw, cfg.seed);
    report.dataset_name = data.train.name;
    report.seed = cfg.seed;
    report.rows = std::move(rows);
    std::vector<double> full_means, full_bests, heur_bests;
    for (const ArchRow& row : report.rows) {
        full_means.push_back(row.full.mean);
        full_bests.push_back(row.full.best);
        heur_bests.push_back(row.heuristic.best);
    }
    report.corr_mean_best = pearson(full_means, heur_bests);
    report.corr_best_best = pearson(full_bests, heur_bests);
    report.chance_error = 1.0 - 1.0 / static_cast<double>(data.train.num_classes);
    report.high_noise = true;
    for (const ArchRow& row : report.rows) {
        for (double v : {row.full.mean, row.full.best, row.heuristic.mean, row.heuristic.best})
            if (std::abs(v - report.chance_error) > 0.02) report.high_noise = false;
    }
    emit_report(report, cfg.out_dir);
    return report;
}

TimingReport run_timing_comparison(const ExperimentConfig& cfg) {
    const LoadedData data = load_dataset(cfg);
    const std::vector<space::ArchitectureSpec> archs = resolve_architectures(cfg);
    if (archs.empty()) throw ConfigError("timing experiment needs a non-empty architecture list");

    TimingReport report;
    report.run_id = run_id_from(cfg.raw, cfg.seed);
    report.dataset_name = data.train.name;
    report.seed = cfg.seed;

    double full_sum = 0.0, heuristic_sum = 0.0, random_sum = 0.0;
    // architectures run sequentially: every estimator sees the same worker
    // count and an otherwise idle machine, so the wall-time ratios are clean
    for (std::size_t i = 0; i < archs.size(); ++i) {
        const space::ArchitectureSpec& spec = archs[i];
        est::FullTrainConfig full_cfg = cfg.full;
        full_cfg.n_seeds = 1; // the ratio denominator is a single normal training
        full_cfg.workers = cfg.workers;
        full_cfg.master_seed = derive_seed(cfg.seed, kFullArchBase + static_cast<std::uint64_t>(i));
        const est::EvaluationResult full = est::estimate_full(spec, data.train, data.val, full_cfg);

        est::HeuristicConfig h = cfg.heuristic;
        h.workers = cfg.workers;
        h.master_seed = derive_seed(cfg.seed, kHeuristicArchBase + static_cast<std::uint64_t>(i));
        const est::EvaluationResult heuristic = est::estimate_heuristic(spec, data.train, data.val, h);

        est::HeuristicConfig r = cfg.random_weights;
        r.workers = cfg.workers;
        r.master_seed = derive_seed(cfg.seed, kRandomArchBase + static_cast<std::uint64_t>(i));
        const est::EvaluationResult random = est::estimate_random_weights(spec, data.train, data.val, r);

        report.rows.push_back({space::describe(spec), spec, full.wall_time_seconds,
                               heuristic.wall_time_seconds, random.wall_time_seconds});
        full_sum += full.wall_time_seconds;
        heuristic_sum += heuristic.wall_time_seconds;
        random_sum += random.wall_time_seconds;
    }
    report.ratio_heuristic = heuristic_sum / full_sum;
    report.ratio_random_weights = random_sum / full_sum;
    emit_report(report, cfg.out_dir);
    return report;
}

SearchReport run_architecture_search(const ExperimentConfig& cfg) {
    const LoadedData data = load_dataset(cfg);
    const space::SearchSpace space_def =
        cfg.use_default_space ? space::default_space(data.train.channels(), data.train.height(),
                                                     data.train.width(), data.train.num_classes)
                              : cfg.search_space;

    est::HeuristicConfig objective_cfg = cfg.heuristic;
    objective_cfg.workers = cfg.workers;
    objective_cfg.master_seed = derive_seed(cfg.seed, kBoObjectiveStream);

    bo::BoProblem problem;
    problem.dim = space_def.dim();
    problem.feasible = [&](const Eigen::VectorXd& v) {
        try {
            space::decode(space_def, v);
            return true;
        } catch (const InfeasibleArchitectureError&) {
            return false;
        }
    };
    problem.objective = [&](const Eigen::VectorXd& v) {
        const space::ArchitectureSpec spec = space::decode(space_def, v);
        return est::estimate_heuristic(spec, data.train, data.val, objective_cfg).best;
    };
    problem.label = [&](const Eigen::VectorXd& v) {
        return space::describe(space::decode(space_def, v));
    };

    bo::BoConfig bo_cfg = cfg.bo;
    bo_cfg.seed = derive_seed(cfg.seed, kBoStream);

    SearchReport report;
    auto [log, total_seconds] = measure_time([&] { return bo_loop(problem, bo_cfg); });
    report.log = std::move(log);
    report.total_wall_seconds = total_seconds;
    report.run_id = run_id_from(cfg.raw, cfg.seed);
    report.dataset_name = data.train.name;
    report.seed = cfg.seed;
    report.dim = space_def.dim();
    report.incumbent = space::decode(space_def, report.log.incumbent_point());
    report.incumbent_id = space::describe(report.incumbent);
    report.incumbent_objective = report.log.incumbent_value();

    est::FullTrainConfig confirm_cfg = cfg.full;
    confirm_cfg.n_seeds = cfg.confirm.n_seeds;
    if (cfg.confirm.epochs > 0) confirm_cfg.epochs = cfg.confirm.epochs;
    confirm_cfg.workers = cfg.workers;
    confirm_cfg.master_seed = derive_seed(cfg.seed, kConfirmStream);
    report.confirmation = est::estimate_full(report.incumbent, data.train, data.val, confirm_cfg);

    emit_report(report, cfg.out_dir);
    return report;
}

est::EvaluationResult run_single_estimate(const ExperimentConfig& cfg,
                                          const space::ArchitectureSpec& spec, est::EstimatorMode mode) {
    const LoadedData data = load_dataset(cfg);
    switch (mode) {
        case est::EstimatorMode::Full: {
            est::FullTrainConfig full_cfg = cfg.full;
            full_cfg.workers = cfg.workers;
            full_cfg.master_seed = derive_seed(cfg.seed, kFullArchBase);
            return est::estimate_full(spec, data.train, data.val, full_cfg);
        }
        case est::EstimatorMode::Heuristic: {
            est::HeuristicConfig h = cfg.heuristic;
            h.workers = cfg.workers;
            h.master_seed = derive_seed(cfg.seed, kHeuristicArchBase);
            return est::estimate_heuristic(spec, data.train, data.val, h);
        }
        case est::EstimatorMode::RandomWeights: {
            est::HeuristicConfig r = cfg.random_weights;
            r.workers = cfg.workers;
            r.master_seed = derive_seed(cfg.seed, kRandomArchBase);
            return est::estimate_random_weights(spec, data.train, data.val, r);
        }
    }
    throw ConfigError("unknown estimator mode");
}

} // namespace archsel::harness
