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

#include "archsel/bo/loop.hpp"

#include <cmath>
#include <cstdio>
#include <limits>

#include "archsel/bo/lhs.hpp"
#include "archsel/core/csv.hpp"
#include "archsel/core/errors.hpp"
#include "archsel/core/rng.hpp"
#include "archsel/core/timing.hpp"

namespace archsel::bo {

namespace {

constexpr std::uint64_t kLhsStream = 0x14A5ULL;
constexpr std::uint64_t kResampleStream = 0x2E5AULL;
constexpr std::uint64_t kProposalStreamBase = 1000;

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

} // namespace

ObservationLog bo_loop(const BoProblem& problem, const BoConfig& cfg) {
    if (problem.dim < 1) throw ConfigError("bo_loop: problem dimension must be >= 1");
    if (!problem.objective) throw ConfigError("bo_loop: objective not set");
    if (cfg.n_init < problem.dim + 1)
        throw ConfigError("bo_loop: n_init must be >= dim + 1 (= " + std::to_string(problem.dim + 1) + ")");
    if (cfg.n_iter < 0) throw ConfigError("bo_loop: n_iter must be >= 0");

    const auto feasible = [&](const Eigen::VectorXd& x) {
        return problem.feasible ? problem.feasible(x) : true;
    };

    Xoshiro256ss resample_rng(derive_seed(cfg.seed, kResampleStream));
    ObservationLog log;
    log.entries.reserve(static_cast<std::size_t>(cfg.n_init + cfg.n_iter));

    auto evaluate_point = [&](Eigen::VectorXd x, Phase phase) {
        Observation obs;
        obs.phase = phase;
        int attempts = 0;
        while (!feasible(x) && attempts < cfg.max_resamples) {
            for (int j = 0; j < problem.dim; ++j) x[j] = resample_rng.next_double();
            ++attempts;
        }
        obs.x = std::move(x);
        if (!feasible(obs.x)) {
            obs.infeasible = true;
            obs.value = 1.0;
            obs.wall_seconds = 0.0;
        } else {
            auto [value, seconds] = measure_time([&] { return problem.objective(obs.x); });
            if (!std::isfinite(value)) {
                obs.infeasible = true;
                obs.value = 1.0;
            } else {
                obs.value = value;
            }
            obs.wall_seconds = seconds;
        }
        if (problem.label && !obs.infeasible) obs.spec_id = problem.label(obs.x);
        log.entries.push_back(std::move(obs));
        const int idx = static_cast<int>(log.entries.size()) - 1;
        if (log.incumbent_index < 0 || log.entries.back().value < log.incumbent_value())
            log.incumbent_index = idx;
    };

    const Eigen::MatrixXd design = lhs_sample(cfg.n_init, problem.dim, derive_seed(cfg.seed, kLhsStream));
    for (int i = 0; i < cfg.n_init; ++i) evaluate_point(design.row(i).transpose(), Phase::Init);

    for (int iter = 0; iter < cfg.n_iter; ++iter) {
        const int n = static_cast<int>(log.entries.size());
        Eigen::MatrixXd x(n, problem.dim);
        Eigen::VectorXd y(n);
        for (int i = 0; i < n; ++i) {
            x.row(i) = log.entries[static_cast<std::size_t>(i)].x.transpose();
            y[i] = log.entries[static_cast<std::size_t>(i)].value;
        }
        GpFitOptions fit;
        fit.starts = cfg.gp_starts;
        GpModel model = gp_fit(x, y, cfg.kernel, fit);
        Eigen::VectorXd proposal =
            propose_next(model, log.incumbent_value(),
                         derive_seed(cfg.seed, kProposalStreamBase + static_cast<std::uint64_t>(iter)),
                         cfg.proposal);
        evaluate_point(std::move(proposal), Phase::Infill);
    }
    return log;
}

std::string observation_log_csv(const ObservationLog& log) {
    std::string out = "phase";
    const int dim = log.entries.empty() ? 0 : static_cast<int>(log.entries.front().x.size());
    for (int j = 0; j < dim; ++j) out += ",x" + std::to_string(j);
    out += ",spec_id,objective,cumulative_best,wall_time_s\n";
    double best = std::numeric_limits<double>::infinity();
    for (const Observation& obs : log.entries) {
        best = std::min(best, obs.value);
        out += obs.phase == Phase::Init ? "init" : "infill";
        for (int j = 0; j < dim; ++j) out += "," + format_double(obs.x[j]);
        out += "," + csv_escape(obs.spec_id);
        out += "," + format_double(obs.value);
        out += "," + format_double(best);
        out += "," + format_double(obs.wall_seconds);
        out += "\n";
    }
    return out;
}

nlohmann::json observation_log_json(const ObservationLog& log) {
    nlohmann::json entries = nlohmann::json::array();
    for (const Observation& obs : log.entries) {
        std::vector<double> x(obs.x.data(), obs.x.data() + obs.x.size());
        entries.push_back({{"x", x},
                           {"spec_id", obs.spec_id},
                           {"objective", obs.value},
                           {"wall_time_s", obs.wall_seconds},
                           {"phase", obs.phase == Phase::Init ? "init" : "infill"},
                           {"infeasible", obs.infeasible}});
    }
    return {{"entries", entries}, {"incumbent_index", log.incumbent_index}};
}

ObservationLog observation_log_from_json(const nlohmann::json& j) {
    try {
        ObservationLog log;
        for (const auto& e : j.at("entries")) {
            Observation obs;
            const auto x = e.at("x").get<std::vector<double>>();
            obs.x = Eigen::Map<const Eigen::VectorXd>(x.data(), static_cast<Eigen::Index>(x.size()));
            obs.spec_id = e.at("spec_id").get<std::string>();
            obs.value = e.at("objective").get<double>();
            obs.wall_seconds = e.at("wall_time_s").get<double>();
            obs.phase = e.at("phase").get<std::string>() == "init" ? Phase::Init : Phase::Infill;
            obs.infeasible = e.at("infeasible").get<bool>();
            log.entries.push_back(std::move(obs));
        }
        log.incumbent_index = j.at("incumbent_index").get<int>();
        return log;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("bad observation log json: ") + e.what());
    }
}

} // namespace archsel::bo
