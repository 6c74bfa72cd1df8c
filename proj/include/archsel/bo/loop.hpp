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

#ifndef ARCHSEL_BO_LOOP_HPP
#define ARCHSEL_BO_LOOP_HPP

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "archsel/bo/acquisition.hpp"
#include "archsel/bo/gp.hpp"

namespace archsel::bo {

enum class Phase { Init, Infill };

struct BoConfig {
    int n_init = 10;
    int n_iter = 20;
    std::uint64_t seed = 0;
    KernelKind kernel = KernelKind::Matern52;
    ProposalBudget proposal;
    int max_resamples = 16; // uniform resamples before an infeasible point scores 1.0
    int gp_starts = 8;
};

struct Observation {
    Eigen::VectorXd x;
    std::string spec_id;
    double value = 0.0;
    double wall_seconds = 0.0;
    Phase phase = Phase::Init;
    bool infeasible = false; // resampling gave up; scored 1.0 without evaluation
};

struct ObservationLog {
    std::vector<Observation> entries;
    int incumbent_index = -1;

    double incumbent_value() const { return entries[static_cast<std::size_t>(incumbent_index)].value; }
    const Eigen::VectorXd& incumbent_point() const {
        return entries[static_cast<std::size_t>(incumbent_index)].x;
    }
};

/// A minimization problem over the unit cube. `objective` is only invoked on
/// points accepted by `feasible`; `label` (optional) tags log entries with a
/// readable identifier of the decoded candidate.
struct BoProblem {
    int dim = 0;
    std::function<double(const Eigen::VectorXd&)> objective;
    std::function<bool(const Eigen::VectorXd&)> feasible;           // default: everything
    std::function<std::string(const Eigen::VectorXd&)> label;       // default: empty
};

/// Latin-hypercube initial design followed by n_iter rounds of
/// {fit surrogate on all observations, maximize EI, evaluate}. Infeasible
/// points are resampled uniformly up to max_resamples times within their
/// phase, then logged with value 1.0, keeping the evaluation budget exact:
/// the log always holds n_init + n_iter entries.
ObservationLog bo_loop(const BoProblem& problem, const BoConfig& cfg);

/// One row per evaluation: phase, vector components, spec id, objective,
/// cumulative best, wall time.
std::string observation_log_csv(const ObservationLog& log);
nlohmann::json observation_log_json(const ObservationLog& log);
ObservationLog observation_log_from_json(const nlohmann::json& j);

} // namespace archsel::bo

#endif
