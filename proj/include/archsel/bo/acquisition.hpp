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

#ifndef ARCHSEL_BO_ACQUISITION_HPP
#define ARCHSEL_BO_ACQUISITION_HPP

#include <cstdint>

#include "archsel/bo/gp.hpp"

namespace archsel::bo {

/// Expected improvement below f_min for a minimization objective:
///   EI = (f_min - mu) * Phi(z) + sigma * phi(z),  z = (f_min - mu) / sigma.
/// Zero variance yields EI = 0 regardless of mu, so interpolated points are
/// never re-proposed.
double expected_improvement(double mu, double var, double f_min);

struct ProposalBudget {
    int candidates = 1024;  // shifted-Halton candidates over the unit cube
    int refine_from = 4;    // how many top candidates get local refinement
    int refine_rounds = 20; // step-halving rounds per refined candidate
};

/// EI maximizer: scores a seeded low-discrepancy candidate set, then runs
/// coordinate-wise step-halving refinement from the best few. Deterministic
/// given the seed; exact EI ties keep the earliest candidate.
Eigen::VectorXd propose_next(const GpModel& model, double f_min, std::uint64_t seed,
                             const ProposalBudget& budget = {});

} // namespace archsel::bo

#endif
