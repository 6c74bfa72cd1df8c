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

#include "archsel/bo/acquisition.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <numbers>
#include <vector>

#include "archsel/core/errors.hpp"
#include "archsel/core/rng.hpp"

namespace archsel::bo {

namespace {

double normal_pdf(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi); }

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

constexpr int kHaltonPrimes[] = {2,  3,  5,  7,  11, 13, 17, 19, 23, 29, 31,  37,  41,  43,  47,  53,
                                 59, 61, 67, 71, 73, 79, 83, 89, 97, 101, 103, 107, 109, 113, 127, 131};

double radical_inverse(int base, std::uint64_t index) {
    double inv_base = 1.0 / base;
    double factor = inv_base;
    double value = 0.0;
    while (index > 0) {
        value += static_cast<double>(index % static_cast<std::uint64_t>(base)) * factor;
        index /= static_cast<std::uint64_t>(base);
        factor *= inv_base;
    }
    return value;
}

/// Randomly shifted Halton sequence: low-discrepancy, deterministic per seed,
/// and distinct across seeds.
Eigen::MatrixXd halton_candidates(int count, int dim, std::uint64_t seed) {
    Xoshiro256ss rng(seed);
    Eigen::VectorXd shift(dim);
    for (int j = 0; j < dim; ++j) shift[j] = rng.next_double();
    Eigen::MatrixXd points(count, dim);
    for (int i = 0; i < count; ++i) {
        for (int j = 0; j < dim; ++j) {
            const int base =
                kHaltonPrimes[j < static_cast<int>(std::size(kHaltonPrimes)) ? j
                                                                             : j % static_cast<int>(std::size(kHaltonPrimes))];
            double v = radical_inverse(base, static_cast<std::uint64_t>(i) + 1) + shift[j];
            points(i, j) = v - std::floor(v);
        }
    }
    return points;
}

} // namespace

double expected_improvement(double mu, double var, double f_min) {
    if (!(var > 0.0)) return 0.0;
    const double sigma = std::sqrt(var);
    const double z = (f_min - mu) / sigma;
    const double ei = (f_min - mu) * normal_cdf(z) + sigma * normal_pdf(z);
    return ei > 0.0 ? ei : 0.0;
}

Eigen::VectorXd propose_next(const GpModel& model, double f_min, std::uint64_t seed,
                             const ProposalBudget& budget) {
    if (model.n() < 1) throw ConfigError("propose_next: model has no observations");
    const int dim = model.dim();
    const int count = std::max(1, budget.candidates);

    Eigen::MatrixXd candidates = halton_candidates(count, dim, derive_seed(seed, 0xACC0ULL));
    std::vector<double> scores(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        const GpPrediction p = gp_predict(model, candidates.row(i).transpose());
        scores[static_cast<std::size_t>(i)] = expected_improvement(p.mean, p.variance, f_min);
    }

    // best candidates first; stable order keeps ties at the earlier index
    std::vector<int> order(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) order[static_cast<std::size_t>(i)] = i;
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return scores[static_cast<std::size_t>(a)] > scores[static_cast<std::size_t>(b)];
    });

    Eigen::VectorXd best_x = candidates.row(order[0]).transpose();
    double best_ei = scores[static_cast<std::size_t>(order[0])];

    const int refine_count = std::min(budget.refine_from, count);
    for (int r = 0; r < refine_count; ++r) {
        Eigen::VectorXd x = candidates.row(order[static_cast<std::size_t>(r)]).transpose();
        double ei = scores[static_cast<std::size_t>(order[static_cast<std::size_t>(r)])];
        double step = 0.25;
        for (int round = 0; round < budget.refine_rounds; ++round) {
            for (int j = 0; j < dim; ++j) {
                const double original = x[j];
                double best_coord = original;
                for (const double candidate :
                     {std::clamp(original + step, 0.0, 1.0), std::clamp(original - step, 0.0, 1.0)}) {
                    if (candidate == original) continue;
                    x[j] = candidate;
                    const GpPrediction p = gp_predict(model, x);
                    const double value = expected_improvement(p.mean, p.variance, f_min);
                    if (value > ei) {
                        ei = value;
                        best_coord = candidate;
                    }
                }
                x[j] = best_coord;
            }
            step *= 0.5;
        }
        if (ei > best_ei) {
            best_ei = ei;
            best_x = x;
        }
    }
    return best_x;
}

} // namespace archsel::bo
