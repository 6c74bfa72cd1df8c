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

#ifndef ARCHSEL_BO_LHS_HPP
#define ARCHSEL_BO_LHS_HPP

#include <Eigen/Core>

#include <cstdint>

namespace archsel::bo {

/// Latin hypercube design: an n x d matrix in [0,1) where every dimension
/// places exactly one point in each of the n equal-width bins. Per dimension,
/// a seeded permutation of the bins plus a uniform jitter inside each bin.
Eigen::MatrixXd lhs_sample(int n, int d, std::uint64_t seed);

} // namespace archsel::bo

#endif
