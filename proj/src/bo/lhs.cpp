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

#include "archsel/bo/lhs.hpp"

#include "archsel/core/errors.hpp"
#include "archsel/core/rng.hpp"

namespace archsel::bo {

Eigen::MatrixXd lhs_sample(int n, int d, std::uint64_t seed) {
    if (n < 1 || d < 1) throw ConfigError("lhs_sample needs n >= 1 and d >= 1");
    Eigen::MatrixXd points(n, d);
    for (int j = 0; j < d; ++j) {
        Xoshiro256ss rng(derive_seed(seed, static_cast<std::uint64_t>(j)));
        std::vector<int> bins = random_permutation(n, rng);
        for (int i = 0; i < n; ++i)
            points(i, j) = (static_cast<double>(bins[static_cast<std::size_t>(i)]) + rng.next_double()) /
                           static_cast<double>(n);
    }
    return points;
}

} // namespace archsel::bo
