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

#ifndef ARCHSEL_HARNESS_STATS_HPP
#define ARCHSEL_HARNESS_STATS_HPP

#include <span>

namespace archsel::harness {

/// Sample Pearson correlation. Throws DegenerateInputError for mismatched
/// lengths, fewer than 3 pairs, or a constant sequence (the coefficient is
/// undefined there, not 0).
double pearson(std::span<const double> xs, std::span<const double> ys);

} // namespace archsel::harness

#endif
