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

#ifndef ARCHSEL_CORE_TIMING_HPP
#define ARCHSEL_CORE_TIMING_HPP

#include <chrono>
#include <type_traits>
#include <utility>

namespace archsel {

/// Wall-clock (monotonic) duration of a callable, in seconds.
/// Returns (result, seconds) for non-void callables, seconds otherwise.
template <typename F>
auto measure_time(F&& f) {
    using R = std::invoke_result_t<F&>;
    const auto t0 = std::chrono::steady_clock::now();
    if constexpr (std::is_void_v<R>) {
        f();
        const auto t1 = std::chrono::steady_clock::now();
        double s = std::chrono::duration<double>(t1 - t0).count();
        return s > 0.0 ? s : 1e-9;
    } else {
        R result = f();
        const auto t1 = std::chrono::steady_clock::now();
        double s = std::chrono::duration<double>(t1 - t0).count();
        return std::pair<R, double>(std::move(result), s > 0.0 ? s : 1e-9);
    }
}

} // namespace archsel

#endif
