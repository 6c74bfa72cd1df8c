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

#ifndef ARCHSEL_HARNESS_REPORT_HPP
#define ARCHSEL_HARNESS_REPORT_HPP

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "archsel/bo/loop.hpp"
#include "archsel/est/estimators.hpp"
#include "archsel/space/search_space.hpp"

namespace archsel::harness {

/// Deterministic 16-hex-digit run identifier from the canonical config and
/// the master seed. Reruns of the same experiment overwrite their own files.
std::string run_id_from(const nlohmann::json& config, std::uint64_t seed);

nlohmann::json to_json(const est::EvaluationResult& result);
est::EvaluationResult evaluation_result_from_json(const nlohmann::json& j);
std::string evaluation_result_csv_header();
std::string evaluation_result_csv_row(const est::EvaluationResult& result);

struct ArchRow {
    std::string arch_id;
    space::ArchitectureSpec spec;
    est::EvaluationResult full;
    est::EvaluationResult heuristic;
};

struct CorrelationReport {
    std::string run_id;
    std::string dataset_name;
    std::uint64_t seed = 0;
    std::vector<ArchRow> rows;
    double corr_mean_best = 0.0; // pearson(full means, heuristic bests)
    double corr_best_best = 0.0; // pearson(full bests, heuristic bests)
    double chance_error = 0.0;
    bool high_noise = false; // every aggregate within 0.02 of chance

    int n_architectures() const { return static_cast<int>(rows.size()); }
};

struct TimingRow {
    std::string arch_id;
    space::ArchitectureSpec spec;
    double full_1seed_wall_time_s = 0.0;
    double heuristic_wall_time_s = 0.0;
    double random_weights_wall_time_s = 0.0;
};

struct TimingReport {
    std::string run_id;
    std::string dataset_name;
    std::uint64_t seed = 0;
    std::vector<TimingRow> rows;
    double ratio_heuristic = 0.0;      // mean heuristic time / mean 1-seed full time
    double ratio_random_weights = 0.0; // mean random-weights time / mean 1-seed full time
};

struct SearchReport {
    std::string run_id;
    std::string dataset_name;
    std::uint64_t seed = 0;
    int dim = 0;
    bo::ObservationLog log;
    space::ArchitectureSpec incumbent;
    std::string incumbent_id;
    double incumbent_objective = 0.0;
    est::EvaluationResult confirmation; // 5 full trainings of the incumbent
    double total_wall_seconds = 0.0;
};

nlohmann::json to_json(const CorrelationReport& report);
CorrelationReport correlation_report_from_json(const nlohmann::json& j);
nlohmann::json to_json(const TimingReport& report);
TimingReport timing_report_from_json(const nlohmann::json& j);
nlohmann::json to_json(const SearchReport& report);
SearchReport search_report_from_json(const nlohmann::json& j);

/// Writes <kind>_<run_id>.csv/.json (plus the plot-ready scatter CSV for
/// correlation reports) into dir; returns the paths written.
std::vector<std::string> emit_report(const CorrelationReport& report, const std::string& dir);
std::vector<std::string> emit_report(const TimingReport& report, const std::string& dir);
std::vector<std::string> emit_report(const SearchReport& report, const std::string& dir);

/// Re-emits the files of a stored report JSON (dispatches on its "kind").
std::vector<std::string> emit_report_json(const nlohmann::json& report, const std::string& dir);

/// RFC-4180-style quoting: fields with commas, quotes or newlines are quoted,
/// embedded quotes doubled.
std::string csv_escape(const std::string& field);

/// Helpers for reproducibility checks: the same report minus wall-time data.
/// CSV columns whose header ends in "wall_time_s" are dropped; JSON keys
/// carrying wall times are zeroed.
std::string csv_without_time_columns(const std::string& csv);
nlohmann::json json_without_time_fields(nlohmann::json j);

} // namespace archsel::harness

#endif
