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

#include "archsel/harness/report.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "archsel/core/csv.hpp"
#include "archsel/core/errors.hpp"

namespace archsel::harness {

namespace {

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string write_file(const std::string& dir, const std::string& name, const std::string& content) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    const std::string path = (std::filesystem::path(dir) / name).string();
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path);
    out << content;
    if (!out) throw IoError("short write to " + path);
    return path;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(field));
            field.clear();
        } else {
            field += c;
        }
    }
    fields.push_back(std::move(field));
    return fields;
}

} // namespace

std::string run_id_from(const nlohmann::json& config, std::uint64_t seed) {
    const std::string text = config.dump();
    std::uint64_t hash = 0xcbf29ce484222325ULL; // FNV-1a
    for (unsigned char c : text) {
        hash ^= c;
        hash *= 0x100000001b3ULL;
    }
    hash ^= seed + 0x9E3779B97F4A7C15ULL + (hash << 6) + (hash >> 2);
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(hash));
    return buf;
}

nlohmann::json to_json(const est::EvaluationResult& result) {
    nlohmann::json seeds = nlohmann::json::array();
    for (const est::SeedOutcome& s : result.seeds)
        seeds.push_back({{"val_error", s.val_error},
                         {"phase1_epochs", s.phase1_epochs},
                         {"phase2_epochs", s.phase2_epochs},
                         {"diverged", s.diverged}});
    return {{"architecture_id", result.architecture_id},
            {"mode", est::estimator_mode_name(result.mode)},
            {"per_seed_errors", result.per_seed_errors},
            {"seeds", seeds},
            {"best", result.best},
            {"mean", result.mean},
            {"wall_time_s", result.wall_time_seconds},
            {"diverged_count", result.diverged_count},
            {"workers", result.workers}};
}

est::EvaluationResult evaluation_result_from_json(const nlohmann::json& j) {
    try {
        est::EvaluationResult r;
        r.architecture_id = j.at("architecture_id").get<std::string>();
        r.mode = est::estimator_mode_from_name(j.at("mode").get<std::string>());
        r.per_seed_errors = j.at("per_seed_errors").get<std::vector<double>>();
        for (const auto& s : j.at("seeds"))
            r.seeds.push_back({s.at("val_error").get<double>(), s.at("phase1_epochs").get<int>(),
                               s.at("phase2_epochs").get<int>(), s.at("diverged").get<bool>()});
        r.best = j.at("best").get<double>();
        r.mean = j.at("mean").get<double>();
        r.wall_time_seconds = j.at("wall_time_s").get<double>();
        r.diverged_count = j.at("diverged_count").get<int>();
        r.workers = j.at("workers").get<int>();
        return r;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("bad evaluation result json: ") + e.what());
    }
}

std::string evaluation_result_csv_header() {
    return "arch_id,mode,best,mean,diverged_count,n_seeds,workers,wall_time_s";
}

std::string evaluation_result_csv_row(const est::EvaluationResult& r) {
    return csv_escape(r.architecture_id) + "," + est::estimator_mode_name(r.mode) + "," +
           format_double(r.best) + "," + format_double(r.mean) + "," +
           std::to_string(r.diverged_count) + "," + std::to_string(r.per_seed_errors.size()) + "," +
           std::to_string(r.workers) + "," + format_double(r.wall_time_seconds);
}

nlohmann::json to_json(const CorrelationReport& report) {
    nlohmann::json rows = nlohmann::json::array();
    for (const ArchRow& row : report.rows)
        rows.push_back({{"arch_id", row.arch_id},
                        {"spec", space::to_json(row.spec)},
                        {"full", to_json(row.full)},
                        {"heuristic", to_json(row.heuristic)}});
    return {{"kind", "correlation"},
            {"run_id", report.run_id},
            {"dataset", report.dataset_name},
            {"seed", report.seed},
            {"n_architectures", report.n_architectures()},
            {"corr_mean_best", report.corr_mean_best},
            {"corr_best_best", report.corr_best_best},
            {"chance_error", report.chance_error},
            {"high_noise", report.high_noise},
            {"rows", rows}};
}

CorrelationReport correlation_report_from_json(const nlohmann::json& j) {
    try {
        CorrelationReport r;
        r.run_id = j.at("run_id").get<std::string>();
        r.dataset_name = j.at("dataset").get<std::string>();
        r.seed = j.at("seed").get<std::uint64_t>();
        r.corr_mean_best = j.at("corr_mean_best").get<double>();
        r.corr_best_best = j.at("corr_best_best").get<double>();
        r.chance_error = j.at("chance_error").get<double>();
        r.high_noise = j.at("high_noise").get<bool>();
        for (const auto& row : j.at("rows"))
            r.rows.push_back({row.at("arch_id").get<std::string>(),
                              space::architecture_from_json(row.at("spec")),
                              evaluation_result_from_json(row.at("full")),
                              evaluation_result_from_json(row.at("heuristic"))});
        return r;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("bad correlation report json: ") + e.what());
    }
}

nlohmann::json to_json(const TimingReport& report) {
    nlohmann::json rows = nlohmann::json::array();
    for (const TimingRow& row : report.rows)
        rows.push_back({{"arch_id", row.arch_id},
                        {"spec", space::to_json(row.spec)},
                        {"full_1seed_wall_time_s", row.full_1seed_wall_time_s},
                        {"heuristic_wall_time_s", row.heuristic_wall_time_s},
                        {"random_weights_wall_time_s", row.random_weights_wall_time_s}});
    return {{"kind", "timing"},
            {"run_id", report.run_id},
            {"dataset", report.dataset_name},
            {"seed", report.seed},
            {"ratio_heuristic", report.ratio_heuristic},
            {"ratio_random_weights", report.ratio_random_weights},
            {"rows", rows}};
}

TimingReport timing_report_from_json(const nlohmann::json& j) {
    try {
        TimingReport r;
        r.run_id = j.at("run_id").get<std::string>();
        r.dataset_name = j.at("dataset").get<std::string>();
        r.seed = j.at("seed").get<std::uint64_t>();
        r.ratio_heuristic = j.at("ratio_heuristic").get<double>();
        r.ratio_random_weights = j.at("ratio_random_weights").get<double>();
        for (const auto& row : j.at("rows"))
            r.rows.push_back({row.at("arch_id").get<std::string>(),
                              space::architecture_from_json(row.at("spec")),
                              row.at("full_1seed_wall_time_s").get<double>(),
                              row.at("heuristic_wall_time_s").get<double>(),
                              row.at("random_weights_wall_time_s").get<double>()});
        return r;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("bad timing report json: ") + e.what());
    }
}

nlohmann::json to_json(const SearchReport& report) {
    return {{"kind", "search"},
            {"run_id", report.run_id},
            {"dataset", report.dataset_name},
            {"seed", report.seed},
            {"dim", report.dim},
            {"log", bo::observation_log_json(report.log)},
            {"incumbent", space::to_json(report.incumbent)},
            {"incumbent_id", report.incumbent_id},
            {"incumbent_objective", report.incumbent_objective},
            {"confirmation", to_json(report.confirmation)},
            {"total_wall_time_s", report.total_wall_seconds}};
}

SearchReport search_report_from_json(const nlohmann::json& j) {
    try {
        SearchReport r;
        r.run_id = j.at("run_id").get<std::string>();
        r.dataset_name = j.at("dataset").get<std::string>();
        r.seed = j.at("seed").get<std::uint64_t>();
        r.dim = j.at("dim").get<int>();
        r.log = bo::observation_log_from_json(j.at("log"));
        r.incumbent = space::architecture_from_json(j.at("incumbent"));
        r.incumbent_id = j.at("incumbent_id").get<std::string>();
        r.incumbent_objective = j.at("incumbent_objective").get<double>();
        r.confirmation = evaluation_result_from_json(j.at("confirmation"));
        r.total_wall_seconds = j.at("total_wall_time_s").get<double>();
        return r;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("bad search report json: ") + e.what());
    }
}

std::vector<std::string> emit_report(const CorrelationReport& report, const std::string& dir) {
    std::string csv =
        "arch_id,full_mean,full_best,full_diverged,full_wall_time_s,"
        "heuristic_mean,heuristic_best,heuristic_diverged,heuristic_wall_time_s\n";
    std::string scatter = "arch_id,full_mean,full_best,heuristic_best,heuristic_mean\n";
    for (const ArchRow& row : report.rows) {
        csv += csv_escape(row.arch_id) + "," + format_double(row.full.mean) + "," +
               format_double(row.full.best) + "," + std::to_string(row.full.diverged_count) + "," +
               format_double(row.full.wall_time_seconds) + "," + format_double(row.heuristic.mean) +
               "," + format_double(row.heuristic.best) + "," +
               std::to_string(row.heuristic.diverged_count) + "," +
               format_double(row.heuristic.wall_time_seconds) + "\n";
        scatter += csv_escape(row.arch_id) + "," + format_double(row.full.mean) + "," +
                   format_double(row.full.best) + "," + format_double(row.heuristic.best) + "," +
                   format_double(row.heuristic.mean) + "\n";
    }
    const std::string base = "correlation_" + report.run_id;
    return {write_file(dir, base + ".csv", csv),
            write_file(dir, base + ".json", to_json(report).dump(2) + "\n"),
            write_file(dir, base + "_scatter.csv", scatter)};
}

std::vector<std::string> emit_report(const TimingReport& report, const std::string& dir) {
    std::string csv = "arch_id,full_1seed_wall_time_s,heuristic_wall_time_s,random_weights_wall_time_s\n";
    for (const TimingRow& row : report.rows)
        csv += csv_escape(row.arch_id) + "," + format_double(row.full_1seed_wall_time_s) + "," +
               format_double(row.heuristic_wall_time_s) + "," +
               format_double(row.random_weights_wall_time_s) + "\n";
    const std::string base = "timing_" + report.run_id;
    return {write_file(dir, base + ".csv", csv),
            write_file(dir, base + ".json", to_json(report).dump(2) + "\n")};
}

std::vector<std::string> emit_report(const SearchReport& report, const std::string& dir) {
    const std::string base = "search_" + report.run_id;
    return {write_file(dir, base + ".csv", bo::observation_log_csv(report.log)),
            write_file(dir, base + ".json", to_json(report).dump(2) + "\n")};
}

std::vector<std::string> emit_report_json(const nlohmann::json& report, const std::string& dir) {
    const std::string kind = report.value("kind", "");
    if (kind == "correlation") return emit_report(correlation_report_from_json(report), dir);
    if (kind == "timing") return emit_report(timing_report_from_json(report), dir);
    if (kind == "search") return emit_report(search_report_from_json(report), dir);
    throw ConfigError("report json has unknown kind '" + kind + "'");
}

std::string csv_escape(const std::string& field) { return archsel::csv_escape(field); }

std::string csv_without_time_columns(const std::string& csv) {
    std::istringstream in(csv);
    std::string line;
    std::vector<std::size_t> keep;
    std::string out;
    bool header = true;
    const std::string suffix = "wall_time_s";
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::vector<std::string> fields = split_csv_line(line);
        if (header) {
            for (std::size_t i = 0; i < fields.size(); ++i) {
                const std::string& name = fields[i];
                const bool is_time = name.size() >= suffix.size() &&
                                     name.compare(name.size() - suffix.size(), suffix.size(), suffix) == 0;
                if (!is_time) keep.push_back(i);
            }
            header = false;
        }
        std::string row;
        for (std::size_t k = 0; k < keep.size(); ++k) {
            if (k) row += ",";
            if (keep[k] < fields.size()) row += csv_escape(fields[keep[k]]);
        }
        out += row + "\n";
    }
    return out;
}

nlohmann::json json_without_time_fields(nlohmann::json j) {
    static const std::string suffix = "wall_time_s";
    if (j.is_object()) {
        for (auto it = j.begin(); it != j.end(); ++it) {
            const std::string& key = it.key();
            const bool is_time = key.size() >= suffix.size() &&
                                 key.compare(key.size() - suffix.size(), suffix.size(), suffix) == 0;
            if (is_time)
                it.value() = 0.0;
            else
                it.value() = json_without_time_fields(it.value());
        }
    } else if (j.is_array()) {
        for (auto& element : j) element = json_without_time_fields(element);
    }
    return j;
}

} // namespace archsel::harness
