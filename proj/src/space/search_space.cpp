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

#include "archsel/space/search_space.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <unordered_map>

#include "archsel/core/errors.hpp"

namespace archsel::space {

namespace {

constexpr double kContinuousRoundTripTol = 1e-9;

struct DecodedValue {
    ParamKind kind;
    long integer = 0;
    double real = 0.0;
    std::string category;
};

DecodedValue decode_param(const ParamDef& def, double v) {
    DecodedValue out;
    out.kind = def.kind;
    switch (def.kind) {
        case ParamKind::Integer: {
            const long lo = static_cast<long>(def.lo), hi = static_cast<long>(def.hi);
            long value = lo + static_cast<long>(std::floor(v * static_cast<double>(hi - lo + 1)));
            out.integer = std::clamp(value, lo, hi);
            break;
        }
        case ParamKind::Categorical: {
            const long len = static_cast<long>(def.values.size());
            long idx = static_cast<long>(std::floor(v * static_cast<double>(len)));
            idx = std::clamp(idx, 0L, len - 1);
            out.integer = idx;
            out.category = def.values[static_cast<std::size_t>(idx)];
            break;
        }
        case ParamKind::Continuous: {
            if (def.log10_scale) {
                const double llo = std::log10(def.lo), lhi = std::log10(def.hi);
                out.real = std::pow(10.0, llo + v * (lhi - llo));
            } else {
                out.real = def.lo + v * (def.hi - def.lo);
            }
            break;
        }
    }
    return out;
}

double encode_param(const ParamDef& def, const DecodedValue& value) {
    switch (def.kind) {
        case ParamKind::Integer: {
            const long lo = static_cast<long>(def.lo), hi = static_cast<long>(def.hi);
            if (value.integer < lo || value.integer > hi)
                throw NotRepresentableError("value " + std::to_string(value.integer) + " outside [" +
                                            std::to_string(lo) + "," + std::to_string(hi) + "] for " + def.name);
            return (static_cast<double>(value.integer - lo) + 0.5) / static_cast<double>(hi - lo + 1);
        }
        case ParamKind::Categorical: {
            auto it = std::find(def.values.begin(), def.values.end(), value.category);
            if (it == def.values.end())
                throw NotRepresentableError("category '" + value.category + "' not in " + def.name);
            const double idx = static_cast<double>(it - def.values.begin());
            return (idx + 0.5) / static_cast<double>(def.values.size());
        }
        case ParamKind::Continuous: {
            const double x = value.real;
            const double tol = kContinuousRoundTripTol * std::max({std::abs(def.lo), std::abs(def.hi), 1.0});
            if (x < def.lo - tol || x > def.hi + tol)
                throw NotRepresentableError("value " + std::to_string(x) + " outside continuous range of " +
                                            def.name);
            double v;
            if (def.log10_scale)
                v = (std::log10(x) - std::log10(def.lo)) / (std::log10(def.hi) - std::log10(def.lo));
            else
                v = (x - def.lo) / (def.hi - def.lo);
            return std::clamp(v, 0.0, 1.0);
        }
    }
    throw NotRepresentableError("unknown parameter kind");
}

/// Name-indexed view of a decoded vector.
class DecodedParams {
public:
    DecodedParams(const SearchSpace& space, const ParamVector& v) {
        for (int i = 0; i < space.dim(); ++i) {
            const ParamDef& def = space.params[static_cast<std::size_t>(i)];
            values_.emplace(def.name, decode_param(def, v[i]));
        }
    }

    bool has(const std::string& name) const { return values_.count(name) > 0; }

    long get_int(const std::string& name) const {
        const DecodedValue& v = require(name);
        if (v.kind == ParamKind::Integer) return v.integer;
        if (v.kind == ParamKind::Categorical) return parse_long(v.category, name);
        throw ConfigError("parameter '" + name + "' is continuous, expected integer/categorical");
    }

    long get_int_or(const std::string& name, long fallback) const {
        return has(name) ? get_int(name) : fallback;
    }

    bool get_bool_or(const std::string& name, bool fallback) const {
        if (!has(name)) return fallback;
        const DecodedValue& v = require(name);
        if (v.kind == ParamKind::Categorical) {
            if (v.category == "true") return true;
            if (v.category == "false") return false;
            throw ConfigError("parameter '" + name + "' must use categories true/false");
        }
        if (v.kind == ParamKind::Integer) return v.integer != 0;
        throw ConfigError("parameter '" + name + "' is continuous, expected boolean categories");
    }

    double get_real_or(const std::string& name, double fallback) const {
        if (!has(name)) return fallback;
        const DecodedValue& v = require(name);
        if (v.kind != ParamKind::Continuous)
            throw ConfigError("parameter '" + name + "' is not continuous");
        return v.real;
    }

    std::string get_category_or(const std::string& name, const std::string& fallback) const {
        if (!has(name)) return fallback;
        const DecodedValue& v = require(name);
        if (v.kind != ParamKind::Categorical)
            throw ConfigError("parameter '" + name + "' is not categorical");
        return v.category;
    }

private:
    const DecodedValue& require(const std::string& name) const {
        auto it = values_.find(name);
        if (it == values_.end()) throw ConfigError("search space has no parameter '" + name + "'");
        return it->second;
    }

    static long parse_long(const std::string& s, const std::string& name) {
        try {
            std::size_t pos = 0;
            long v = std::stol(s, &pos);
            if (pos != s.size()) throw std::invalid_argument(s);
            return v;
        } catch (const std::exception&) {
            throw ConfigError("category '" + s + "' of parameter '" + name + "' is not an integer");
        }
    }

    std::unordered_map<std::string, DecodedValue> values_;
};

std::string block_param(const char* prefix, int block_1based, const char* suffix) {
    return std::string(prefix) + std::to_string(block_1based) + suffix;
}

} // namespace

const ParamDef* SearchSpace::find(const std::string& name) const {
    for (const ParamDef& p : params)
        if (p.name == name) return &p;
    return nullptr;
}

ArchitectureSpec decode(const SearchSpace& space, const ParamVector& v) {
    if (v.size() != space.dim())
        throw ConfigError("parameter vector has dimension " + std::to_string(v.size()) + ", space has " +
                          std::to_string(space.dim()));
    DecodedParams p(space, v);

    ArchitectureSpec spec;
    long max_blocks = 0;
    while (p.has(block_param("conv", static_cast<int>(max_blocks) + 1, "_channels"))) ++max_blocks;
    const long n_conv = p.get_int_or("n_conv", max_blocks);
    if (n_conv < 1) throw ConfigError("search space must yield at least one conv block");
    for (long b = 1; b <= n_conv; ++b) {
        ConvBlock block;
        const std::string channels_name = block_param("conv", static_cast<int>(b), "_channels");
        if (!p.has(channels_name)) throw ConfigError("search space missing '" + channels_name + "'");
        block.out_channels = static_cast<int>(p.get_int(channels_name));
        block.kernel_size = static_cast<int>(
            p.has(block_param("conv", static_cast<int>(b), "_kernel"))
                ? p.get_int(block_param("conv", static_cast<int>(b), "_kernel"))
                : p.get_int_or("kernel", 3));
        block.pool = p.has(block_param("conv", static_cast<int>(b), "_pool"))
                         ? p.get_bool_or(block_param("conv", static_cast<int>(b), "_pool"), true)
                         : p.get_bool_or("pool", true);
        spec.conv_blocks.push_back(block);
    }

    const long n_fc = p.get_int_or("n_fc", 0);
    for (long f = 1; f <= n_fc; ++f) {
        const std::string units_name = block_param("fc", static_cast<int>(f), "_units");
        if (!p.has(units_name)) throw ConfigError("search space missing '" + units_name + "'");
        spec.fc_layers.push_back(static_cast<int>(p.get_int(units_name)));
    }

    const std::string nl = p.get_category_or("nonlinearity", "relu");
    if (nl == "relu")
        spec.nonlinearity = Nonlinearity::Relu;
    else if (nl == "tanh")
        spec.nonlinearity = Nonlinearity::Tanh;
    else
        throw ConfigError("nonlinearity category '" + nl + "' must be relu or tanh");

    spec.learning_rate = p.get_real_or("learning_rate", 0.01);
    spec.momentum = p.get_real_or("momentum", 0.9);

    validate(spec, space.input_channels, space.input_height, space.input_width, space.num_classes);
    return spec;
}

ParamVector encode(const SearchSpace& space, const ArchitectureSpec& spec) {
    ParamVector v = ParamVector::Zero(space.dim());
    const long n_conv = static_cast<long>(spec.conv_blocks.size());
    const long n_fc = static_cast<long>(spec.fc_layers.size());
    for (int i = 0; i < space.dim(); ++i) {
        const ParamDef& def = space.params[static_cast<std::size_t>(i)];
        DecodedValue value;
        value.kind = def.kind;
        const std::string& name = def.name;
        bool used = true;
        if (name == "n_conv") {
            value.integer = n_conv;
        } else if (name == "n_fc") {
            value.integer = n_fc;
        } else if (name == "nonlinearity") {
            value.category = spec.nonlinearity == Nonlinearity::Relu ? "relu" : "tanh";
        } else if (name == "learning_rate") {
            value.real = spec.learning_rate;
        } else if (name == "momentum") {
            value.real = spec.momentum;
        } else if (name == "kernel") {
            value.category = std::to_string(spec.conv_blocks.empty() ? 3 : spec.conv_blocks[0].kernel_size);
            value.integer = spec.conv_blocks.empty() ? 3 : spec.conv_blocks[0].kernel_size;
        } else if (name == "pool") {
            value.category = !spec.conv_blocks.empty() && spec.conv_blocks[0].pool ? "true" : "false";
            value.integer = value.category == "true" ? 1 : 0;
        } else {
            used = false;
            for (long b = 1; b <= static_cast<long>(spec.conv_blocks.size()); ++b) {
                const ConvBlock& block = spec.conv_blocks[static_cast<std::size_t>(b - 1)];
                if (name == block_param("conv", static_cast<int>(b), "_channels")) {
                    value.integer = block.out_channels;
                    used = true;
                } else if (name == block_param("conv", static_cast<int>(b), "_kernel")) {
                    value.integer = block.kernel_size;
                    value.category = std::to_string(block.kernel_size);
                    used = true;
                } else if (name == block_param("conv", static_cast<int>(b), "_pool")) {
                    value.category = block.pool ? "true" : "false";
                    value.integer = block.pool ? 1 : 0;
                    used = true;
                }
                if (used) break;
            }
            for (long f = 1; !used && f <= static_cast<long>(spec.fc_layers.size()); ++f) {
                if (name == block_param("fc", static_cast<int>(f), "_units")) {
                    value.integer = spec.fc_layers[static_cast<std::size_t>(f - 1)];
                    used = true;
                }
            }
        }
        v[i] = used ? encode_param(def, value) : 0.0; // unused block dims pinned at 0
    }

    ArchitectureSpec round_trip = decode(space, v);
    const bool continuous_ok =
        std::abs(round_trip.learning_rate - spec.learning_rate) <=
            kContinuousRoundTripTol * std::max(1.0, std::abs(spec.learning_rate)) &&
        std::abs(round_trip.momentum - spec.momentum) <=
            kContinuousRoundTripTol * std::max(1.0, std::abs(spec.momentum));
    round_trip.learning_rate = spec.learning_rate;
    round_trip.momentum = spec.momentum;
    if (!continuous_ok || !(round_trip == spec))
        throw NotRepresentableError("architecture is not representable in this search space");
    return v;
}

ShapeTrace validate(const ArchitectureSpec& spec, int input_channels, int input_height, int input_width,
                    int num_classes) {
    if (spec.conv_blocks.empty())
        throw InfeasibleArchitectureError("architecture needs at least one conv block", 0, {});
    if (num_classes < 2) throw ConfigError("validate: num_classes must be >= 2");
    if (!(spec.learning_rate > 0.0)) throw ConfigError("validate: learning_rate must be > 0");
    if (!(spec.momentum >= 0.0 && spec.momentum < 1.0))
        throw ConfigError("validate: momentum must be in [0,1)");
    for (int u : spec.fc_layers)
        if (u < 1) throw ConfigError("validate: fc units must be >= 1");

    ShapeTrace trace;
    std::vector<int> spatial;
    int c = input_channels, h = input_height, w = input_width;
    for (std::size_t b = 0; b < spec.conv_blocks.size(); ++b) {
        const ConvBlock& block = spec.conv_blocks[b];
        if (block.out_channels < 1) throw ConfigError("validate: conv channels must be >= 1");
        const int k = block.kernel_size;
        if (k != 3 && k != 5 && k != 7) throw ConfigError("validate: kernel size must be 3, 5 or 7");
        if (h - k + 1 < 1 || w - k + 1 < 1)
            throw InfeasibleArchitectureError("conv block " + std::to_string(b) + " (kernel " +
                                                  std::to_string(k) + ") collapses a " + std::to_string(h) +
                                                  "x" + std::to_string(w) + " input",
                                              static_cast<int>(b), spatial);
        c = block.out_channels;
        h = h - k + 1;
        w = w - k + 1;
        trace.stages.push_back({c, h, w});
        spatial.push_back(h);
        if (block.pool) {
            if (h < 2 || w < 2)
                throw InfeasibleArchitectureError("pool after block " + std::to_string(b) +
                                                      " collapses a " + std::to_string(h) + "x" +
                                                      std::to_string(w) + " map",
                                                  static_cast<int>(b), spatial);
            h /= 2;
            w /= 2;
            trace.stages.push_back({c, h, w});
            spatial.push_back(h);
        }
    }
    trace.flat_dim = c * h * w;
    return trace;
}

long param_count(const ArchitectureSpec& spec, int input_channels, int input_height, int input_width,
                 int num_classes) {
    ShapeTrace trace = validate(spec, input_channels, input_height, input_width, num_classes);
    long total = 0;
    int in_channels = input_channels;
    for (const ConvBlock& block : spec.conv_blocks) {
        total += static_cast<long>(block.out_channels) * in_channels * block.kernel_size *
                     block.kernel_size +
                 block.out_channels;
        in_channels = block.out_channels;
    }
    long in_dim = trace.flat_dim;
    for (int units : spec.fc_layers) {
        total += in_dim * units + units;
        in_dim = units;
    }
    total += in_dim * num_classes + num_classes;
    return total;
}

std::vector<nn::LayerSpec> to_layer_specs(const ArchitectureSpec& spec, int num_classes) {
    std::vector<nn::LayerSpec> layers;
    const nn::LayerSpec nonlin =
        spec.nonlinearity == Nonlinearity::Relu ? nn::LayerSpec::relu() : nn::LayerSpec::tanh();
    for (const ConvBlock& block : spec.conv_blocks) {
        layers.push_back(nn::LayerSpec::conv2d(block.out_channels, block.kernel_size));
        layers.push_back(nonlin);
        if (block.pool) layers.push_back(nn::LayerSpec::maxpool());
    }
    layers.push_back(nn::LayerSpec::flatten());
    for (int units : spec.fc_layers) {
        layers.push_back(nn::LayerSpec::dense(units));
        layers.push_back(nonlin);
    }
    layers.push_back(nn::LayerSpec::dense(num_classes));
    layers.push_back(nn::LayerSpec::softmax_xent());
    return layers;
}

nn::NetworkState instantiate(const ArchitectureSpec& spec, int input_channels, int input_height,
                             int input_width, int num_classes) {
    validate(spec, input_channels, input_height, input_width, num_classes);
    return nn::make_network(to_layer_specs(spec, num_classes),
                            {input_channels, input_height, input_width});
}

std::string describe(const ArchitectureSpec& spec) {
    std::string out;
    for (const ConvBlock& block : spec.conv_blocks) {
        out += "c" + std::to_string(block.out_channels) + "k" + std::to_string(block.kernel_size);
        if (block.pool) out += "p";
        out += "-";
    }
    for (int units : spec.fc_layers) out += "f" + std::to_string(units) + "-";
    out += spec.nonlinearity == Nonlinearity::Relu ? "relu" : "tanh";
    char buf[48];
    std::snprintf(buf, sizeof(buf), "-lr%.1e-m%.2f", spec.learning_rate, spec.momentum);
    return out + buf;
}

SearchSpace default_space(int input_channels, int input_height, int input_width, int num_classes) {
    SearchSpace s;
    s.input_channels = input_channels;
    s.input_height = input_height;
    s.input_width = input_width;
    s.num_classes = num_classes;
    s.params.push_back({"n_conv", ParamKind::Integer, 2, 4, false, {}});
    for (int b = 1; b <= 4; ++b)
        s.params.push_back({"conv" + std::to_string(b) + "_channels", ParamKind::Integer, 4, 64, false, {}});
    s.params.push_back({"kernel", ParamKind::Categorical, 0, 0, false, {"3", "5"}});
    for (int b = 1; b <= 4; ++b)
        s.params.push_back(
            {"conv" + std::to_string(b) + "_pool", ParamKind::Categorical, 0, 0, false, {"true", "false"}});
    s.params.push_back({"n_fc", ParamKind::Integer, 0, 2, false, {}});
    for (int f = 1; f <= 2; ++f)
        s.params.push_back({"fc" + std::to_string(f) + "_units", ParamKind::Integer, 16, 256, false, {}});
    s.params.push_back({"nonlinearity", ParamKind::Categorical, 0, 0, false, {"relu", "tanh"}});
    s.params.push_back({"learning_rate", ParamKind::Continuous, 1e-4, 1e-1, true, {}});
    s.params.push_back({"momentum", ParamKind::Continuous, 0.0, 0.95, false, {}});
    return s;
}

std::vector<ArchitectureSpec> default_suite16() {
    auto arch = [](std::vector<ConvBlock> blocks, Nonlinearity nl, std::vector<int> fc, double lr,
                   double mom) {
        ArchitectureSpec s;
        s.conv_blocks = std::move(blocks);
        s.nonlinearity = nl;
        s.fc_layers = std::move(fc);
        s.learning_rate = lr;
        s.momentum = mom;
        return s;
    };
    const auto relu = Nonlinearity::Relu;
    const auto tanh = Nonlinearity::Tanh;
    return {
        arch({{8, 3, true}}, relu, {}, 0.01, 0.9),
        arch({{8, 5, true}}, relu, {32}, 0.01, 0.9),
        arch({{16, 3, true}, {32, 3, true}}, relu, {64}, 0.01, 0.9),
        arch({{16, 5, true}, {32, 5, true}}, relu, {64}, 0.01, 0.9),
        arch({{4, 3, true}}, tanh, {16}, 0.01, 0.9),
        arch({{32, 3, true}, {32, 3, true}}, tanh, {128, 64}, 0.003, 0.9),
        arch({{8, 3, false}, {16, 3, true}}, relu, {32}, 0.03, 0.5),
        arch({{16, 3, true}, {16, 3, false}}, relu, {}, 0.003, 0.5),
        arch({{4, 5, true}, {8, 5, true}}, relu, {32}, 0.03, 0.9),
        arch({{8, 3, true}, {16, 3, true}, {32, 3, false}}, relu, {64}, 0.01, 0.9),
        arch({{16, 5, true}}, tanh, {64, 32}, 0.01, 0.5),
        arch({{32, 5, true}, {16, 3, true}}, relu, {128}, 0.003, 0.9),
        arch({{4, 3, true}}, tanh, {}, 0.01, 0.9),
        arch({{8, 5, true}, {8, 3, true}}, tanh, {32, 16}, 0.03, 0.5),
        arch({{16, 3, false}}, relu, {64}, 0.01, 0.9),
        arch({{8, 3, true}, {8, 3, true}}, relu, {16}, 0.005, 0.9),
    };
}

nlohmann::json to_json(const ArchitectureSpec& spec) {
    nlohmann::json blocks = nlohmann::json::array();
    for (const ConvBlock& b : spec.conv_blocks)
        blocks.push_back({{"channels", b.out_channels}, {"kernel", b.kernel_size}, {"pool", b.pool}});
    return {{"conv_blocks", blocks},
            {"nonlinearity", spec.nonlinearity == Nonlinearity::Relu ? "relu" : "tanh"},
            {"fc_layers", spec.fc_layers},
            {"learning_rate", spec.learning_rate},
            {"momentum", spec.momentum}};
}

ArchitectureSpec architecture_from_json(const nlohmann::json& j) {
    try {
        ArchitectureSpec spec;
        for (const auto& b : j.at("conv_blocks"))
            spec.conv_blocks.push_back(
                {b.at("channels").get<int>(), b.at("kernel").get<int>(), b.at("pool").get<bool>()});
        const std::string nl = j.at("nonlinearity").get<std::string>();
        if (nl == "relu")
            spec.nonlinearity = Nonlinearity::Relu;
        else if (nl == "tanh")
            spec.nonlinearity = Nonlinearity::Tanh;
        else
            throw ConfigError("nonlinearity must be relu or tanh, got '" + nl + "'");
        spec.fc_layers = j.value("fc_layers", std::vector<int>{});
        spec.learning_rate = j.at("learning_rate").get<double>();
        spec.momentum = j.at("momentum").get<double>();
        return spec;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("bad architecture json: ") + e.what());
    }
}

nlohmann::json to_json(const SearchSpace& space) {
    nlohmann::json params = nlohmann::json::array();
    for (const ParamDef& p : space.params) {
        nlohmann::json def{{"name", p.name}};
        switch (p.kind) {
            case ParamKind::Integer:
                def["kind"] = "integer";
                def["lo"] = static_cast<long>(p.lo);
                def["hi"] = static_cast<long>(p.hi);
                break;
            case ParamKind::Categorical:
                def["kind"] = "categorical";
                def["values"] = p.values;
                break;
            case ParamKind::Continuous:
                def["kind"] = "continuous";
                def["lo"] = p.lo;
                def["hi"] = p.hi;
                def["log10"] = p.log10_scale;
                break;
        }
        params.push_back(def);
    }
    return {{"input", {{"channels", space.input_channels}, {"height", space.input_height}, {"width", space.input_width}}},
            {"num_classes", space.num_classes},
            {"params", params}};
}

SearchSpace space_from_json(const nlohmann::json& j) {
    try {
        SearchSpace s;
        s.input_channels = j.at("input").at("channels").get<int>();
        s.input_height = j.at("input").at("height").get<int>();
        s.input_width = j.at("input").at("width").get<int>();
        s.num_classes = j.at("num_classes").get<int>();
        for (const auto& def : j.at("params")) {
            ParamDef p;
            p.name = def.at("name").get<std::string>();
            const std::string kind = def.at("kind").get<std::string>();
            if (kind == "integer") {
                p.kind = ParamKind::Integer;
                p.lo = def.at("lo").get<double>();
                p.hi = def.at("hi").get<double>();
            } else if (kind == "categorical") {
                p.kind = ParamKind::Categorical;
                p.lo = 0.0;
                p.hi = 0.0;
                p.values = def.at("values").get<std::vector<std::string>>();
                if (p.values.empty()) throw ConfigError("categorical parameter '" + p.name + "' has no values");
            } else if (kind == "continuous") {
                p.kind = ParamKind::Continuous;
                p.lo = def.at("lo").get<double>();
                p.hi = def.at("hi").get<double>();
                p.log10_scale = def.value("log10", false);
            } else {
                throw ConfigError("parameter kind must be integer/categorical/continuous, got '" + kind + "'");
            }
            if (p.kind != ParamKind::Categorical && !(p.lo < p.hi))
                throw ConfigError("parameter '" + p.name + "' needs lo < hi");
            if (p.log10_scale && !(p.lo > 0.0))
                throw ConfigError("log10 parameter '" + p.name + "' needs lo > 0");
            for (const ParamDef& existing : s.params)
                if (existing.name == p.name) throw ConfigError("duplicate parameter name '" + p.name + "'");
            s.params.push_back(std::move(p));
        }
        if (s.params.empty()) throw ConfigError("search space has no parameters");
        return s;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("bad search space json: ") + e.what());
    }
}

SearchSpace load_space(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open search space file " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(path + ": " + e.what());
    }
    return space_from_json(j);
}

} // namespace archsel::space
