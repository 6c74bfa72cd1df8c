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

#include <doctest.h>

#include <cmath>
#include <set>

#include "archsel/core/rng.hpp"
#include "archsel/space/search_space.hpp"

using namespace archsel;
using namespace archsel::space;

namespace {

ParamVector constant_vector(int d, double v) { return ParamVector::Constant(d, v); }

ParamVector random_vector(int d, Xoshiro256ss& rng) {
    ParamVector v(d);
    for (int i = 0; i < d; ++i) v[i] = rng.next_double();
    return v;
}

} // namespace

TEST_CASE("decode at the cube corners hits parameter minima and maxima") {
    SearchSpace space = default_space(1, 28, 28, 10);
    ArchitectureSpec lo = decode(space, constant_vector(space.dim(), 0.0));
    CHECK(lo.conv_blocks.size() == 2);
    for (const ConvBlock& b : lo.conv_blocks) {
        CHECK(b.out_channels == 4);
        CHECK(b.kernel_size == 3);
        CHECK(b.pool); // first categorical value
    }
    CHECK(lo.fc_layers.empty());
    CHECK(lo.nonlinearity == Nonlinearity::Relu);
    CHECK(lo.learning_rate == doctest::Approx(1e-4));
    CHECK(lo.momentum == doctest::Approx(0.0));

    ArchitectureSpec hi = decode(space, constant_vector(space.dim(), 1.0));
    CHECK(hi.conv_blocks.size() == 4);
    for (const ConvBlock& b : hi.conv_blocks) {
        CHECK(b.out_channels == 64);
        CHECK(b.kernel_size == 5);
        CHECK(!b.pool); // clamped to the last categorical value, no index overflow
    }
    CHECK(hi.fc_layers == std::vector<int>{256, 256});
    CHECK(hi.nonlinearity == Nonlinearity::Tanh);
    CHECK(hi.learning_rate == doctest::Approx(1e-1));
    CHECK(hi.momentum == doctest::Approx(0.95));
}

TEST_CASE("log-scaled learning rate maps the midpoint to 10^-2.5") {
    SearchSpace space = default_space(1, 28, 28, 10);
    ParamVector v = constant_vector(space.dim(), 0.0);
    for (int i = 0; i < space.dim(); ++i)
        if (space.params[static_cast<std::size_t>(i)].name == "learning_rate") v[i] = 0.5;
    ArchitectureSpec spec = decode(space, v);
    CHECK(spec.learning_rate == doctest::Approx(3.1622776601683794e-3).epsilon(1e-12));
}

TEST_CASE("decode is deterministic and total on feasible vectors") {
    SearchSpace space = default_space(1, 28, 28, 10);
    Xoshiro256ss rng(55);
    int feasible = 0;
    for (int trial = 0; trial < 200; ++trial) {
        ParamVector v = random_vector(space.dim(), rng);
        try {
            ArchitectureSpec a = decode(space, v);
            ArchitectureSpec b = decode(space, v);
            CHECK(a == b);
            ++feasible;
        } catch (const InfeasibleArchitectureError& e) {
            CHECK(e.block_index >= 0);
        }
    }
    CHECK(feasible > 100); // most of the default space is feasible on 28x28
}

TEST_CASE("encode/decode stabilize after one decode") {
    SearchSpace space = default_space(1, 28, 28, 10);
    Xoshiro256ss rng(56);
    // discrete fields reproduce exactly; continuous ones within 1e-9 relative
    auto reproduces = [](const ArchitectureSpec& a, const ArchitectureSpec& b) {
        ArchitectureSpec structural = a;
        structural.learning_rate = b.learning_rate;
        structural.momentum = b.momentum;
        const bool continuous =
            std::abs(a.learning_rate - b.learning_rate) <= 1e-9 * std::abs(b.learning_rate) &&
            std::abs(a.momentum - b.momentum) <= 1e-9 * std::max(1.0, std::abs(b.momentum));
        return structural == b && continuous;
    };
    int checked = 0;
    for (int trial = 0; trial < 100 && checked < 100; ++trial) {
        ParamVector v = random_vector(space.dim(), rng);
        ArchitectureSpec spec;
        try {
            spec = decode(space, v);
        } catch (const InfeasibleArchitectureError&) {
            continue;
        }
        ParamVector fixed = encode(space, spec);
        CHECK(reproduces(decode(space, fixed), spec));
        ParamVector again = encode(space, decode(space, fixed));
        for (int i = 0; i < space.dim(); ++i) CHECK(std::abs(again[i] - fixed[i]) < 1e-12);
        ++checked;
    }
    CHECK(checked > 50);
}

TEST_CASE("encode rejects values outside the space") {
    SearchSpace space = default_space(1, 28, 28, 10);
    ArchitectureSpec spec = decode(space, constant_vector(space.dim(), 0.25));
    spec.conv_blocks[0].out_channels = 200;
    CHECK_THROWS_AS(encode(space, spec), NotRepresentableError);
    spec = decode(space, constant_vector(space.dim(), 0.25));
    spec.learning_rate = 0.5; // above the continuous range
    CHECK_THROWS_AS(encode(space, spec), NotRepresentableError);
    spec = decode(space, constant_vector(space.dim(), 0.25));
    spec.conv_blocks[0].kernel_size = 7; // not in the categorical list
    CHECK_THROWS_AS(encode(space, spec), NotRepresentableError);
}

TEST_CASE("encode places a minimal spec at the per-parameter minima positions") {
    SearchSpace space = default_space(1, 28, 28, 10);
    ArchitectureSpec minimal = decode(space, constant_vector(space.dim(), 0.0));
    ParamVector v = encode(space, minimal);
    // integer minimum sits at the center of the first cell: 0.5 / (hi-lo+1)
    const ParamDef* n_conv = space.find("n_conv");
    REQUIRE(n_conv != nullptr);
    const double expected_n_conv = 0.5 / (n_conv->hi - n_conv->lo + 1.0);
    for (int i = 0; i < space.dim(); ++i) {
        const ParamDef& def = space.params[static_cast<std::size_t>(i)];
        if (def.name == "n_conv") CHECK(v[i] == doctest::Approx(expected_n_conv));
        if (def.name == "conv1_channels") CHECK(v[i] == doctest::Approx(0.5 / 61.0));
        if (def.name == "kernel") CHECK(v[i] == doctest::Approx(0.25)); // first of two categories
        if (def.name == "learning_rate") CHECK(v[i] == doctest::Approx(0.0));
        if (def.name == "momentum") CHECK(v[i] == doctest::Approx(0.0));
    }
}

TEST_CASE("increasing a coordinate never decreases its own decoded parameter") {
    SearchSpace space = default_space(1, 28, 28, 10);
    Xoshiro256ss rng(57);
    int checked = 0;
    for (int trial = 0; trial < 300 && checked < 60; ++trial) {
        ParamVector v = random_vector(space.dim(), rng);
        const int coord = rng.next_int(space.dim());
        ParamVector w = v;
        w[coord] = std::min(1.0, v[coord] + 0.2 * rng.next_double());
        ArchitectureSpec a, b;
        try {
            a = decode(space, v);
            b = decode(space, w);
        } catch (const InfeasibleArchitectureError&) {
            continue;
        }
        const std::string& name = space.params[static_cast<std::size_t>(coord)].name;
        auto value_of = [&](const ArchitectureSpec& s) -> double {
            if (name == "n_conv") return static_cast<double>(s.conv_blocks.size());
            if (name == "n_fc") return static_cast<double>(s.fc_layers.size());
            if (name == "learning_rate") return s.learning_rate;
            if (name == "momentum") return s.momentum;
            return -1.0; // other parameters have categorical or block-dependent meaning
        };
        const double va = value_of(a), vb = value_of(b);
        if (va >= 0.0) {
            CHECK(vb >= va);
            ++checked;
        }
        // per-block channels where the block exists in both decodes
        if (name.rfind("conv", 0) == 0 && name.find("_channels") != std::string::npos) {
            const std::size_t idx = static_cast<std::size_t>(name[4] - '1');
            if (idx < a.conv_blocks.size() && idx < b.conv_blocks.size()) {
                CHECK(b.conv_blocks[idx].out_channels >= a.conv_blocks[idx].out_channels);
                ++checked;
            }
        }
    }
    CHECK(checked >= 40);
}

TEST_CASE("validate traces the shape algebra exactly") {
    // three k5 blocks with pooling on 28x28: 24 -> 12 -> 8 -> 4, then the
    // third conv cannot fit
    ArchitectureSpec spec;
    spec.conv_blocks = {{8, 5, true}, {8, 5, true}, {8, 5, true}};
    try {
        validate(spec, 1, 28, 28, 10);
        FAIL("expected InfeasibleArchitectureError");
    } catch (const InfeasibleArchitectureError& e) {
        CHECK(e.block_index == 2);
        CHECK(e.trace == std::vector<int>{24, 12, 8, 4});
    }

    // 13x13 with kernel 7 twice, no pooling: 7 then 1, feasible
    ArchitectureSpec deep;
    deep.conv_blocks = {{4, 7, false}, {4, 7, false}};
    ShapeTrace trace = validate(deep, 1, 13, 13, 10);
    REQUIRE(trace.stages.size() == 2);
    CHECK(trace.stages[0] == std::vector<int>{4, 7, 7});
    CHECK(trace.stages[1] == std::vector<int>{4, 1, 1});
    CHECK(trace.flat_dim == 4);

    ArchitectureSpec too_big;
    too_big.conv_blocks = {{4, 7, false}};
    CHECK_THROWS_AS(validate(too_big, 1, 5, 5, 10), InfeasibleArchitectureError);
}

TEST_CASE("param_count matches a layer-by-layer hand sum") {
    // LeNet-like: conv 6@5 pool, conv 16@5 pool, fc 120, fc 84, 10 classes on 1x28x28
    ArchitectureSpec spec;
    spec.conv_blocks = {{6, 5, true}, {16, 5, true}};
    spec.fc_layers = {120, 84};
    // hand sum: conv1 6*1*25+6 = 156; conv2 16*6*25+16 = 2416; flatten 16*4*4 = 256;
    // fc1 256*120+120 = 30840; fc2 120*84+84 = 10164; out 84*10+10 = 850
    CHECK(param_count(spec, 1, 28, 28, 10) == 156 + 2416 + 30840 + 10164 + 850);

    ArchitectureSpec conv_only;
    conv_only.conv_blocks = {{3, 3, true}};
    // conv 3*1*9+3 = 30; flatten 3*13*13 = 507; out 507*10+10 = 5080
    CHECK(param_count(conv_only, 1, 28, 28, 10) == 30 + 5080);
}

TEST_CASE("every feasible decode instantiates a runnable network") {
    SearchSpace space = default_space(1, 28, 28, 10);
    Xoshiro256ss rng(58);
    int built = 0;
    for (int trial = 0; trial < 60 && built < 20; ++trial) {
        ParamVector v = random_vector(space.dim(), rng);
        ArchitectureSpec spec;
        try {
            spec = decode(space, v);
        } catch (const InfeasibleArchitectureError&) {
            continue;
        }
        nn::NetworkState net = instantiate(spec, 1, 28, 28, 10);
        nn::init_weights(net, 123);
        Tensor sample({1, 28, 28});
        sample.fill(0.5);
        Tensor logits = nn::forward(net, sample);
        CHECK(logits.shape() == std::vector<int>{10});
        CHECK(logits.all_finite());
        CHECK(net.split_index > 0);
        ++built;
    }
    CHECK(built == 20);
}

TEST_CASE("the shipped 16-architecture suite is valid on 28x28 with unique ids") {
    const auto suite = default_suite16();
    REQUIRE(suite.size() == 16);
    std::set<std::string> ids;
    for (const ArchitectureSpec& spec : suite) {
        CHECK_NOTHROW(validate(spec, 1, 28, 28, 10));
        ids.insert(describe(spec));
    }
    CHECK(ids.size() == 16);
}

TEST_CASE("architecture and space json round-trip") {
    const auto suite = default_suite16();
    for (const ArchitectureSpec& spec : suite)
        CHECK(architecture_from_json(to_json(spec)) == spec);
    SearchSpace space = default_space(1, 16, 16, 10);
    CHECK(space_from_json(to_json(space)) == space);
}

TEST_CASE("space json validation catches malformed definitions") {
    nlohmann::json base = to_json(default_space(1, 28, 28, 10));
    nlohmann::json bad = base;
    bad["params"][0]["kind"] = "mystery";
    CHECK_THROWS_AS(space_from_json(bad), ConfigError);
    bad = base;
    bad["params"][0]["lo"] = 10;
    bad["params"][0]["hi"] = 2;
    CHECK_THROWS_AS(space_from_json(bad), ConfigError);
    bad = base;
    bad["params"][1]["name"] = base["params"][0]["name"];
    CHECK_THROWS_AS(space_from_json(bad), ConfigError);
}

TEST_CASE("decode reports missing structural parameters") {
    SearchSpace space;
    space.params.push_back({"n_conv", ParamKind::Integer, 1, 2, false, {}});
    space.num_classes = 10;
    CHECK_THROWS_AS(decode(space, constant_vector(1, 0.0)), ConfigError);
}
