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
#include <cstring>

#include "archsel/core/rng.hpp"
#include "archsel/est/estimators.hpp"
#include "archsel/nn/train.hpp"

using namespace archsel;
using namespace archsel::est;

namespace {

struct Fixture {
    data::Dataset train;
    data::Dataset val;
    space::ArchitectureSpec spec;

    Fixture() {
        train = data::synthesize(4, 60, 1, 12, 12, 0.25, 71);
        val = data::synthesize(4, 25, 1, 12, 12, 0.25, 72);
        const data::NormStats stats = data::compute_norm_stats(train);
        train = data::normalize(train, stats);
        val = data::normalize(val, stats);
        spec.conv_blocks = {{6, 3, true}};
        spec.fc_layers = {16};
        spec.learning_rate = 0.02;
        spec.momentum = 0.9;
    }
};

bool same_doubles(const Tensor& a, const Tensor& b) {
    return a.size() == b.size() &&
           std::memcmp(a.data(), b.data(), static_cast<std::size_t>(a.size()) * sizeof(double)) == 0;
}

} // namespace

TEST_CASE("full estimator: zero epochs scores chance for an untrained network") {
    Fixture f;
    FullTrainConfig cfg;
    cfg.epochs = 0;
    cfg.n_seeds = 1;
    cfg.master_seed = 3;
    EvaluationResult r = estimate_full(f.spec, f.train, f.val, cfg);
    CHECK(r.mode == EstimatorMode::Full);
    CHECK(r.best == r.mean);
    CHECK(r.best >= 0.4); // chance for 4 classes is 0.75; untrained sits nearby
    CHECK(r.wall_time_seconds > 0.0);
    CHECK(r.seeds[0].phase1_epochs == 0);
}

TEST_CASE("estimators replay identically from the master seed") {
    Fixture f;
    FullTrainConfig cfg;
    cfg.epochs = 2;
    cfg.n_seeds = 3;
    cfg.master_seed = 11;
    EvaluationResult a = estimate_full(f.spec, f.train, f.val, cfg);
    EvaluationResult b = estimate_full(f.spec, f.train, f.val, cfg);
    CHECK(a.per_seed_errors == b.per_seed_errors);
    CHECK(a.best == b.best);
    CHECK(a.mean == b.mean);

    HeuristicConfig h;
    h.conv_epochs = 1;
    h.fc_epochs = 2;
    h.n_seeds = 3;
    h.master_seed = 11;
    EvaluationResult ha = estimate_heuristic(f.spec, f.train, f.val, h);
    EvaluationResult hb = estimate_heuristic(f.spec, f.train, f.val, h);
    CHECK(ha.per_seed_errors == hb.per_seed_errors);
}

TEST_CASE("per-seed results are independent of the worker count") {
    Fixture f;
    HeuristicConfig h;
    h.conv_epochs = 1;
    h.fc_epochs = 1;
    h.n_seeds = 4;
    h.master_seed = 21;
    h.workers = 1;
    EvaluationResult serial = estimate_heuristic(f.spec, f.train, f.val, h);
    h.workers = 4;
    EvaluationResult parallel = estimate_heuristic(f.spec, f.train, f.val, h);
    CHECK(serial.per_seed_errors == parallel.per_seed_errors);
    CHECK(parallel.workers == 4);
}

TEST_CASE("full training on an easy task reaches a low best error") {
    Fixture easy;
    easy.train = data::normalize(data::synthesize(4, 100, 1, 12, 12, 0.0, 91));
    easy.val = data::normalize(data::synthesize(4, 30, 1, 12, 12, 0.0, 92));
    FullTrainConfig cfg;
    cfg.epochs = 10;
    cfg.n_seeds = 3;
    cfg.batch_size = 32;
    cfg.master_seed = 5;
    EvaluationResult r = estimate_full(easy.spec, easy.train, easy.val, cfg);
    CHECK(r.best <= 0.05);
    CHECK(r.best <= r.mean);
    CHECK(r.diverged_count == 0);
}

TEST_CASE("heuristic epoch accounting: conv_epochs full epochs plus fc_epochs head epochs") {
    Fixture f;
    HeuristicConfig h;
    h.conv_epochs = 2;
    h.fc_epochs = 3;
    h.n_seeds = 2;
    h.master_seed = 31;
    EvaluationResult r = estimate_heuristic(f.spec, f.train, f.val, h);
    for (const SeedOutcome& s : r.seeds) {
        CHECK(s.phase1_epochs == 2);
        CHECK(s.phase2_epochs == 3);
    }
    CHECK(r.best <= r.mean);
}

TEST_CASE("heuristic with zero epochs keeps the initialization and scores chance") {
    Fixture f;
    HeuristicConfig h;
    h.conv_epochs = 0;
    h.fc_epochs = 0;
    h.n_seeds = 2;
    h.master_seed = 41;
    EvaluationResult r = estimate_heuristic(f.spec, f.train, f.val, h);
    for (const SeedOutcome& s : r.seeds) {
        CHECK(s.phase1_epochs == 0);
        CHECK(s.phase2_epochs == 0);
    }
    CHECK(r.mean >= 0.4);
}

TEST_CASE("the heuristic pipeline equals its documented two-phase seed chain, with frozen conv") {
    // reproduce estimate_heuristic for one seed through the public nn API:
    // seed_i = derive(master, i); init with derive(seed_i, 1); phase 1 trains
    // everything with derive(seed_i, 2); phase 2 freezes below the split and
    // trains with derive(seed_i, 3)
    Fixture f;
    HeuristicConfig h;
    h.conv_epochs = 1;
    h.fc_epochs = 2;
    h.n_seeds = 1;
    h.master_seed = 51;
    EvaluationResult r = estimate_heuristic(f.spec, f.train, f.val, h);

    const std::uint64_t seed0 = derive_seed(h.master_seed, 0);
    nn::NetworkState net = space::instantiate(f.spec, 1, 12, 12, 4);
    nn::init_weights(net, derive_seed(seed0, 1));
    nn::TrainConfig phase1;
    phase1.learning_rate = f.spec.learning_rate;
    phase1.momentum = f.spec.momentum;
    phase1.batch_size = h.batch_size;
    phase1.epochs = h.conv_epochs;
    phase1.seed = derive_seed(seed0, 2);
    nn::train(net, f.train, f.val, phase1);

    // conv stack after phase 1 is what phase 2 must leave untouched
    std::vector<Tensor> conv_after_phase1;
    for (int l = 0; l < net.split_index; ++l)
        if (net.params[static_cast<std::size_t>(l)].has_params())
            conv_after_phase1.push_back(net.params[static_cast<std::size_t>(l)].weights);

    nn::TrainConfig phase2 = phase1;
    phase2.epochs = h.fc_epochs;
    phase2.seed = derive_seed(seed0, 3);
    phase2.freeze_mask.assign(static_cast<std::size_t>(net.layer_count()), 0);
    for (int l = 0; l < net.split_index; ++l) phase2.freeze_mask[static_cast<std::size_t>(l)] = 1;
    nn::train(net, f.train, f.val, phase2);

    std::size_t idx = 0;
    for (int l = 0; l < net.split_index; ++l)
        if (net.params[static_cast<std::size_t>(l)].has_params())
            CHECK(same_doubles(conv_after_phase1[idx++], net.params[static_cast<std::size_t>(l)].weights));

    CHECK(r.per_seed_errors[0] == nn::evaluate(net, f.val));
}

TEST_CASE("random-weights estimator keeps the conv stack at its initialization") {
    Fixture f;
    HeuristicConfig h;
    h.conv_epochs = 99; // must be ignored by the random-weights mode
    h.fc_epochs = 2;
    h.n_seeds = 1;
    h.master_seed = 61;
    EvaluationResult r = estimate_random_weights(f.spec, f.train, f.val, h);
    CHECK(r.mode == EstimatorMode::RandomWeights);
    CHECK(r.seeds[0].phase1_epochs == 0);
    CHECK(r.seeds[0].phase2_epochs == 2);

    // replay: the conv parameters equal the raw initialization
    const std::uint64_t seed0 = derive_seed(h.master_seed, 0);
    nn::NetworkState reference = space::instantiate(f.spec, 1, 12, 12, 4);
    nn::init_weights(reference, derive_seed(seed0, 1));
    nn::NetworkState trained = space::instantiate(f.spec, 1, 12, 12, 4);
    nn::init_weights(trained, derive_seed(seed0, 1));
    nn::TrainConfig phase2;
    phase2.learning_rate = f.spec.learning_rate;
    phase2.momentum = f.spec.momentum;
    phase2.batch_size = h.batch_size;
    phase2.epochs = h.fc_epochs;
    phase2.seed = derive_seed(seed0, 3);
    phase2.freeze_mask.assign(static_cast<std::size_t>(trained.layer_count()), 0);
    for (int l = 0; l < trained.split_index; ++l) phase2.freeze_mask[static_cast<std::size_t>(l)] = 1;
    nn::train(trained, f.train, f.val, phase2);
    for (int l = 0; l < trained.split_index; ++l) {
        if (!trained.params[static_cast<std::size_t>(l)].has_params()) continue;
        CHECK(same_doubles(reference.params[static_cast<std::size_t>(l)].weights,
                           trained.params[static_cast<std::size_t>(l)].weights));
    }
    CHECK(r.per_seed_errors[0] == nn::evaluate(trained, f.val));
}

TEST_CASE("random weights with zero head epochs sits at chance") {
    Fixture f;
    HeuristicConfig h;
    h.fc_epochs = 0;
    h.n_seeds = 2;
    h.master_seed = 71;
    EvaluationResult r = estimate_random_weights(f.spec, f.train, f.val, h);
    CHECK(r.mean >= 0.4);
    CHECK(r.diverged_count == 0);
}

TEST_CASE("estimator rejects bad configuration and invalid specs") {
    Fixture f;
    FullTrainConfig cfg;
    cfg.n_seeds = 0;
    CHECK_THROWS_AS(estimate_full(f.spec, f.train, f.val, cfg), ConfigError);
    space::ArchitectureSpec huge = f.spec;
    huge.conv_blocks = {{8, 7, true}, {8, 7, true}}; // collapses a 12x12 input
    FullTrainConfig ok;
    ok.n_seeds = 1;
    CHECK_THROWS_AS(estimate_full(huge, f.train, f.val, ok), InfeasibleArchitectureError);
}
