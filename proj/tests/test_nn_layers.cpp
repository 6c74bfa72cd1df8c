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

#include "archsel/nn/layers.hpp"
#include "support/oracles.hpp"

using namespace archsel;
using namespace archsel::nn;
using namespace archsel::testing;

namespace {

/// Scalar loss "sum of outputs" with an upstream weighting, so gradients are
/// nontrivial: loss = sum(w_up .* f(x)).
Tensor random_upstream(const std::vector<int>& shape, Xoshiro256ss& rng) {
    Tensor t(shape);
    for (Eigen::Index i = 0; i < t.size(); ++i) t[i] = -1.0 + 2.0 * rng.next_double();
    return t;
}

double weighted_sum(const Tensor& out, const Tensor& upstream) {
    return (out.raw() * upstream.raw()).sum();
}

} // namespace

TEST_CASE("conv2d identity kernel reproduces the input") {
    Tensor input({1, 3, 3});
    input.fill(1.0);
    Tensor weights({1, 1, 1, 1});
    weights[0] = 1.0;
    Tensor bias({1});
    Tensor out = conv2d_forward(input, weights, bias);
    CHECK(out.shape() == std::vector<int>{1, 3, 3});
    for (Eigen::Index i = 0; i < out.size(); ++i) CHECK(out[i] == doctest::Approx(1.0));
}

TEST_CASE("conv2d all-ones 3x3 kernel sums the input block") {
    Tensor input({1, 3, 3}, (Tensor::Storage(9) << 1, 2, 3, 4, 5, 6, 7, 8, 9).finished());
    Tensor weights({1, 1, 3, 3});
    weights.fill(1.0);
    Tensor bias({1});
    Tensor out = conv2d_forward(input, weights, bias);
    CHECK(out.shape() == std::vector<int>{1, 1, 1});
    CHECK(out[0] == doctest::Approx(45.0));
}

TEST_CASE("conv2d forward matches the quadruple-loop reference") {
    Xoshiro256ss rng(101);
    Tensor input = random_tensor({2, 8, 8}, rng);
    Tensor weights = random_tensor({4, 2, 3, 3}, rng);
    Tensor bias = random_tensor({4}, rng);
    Tensor fast = conv2d_forward(input, weights, bias);
    Tensor reference = conv2d_reference(input, weights, bias);
    REQUIRE(fast.shape() == reference.shape());
    for (Eigen::Index i = 0; i < fast.size(); ++i)
        CHECK(std::abs(fast[i] - reference[i]) < 1e-12);
}

TEST_CASE("conv2d rejects inconsistent shapes") {
    Tensor input({2, 4, 4});
    CHECK_THROWS_AS(conv2d_forward(input, Tensor({4, 3, 3, 3}), Tensor({4})), ShapeMismatchError);
    CHECK_THROWS_AS(conv2d_forward(input, Tensor({4, 2, 5, 5}), Tensor({4})), ShapeMismatchError);
    CHECK_THROWS_AS(conv2d_forward(input, Tensor({4, 2, 3, 3}), Tensor({3})), ShapeMismatchError);
}

TEST_CASE("conv2d backward: zero upstream gradient gives zero gradients") {
    Xoshiro256ss rng(5);
    Tensor input = random_tensor({2, 5, 5}, rng);
    Tensor weights = random_tensor({3, 2, 3, 3}, rng);
    Tensor zero_grad({3, 3, 3});
    auto grads = conv2d_backward(zero_grad, input, weights);
    CHECK((grads.input.raw() == 0.0).all());
    CHECK((grads.weights.raw() == 0.0).all());
    CHECK((grads.bias.raw() == 0.0).all());
}

TEST_CASE("conv2d 1x1 kernel, loss = sum of outputs: grad_weights is the input sum") {
    Xoshiro256ss rng(6);
    Tensor input = random_tensor({1, 4, 4}, rng);
    Tensor weights = random_tensor({1, 1, 1, 1}, rng);
    Tensor ones({1, 4, 4});
    ones.fill(1.0);
    auto grads = conv2d_backward(ones, input, weights);
    CHECK(grads.weights[0] == doctest::Approx(input.raw().sum()));
    CHECK(grads.bias[0] == doctest::Approx(16.0));
}

TEST_CASE("conv2d gradients match central finite differences") {
    Xoshiro256ss rng(7);
    for (int trial = 0; trial < 20; ++trial) {
        const int ci = 1 + rng.next_int(3);
        const int co = 1 + rng.next_int(3);
        const int k = 3;
        const int h = k + 1 + rng.next_int(3);
        const int w = k + 1 + rng.next_int(3);
        Tensor input = random_tensor({ci, h, w}, rng);
        Tensor weights = random_tensor({co, ci, k, k}, rng, -0.5, 0.5);
        Tensor bias = random_tensor({co}, rng, -0.5, 0.5);
        Tensor upstream = random_upstream({co, h - k + 1, w - k + 1}, rng);

        auto analytic = conv2d_backward(upstream, input, weights);
        // analytic bias gradient under the weighted-sum loss is the upstream
        // channel sums; fold them in by comparing against finite differences
        Tensor fd_w = finite_difference_gradient(
            [&](const Tensor& candidate) {
                return weighted_sum(conv2d_forward(input, candidate, bias), upstream);
            },
            weights);
        Tensor fd_in = finite_difference_gradient(
            [&](const Tensor& candidate) {
                return weighted_sum(conv2d_forward(candidate, weights, bias), upstream);
            },
            input);
        Tensor fd_b = finite_difference_gradient(
            [&](const Tensor& candidate) {
                return weighted_sum(conv2d_forward(input, weights, candidate), upstream);
            },
            bias);
        CHECK(max_relative_error(analytic.weights, fd_w) < 1e-4);
        CHECK(max_relative_error(analytic.input, fd_in) < 1e-4);
        CHECK(max_relative_error(analytic.bias, fd_b) < 1e-4);
    }
}

TEST_CASE("batched conv agrees with the per-sample path") {
    Xoshiro256ss rng(8);
    const int batch = 5;
    Tensor batched({batch, 2, 6, 6});
    std::vector<Tensor> samples;
    for (int b = 0; b < batch; ++b) {
        Tensor s = random_tensor({2, 6, 6}, rng);
        samples.push_back(s);
        std::copy(s.data(), s.data() + s.size(), batched.data() + b * s.size());
    }
    Tensor weights = random_tensor({3, 2, 3, 3}, rng);
    Tensor bias = random_tensor({3}, rng);

    Tensor out_batch = conv2d_forward_batch(batched, weights, bias);
    Tensor upstream({batch, 3, 4, 4});
    for (Eigen::Index i = 0; i < upstream.size(); ++i) upstream[i] = -1.0 + 2.0 * rng.next_double();
    auto grads_batch = conv2d_backward_batch(upstream, batched, weights);

    Tensor w_sum(weights.shape()), b_sum({3});
    for (int b = 0; b < batch; ++b) {
        Tensor out_single = conv2d_forward(samples[static_cast<std::size_t>(b)], weights, bias);
        for (Eigen::Index i = 0; i < out_single.size(); ++i)
            CHECK(std::abs(out_single[i] - out_batch[b * out_single.size() + i]) < 1e-12);
        Tensor up_single({3, 4, 4});
        std::copy(upstream.data() + b * up_single.size(), upstream.data() + (b + 1) * up_single.size(),
                  up_single.data());
        auto g = conv2d_backward(up_single, samples[static_cast<std::size_t>(b)], weights);
        w_sum.raw() += g.weights.raw();
        b_sum.raw() += g.bias.raw();
        for (Eigen::Index i = 0; i < g.input.size(); ++i)
            CHECK(std::abs(g.input[i] - grads_batch.input[b * g.input.size() + i]) < 1e-12);
    }
    CHECK(max_relative_error(w_sum, grads_batch.weights) < 1e-12);
    CHECK(max_relative_error(b_sum, grads_batch.bias) < 1e-12);
}

TEST_CASE("maxpool picks maxima and routes the gradient to them") {
    Tensor input({1, 2, 2}, (Tensor::Storage(4) << 1, 2, 3, 4).finished());
    Tensor out = maxpool2x2_forward(input);
    CHECK(out.shape() == std::vector<int>{1, 1, 1});
    CHECK(out[0] == doctest::Approx(4.0));

    Tensor upstream({1, 1, 1});
    upstream[0] = 2.5;
    Tensor grad = maxpool2x2_backward(upstream, input);
    CHECK(grad[0] == 0.0);
    CHECK(grad[1] == 0.0);
    CHECK(grad[2] == 0.0);
    CHECK(grad[3] == doctest::Approx(2.5));
}

TEST_CASE("maxpool drops odd trailing rows and columns") {
    Xoshiro256ss rng(9);
    Tensor input = random_tensor({2, 5, 7}, rng);
    Tensor out = maxpool2x2_forward(input);
    CHECK(out.shape() == std::vector<int>{2, 2, 3});
    CHECK_THROWS_AS(maxpool2x2_forward(Tensor({1, 1, 4})), ShapeMismatchError);
}

TEST_CASE("maxpool backward matches finite differences") {
    Xoshiro256ss rng(10);
    for (int trial = 0; trial < 20; ++trial) {
        Tensor input = random_tensor({2, 4, 4}, rng);
        // keep entries distinct so the max is stable under the fd step
        for (Eigen::Index i = 0; i < input.size(); ++i) input[i] += 1e-3 * static_cast<double>(i);
        Tensor upstream = random_upstream({2, 2, 2}, rng);
        Tensor analytic = maxpool2x2_backward(upstream, input);
        Tensor fd = finite_difference_gradient(
            [&](const Tensor& candidate) { return weighted_sum(maxpool2x2_forward(candidate), upstream); },
            input);
        CHECK(max_relative_error(analytic, fd) < 1e-4);
    }
}

TEST_CASE("dense identity weights with zero bias pass the input through") {
    Tensor input({4}, (Tensor::Storage(4) << 0.5, -1.0, 2.0, 3.5).finished());
    Tensor weights({4, 4});
    for (int i = 0; i < 4; ++i) weights[weights.idx2(i, i)] = 1.0;
    Tensor bias({4});
    Tensor out = dense_forward(input, weights, bias);
    for (int i = 0; i < 4; ++i) CHECK(out[i] == doctest::Approx(input[i]));
}

TEST_CASE("dense gradients match finite differences") {
    Xoshiro256ss rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        const int in_dim = 2 + rng.next_int(5);
        const int out_dim = 2 + rng.next_int(5);
        Tensor x = random_tensor({in_dim}, rng);
        Tensor weights = random_tensor({out_dim, in_dim}, rng);
        Tensor bias = random_tensor({out_dim}, rng);
        Tensor upstream = random_upstream({out_dim}, rng);
        auto analytic = dense_backward(upstream, x, weights);
        Tensor fd_w = finite_difference_gradient(
            [&](const Tensor& c) { return weighted_sum(dense_forward(x, c, bias), upstream); }, weights);
        Tensor fd_x = finite_difference_gradient(
            [&](const Tensor& c) { return weighted_sum(dense_forward(c, weights, bias), upstream); }, x);
        CHECK(max_relative_error(analytic.weights, fd_w) < 1e-4);
        CHECK(max_relative_error(analytic.input, fd_x) < 1e-4);
    }
}

TEST_CASE("relu and tanh definitions and gradients") {
    Tensor x({3}, (Tensor::Storage(3) << -1.0, 0.0, 2.0).finished());
    Tensor r = relu_forward(x);
    CHECK(r[0] == 0.0);
    CHECK(r[1] == 0.0);
    CHECK(r[2] == doctest::Approx(2.0));

    Xoshiro256ss rng(12);
    for (int trial = 0; trial < 20; ++trial) {
        Tensor input = random_tensor({6}, rng);
        // keep relu inputs away from the kink
        for (Eigen::Index i = 0; i < input.size(); ++i)
            if (std::abs(input[i]) < 0.05) input[i] = 0.1;
        Tensor upstream = random_upstream({6}, rng);
        Tensor fd_relu = finite_difference_gradient(
            [&](const Tensor& c) { return weighted_sum(relu_forward(c), upstream); }, input);
        CHECK(max_relative_error(relu_backward(upstream, input), fd_relu) < 1e-4);
        Tensor fd_tanh = finite_difference_gradient(
            [&](const Tensor& c) { return weighted_sum(tanh_forward(c), upstream); }, input);
        CHECK(max_relative_error(tanh_backward(upstream, input), fd_tanh) < 1e-4);
    }
}

TEST_CASE("flatten only reshapes") {
    Xoshiro256ss rng(13);
    Tensor x = random_tensor({2, 3, 4}, rng);
    Tensor f = flatten(x);
    CHECK(f.shape() == std::vector<int>{24});
    for (Eigen::Index i = 0; i < x.size(); ++i) CHECK(f[i] == x[i]);
}

TEST_CASE("softmax cross entropy: uniform logits give ln(K)") {
    Tensor logits({10});
    logits.fill(0.37);
    auto [loss, grad] = softmax_cross_entropy(logits, 3);
    CHECK(loss == doctest::Approx(std::log(10.0)).epsilon(1e-12));
    CHECK(grad[3] == doctest::Approx(0.1 - 1.0));
    CHECK(grad[0] == doctest::Approx(0.1));
}

TEST_CASE("softmax cross entropy is stable for extreme logits") {
    Tensor logits({2}, (Tensor::Storage(2) << 1000.0, 0.0).finished());
    auto [loss, grad] = softmax_cross_entropy(logits, 0);
    CHECK(std::isfinite(loss));
    CHECK(loss == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(std::isfinite(grad[0]));
    CHECK(std::isfinite(grad[1]));
}

TEST_CASE("softmax cross entropy rejects bad labels and tiny K") {
    Tensor logits({4});
    CHECK_THROWS_AS(softmax_cross_entropy(logits, 4), LabelOutOfRangeError);
    CHECK_THROWS_AS(softmax_cross_entropy(logits, -1), LabelOutOfRangeError);
    CHECK_THROWS_AS(softmax_cross_entropy(Tensor({1}), 0), ShapeMismatchError);
}

TEST_CASE("softmax gradient matches finite differences within 1e-6") {
    Xoshiro256ss rng(14);
    for (int trial = 0; trial < 20; ++trial) {
        const int k = 2 + rng.next_int(8);
        Tensor logits = random_tensor({k}, rng, -2.0, 2.0);
        const int label = rng.next_int(k);
        auto [loss, grad] = softmax_cross_entropy(logits, label);
        CHECK(loss >= 0.0);
        Tensor fd = finite_difference_gradient(
            [&](const Tensor& c) { return softmax_cross_entropy(c, label).first; }, logits);
        for (Eigen::Index i = 0; i < fd.size(); ++i) CHECK(std::abs(grad[i] - fd[i]) < 1e-6);
    }
}
