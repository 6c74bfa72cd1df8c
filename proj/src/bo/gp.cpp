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

#include "archsel/bo/gp.hpp"

#include <Eigen/Cholesky>

#include <cmath>
#include <limits>
#include <numbers>

#include "archsel/core/errors.hpp"
#include "archsel/core/rng.hpp"

namespace archsel::bo {

namespace {

constexpr double kMinNugget = 1e-8;
constexpr double kMaxNugget = 1e-2;
constexpr double kMinSignalVariance = 1e-12;
constexpr double kMinLogLength = -3.0; // lengthscale box for the refinement, log10
constexpr double kMaxLogLength = 3.0;
constexpr std::uint64_t kFitSeed = 0x6A9F3C57D24B81EEULL; // fixed: gp_fit is a pure function of (x, y)

double correlation(KernelKind kind, double s) {
    // s = sum_j ((xi_j - xj_j) / l_j)^2
    switch (kind) {
        case KernelKind::SquaredExponential:
            return std::exp(-0.5 * s);
        case KernelKind::Matern52: {
            const double r = std::sqrt(5.0 * s);
            return (1.0 + r + 5.0 * s / 3.0) * std::exp(-r);
        }
    }
    return 0.0;
}

double scaled_sq_dist(const Eigen::VectorXd& a, const Eigen::VectorXd& b,
                      const Eigen::VectorXd& inv_ls) {
    return ((a - b).cwiseProduct(inv_ls)).squaredNorm();
}

Eigen::MatrixXd correlation_matrix(const Eigen::MatrixXd& x, KernelKind kind,
                                   const Eigen::VectorXd& length_scales, double nugget) {
    const int n = static_cast<int>(x.rows());
    const Eigen::VectorXd inv_ls = length_scales.cwiseInverse();
    Eigen::MatrixXd a(n, n);
    for (int i = 0; i < n; ++i) {
        a(i, i) = 1.0 + nugget;
        for (int j = i + 1; j < n; ++j) {
            const double c = correlation(kind, scaled_sq_dist(x.row(i), x.row(j), inv_ls));
            a(i, j) = c;
            a(j, i) = c;
        }
    }
    return a;
}

struct Standardized {
    Eigen::VectorXd y;
    double mean = 0.0;
    double scale = 1.0;
    bool constant = false;
};

Standardized standardize(const Eigen::VectorXd& y) {
    Standardized s;
    s.mean = y.mean();
    const double var = (y.array() - s.mean).square().mean();
    const double sd = std::sqrt(var);
    if (sd < 1e-300) {
        s.scale = 1.0;
        s.constant = true;
        s.y = Eigen::VectorXd::Zero(y.size());
    } else {
        s.scale = sd;
        s.y = (y.array() - s.mean) / sd;
    }
    return s;
}

/// Profiled log marginal likelihood of the standardized targets; the signal
/// variance maximizer sf2* = y' A^-1 y / n is substituted in closed form.
double profiled_lml(const Eigen::MatrixXd& x, const Eigen::VectorXd& y_std, KernelKind kind,
                    const Eigen::VectorXd& length_scales, double nugget, double* sf2_out = nullptr) {
    const int n = static_cast<int>(x.rows());
    Eigen::MatrixXd a = correlation_matrix(x, kind, length_scales, nugget);
    Eigen::LLT<Eigen::MatrixXd> llt(a);
    if (llt.info() != Eigen::Success) return -std::numeric_limits<double>::infinity();
    const Eigen::VectorXd u = llt.solve(y_std);
    const double quad = y_std.dot(u);
    const double sf2 = std::max(quad / static_cast<double>(n), kMinSignalVariance);
    if (sf2_out) *sf2_out = sf2;
    const double log_det = 2.0 * llt.matrixLLT().diagonal().array().log().sum();
    return -0.5 * n * std::log(sf2) - 0.5 * log_det - 0.5 * n -
           0.5 * n * std::log(2.0 * std::numbers::pi);
}

void check_inputs(const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
    if (x.rows() != y.size()) throw ConfigError("gp: x rows and y length differ");
    if (x.rows() < 2) throw ConfigError("gp needs at least 2 observations");
    if (!y.allFinite()) throw ConfigError("gp: targets must be finite");
    if (!x.allFinite()) throw ConfigError("gp: inputs must be finite");
}

} // namespace

std::string kernel_kind_name(KernelKind kind) {
    return kind == KernelKind::SquaredExponential ? "squared-exponential" : "matern52";
}

KernelKind kernel_kind_from_name(const std::string& name) {
    if (name == "squared-exponential" || name == "se") return KernelKind::SquaredExponential;
    if (name == "matern52") return KernelKind::Matern52;
    throw ConfigError("unknown kernel '" + name + "'");
}

double gp_log_marginal_likelihood(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, KernelKind kind,
                                  const Eigen::VectorXd& length_scales, double nugget) {
    check_inputs(x, y);
    return profiled_lml(x, standardize(y).y, kind, length_scales, nugget);
}

GpModel gp_build(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, KernelKind kind,
                 const Eigen::VectorXd& length_scales, double nugget) {
    check_inputs(x, y);
    if (length_scales.size() != x.cols()) throw ConfigError("gp_build: lengthscale count != dimension");
    if (!(length_scales.array() > 0.0).all()) throw ConfigError("gp_build: lengthscales must be > 0");

    if (nugget < 0.0) throw ConfigError("gp_build: nugget must be >= 0");
    Standardized std_y = standardize(y);
    double g = nugget;
    Eigen::LLT<Eigen::MatrixXd> llt;
    for (;;) {
        llt.compute(correlation_matrix(x, kind, length_scales, g));
        if (llt.info() == Eigen::Success) break;
        if (g >= kMaxNugget)
            throw SingularCovarianceError("covariance not positive definite even at nugget " +
                                          std::to_string(g));
        g = g <= 0.0 ? kMinNugget : std::min(g * 10.0, kMaxNugget);
    }

    GpModel m;
    m.kernel = kind;
    m.length_scales = length_scales;
    m.nugget = g;
    m.mean = std_y.mean;
    m.scale = std_y.scale;
    m.degenerate = std_y.constant;
    m.x = x;
    m.y_std = std_y.y;
    m.chol_lower = llt.matrixL();
    m.alpha = llt.solve(std_y.y);
    const double quad = std_y.y.dot(m.alpha);
    m.signal_variance = std::max(quad / static_cast<double>(x.rows()), kMinSignalVariance);
    const double log_det = 2.0 * m.chol_lower.diagonal().array().log().sum();
    m.log_marginal_likelihood = -0.5 * x.rows() * std::log(m.signal_variance) - 0.5 * log_det -
                                0.5 * x.rows() - 0.5 * x.rows() * std::log(2.0 * std::numbers::pi);
    return m;
}

GpModel gp_fit(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, KernelKind kind,
               const GpFitOptions& options) {
    check_inputs(x, y);
    const int d = static_cast<int>(x.cols());
    const Standardized std_y = standardize(y);
    const bool fit_nugget = options.fixed_nugget < 0.0;
    const int n_params = d + (fit_nugget ? 1 : 0);

    const double log_l_lo = std::log10(0.05), log_l_hi = std::log10(2.0);
    const double log_g_lo = std::log10(kMinNugget), log_g_hi = std::log10(kMaxNugget);

    auto lml_of = [&](const Eigen::VectorXd& theta) {
        Eigen::VectorXd ls(d);
        for (int j = 0; j < d; ++j) ls[j] = std::pow(10.0, theta[j]);
        const double g = fit_nugget ? std::pow(10.0, theta[d]) : options.fixed_nugget;
        return profiled_lml(x, std_y.y, kind, ls, g);
    };

    double best_lml = -std::numeric_limits<double>::infinity();
    Eigen::VectorXd best_theta = Eigen::VectorXd::Zero(n_params);
    bool have_best = false;

    const int starts = std::max(1, options.starts);
    for (int s = 0; s < starts; ++s) {
        Xoshiro256ss rng(derive_seed(kFitSeed, static_cast<std::uint64_t>(s)));
        Eigen::VectorXd theta(n_params);
        for (int j = 0; j < d; ++j) theta[j] = log_l_lo + rng.next_double() * (log_l_hi - log_l_lo);
        if (fit_nugget) theta[d] = log_g_lo + rng.next_double() * (log_g_hi - log_g_lo);

        double current = lml_of(theta);
        double step = 0.5;
        for (int round = 0; round < options.max_rounds && step >= 1e-3; ++round) {
            bool improved = false;
            for (int p = 0; p < n_params; ++p) {
                const double lo = p < d ? kMinLogLength : log_g_lo;
                const double hi = p < d ? kMaxLogLength : log_g_hi;
                const double original = theta[p];
                double best_coord = original;
                double best_value = current;
                for (const double candidate :
                     {std::clamp(original + step, lo, hi), std::clamp(original - step, lo, hi)}) {
                    if (candidate == original) continue;
                    theta[p] = candidate;
                    const double value = lml_of(theta);
                    if (value > best_value) {
                        best_value = value;
                        best_coord = candidate;
                    }
                }
                theta[p] = best_coord;
                if (best_value > current) {
                    current = best_value;
                    improved = true;
                }
            }
            if (!improved) step *= 0.5;
        }
        if (!have_best || current > best_lml) {
            best_lml = current;
            best_theta = theta;
            have_best = true;
        }
    }

    Eigen::VectorXd ls(d);
    for (int j = 0; j < d; ++j) ls[j] = std::pow(10.0, best_theta[j]);
    const double g = fit_nugget ? std::pow(10.0, best_theta[d]) : options.fixed_nugget;
    return gp_build(x, y, kind, ls, g);
}

GpPrediction gp_predict(const GpModel& model, const Eigen::VectorXd& x) {
    if (x.size() != model.dim()) throw ConfigError("gp_predict: dimension mismatch");
    if (model.degenerate) return {model.mean, 0.0};

    const Eigen::VectorXd inv_ls = model.length_scales.cwiseInverse();
    const int n = model.n();
    Eigen::VectorXd c(n);
    for (int i = 0; i < n; ++i)
        c[i] = correlation(model.kernel, scaled_sq_dist(model.x.row(i).transpose(), x, inv_ls));

    const double mu_std = c.dot(model.alpha);
    const Eigen::VectorXd v = model.chol_lower.triangularView<Eigen::Lower>().solve(c);
    const double var_std = model.signal_variance * (1.0 - v.squaredNorm());

    GpPrediction out;
    out.mean = model.mean + model.scale * mu_std;
    out.variance = std::max(0.0, model.scale * model.scale * var_std);
    return out;
}

} // namespace archsel::bo
