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

#ifndef ARCHSEL_BO_GP_HPP
#define ARCHSEL_BO_GP_HPP

#include <Eigen/Core>

#include <cstdint>
#include <string>

namespace archsel::bo {

enum class KernelKind { SquaredExponential, Matern52 };

std::string kernel_kind_name(KernelKind kind);
KernelKind kernel_kind_from_name(const std::string& name);

/// Fitted Kriging surrogate over the unit cube. Targets are standardized
/// internally (mean/scale stored); the covariance is
///   K = sf2 * (C(X; lengthscales) + nugget * I)
/// with C a unit-diagonal correlation matrix, so the nugget is relative to
/// the signal variance. chol_lower is the lower Cholesky factor of
/// C + nugget*I and alpha = (C + nugget*I)^-1 y_std; the sf2 factors cancel
/// in the posterior mean and reappear in the variance.
struct GpModel {
    KernelKind kernel = KernelKind::Matern52;
    Eigen::VectorXd length_scales;
    double signal_variance = 1.0; // sf2 in standardized space
    double nugget = 1e-8;         // relative, in [1e-8, 1e-2]
    double mean = 0.0;            // standardization constants of the raw targets
    double scale = 1.0;
    Eigen::MatrixXd x; // n x d training inputs
    Eigen::VectorXd y_std;
    Eigen::MatrixXd chol_lower;
    Eigen::VectorXd alpha;
    double log_marginal_likelihood = 0.0;
    bool degenerate = false; // constant targets: predicts (mean, 0) everywhere

    int dim() const { return static_cast<int>(x.cols()); }
    int n() const { return static_cast<int>(x.rows()); }
    /// Signal variance in raw target units.
    double signal_variance_raw() const { return scale * scale * signal_variance; }
};

struct GpFitOptions {
    int starts = 8;             // multistart count for the hyperparameter search
    double fixed_nugget = -1.0; // >= 0 pins the nugget instead of fitting it
    int max_rounds = 64;        // coordinate-descent rounds per start
};

/// Log marginal likelihood of (lengthscales, nugget) with the signal variance
/// profiled out in closed form; -inf when the correlation matrix cannot be
/// factorized. Exposed for the fit tests.
double gp_log_marginal_likelihood(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, KernelKind kind,
                                  const Eigen::VectorXd& length_scales, double nugget);

/// Builds a model at fixed hyperparameters (no fitting). Retries with the
/// nugget scaled x10 up to 1e-2 if the factorization fails, then throws
/// SingularCovarianceError.
GpModel gp_build(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, KernelKind kind,
                 const Eigen::VectorXd& length_scales, double nugget);

/// Maximum-likelihood fit: multistart coordinate descent in log10 space over
/// per-dimension lengthscales (started log-uniform in [0.05, 2]) and the
/// relative nugget (log-uniform in [1e-8, 1e-2]). Deterministic.
GpModel gp_fit(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, KernelKind kind,
               const GpFitOptions& options = {});

struct GpPrediction {
    double mean = 0.0;
    double variance = 0.0; // noise-free posterior variance, clamped at 0
};

GpPrediction gp_predict(const GpModel& model, const Eigen::VectorXd& x);

} // namespace archsel::bo

#endif
