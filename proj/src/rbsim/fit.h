// Copyright 2026 The rbsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef RBSIM_FIT_H
#define RBSIM_FIT_H

#include <optional>
#include <string>
#include <vector>

#include "rbsim/pauli.h"

namespace rbsim {

enum class ModelKind {
    /// A p^m + B
    SingleExp,
    /// A (2F - 1)^m + B, a single-qubit model fitted directly in the average fidelity F.
    DirectFidelity,
    /// B + sum_k A_k alpha_k^m with 1 to 3 terms.
    MultiExp,
    /// c q^(m - 1)
    PowerModel,
};

struct DecayModel {
    ModelKind kind = ModelKind::SingleExp;
    size_t num_exponentials = 1;

    static DecayModel single_exp();
    static DecayModel direct_fidelity();
    static DecayModel multi_exp(size_t terms);
    static DecayModel power();
    /// Accepts "single_exp", "direct_fidelity", "multi_exp:<k>" and "power".
    static DecayModel parse(const std::string &name);
    std::string name() const;

    size_t num_params() const;
    std::vector<std::string> param_names() const;
    /// Indices of parameters constrained to (0, 1].
    std::vector<size_t> rate_params() const;
    double eval(const std::vector<double> &params, double m) const;
    /// Gradient of eval with respect to the natural parameters.
    void gradient(const std::vector<double> &params, double m, std::vector<double> &out) const;
};

struct FitOptions {
    size_t max_iterations = 500;
    /// Per-point standard deviations; residuals are divided by them.
    std::optional<std::vector<double>> sigma;
    /// When set, the covariance is (J^T W J)^-1 without rescaling by the residual variance.
    bool absolute_sigma = false;
    std::optional<std::vector<double>> initial;
};

struct FitResult {
    DecayModel model;
    std::vector<double> params;
    std::vector<double> stderrs;
    RealMatrix covariance;
    double sum_sq_residuals = 0;
    size_t num_points = 0;
    size_t iterations = 0;
    bool converged = false;
    bool rank_deficient = false;
    std::string message;

    double param(const std::string &name) const;
    double stderr_of(const std::string &name) const;
};

/// Seeds for the optimizer. B is the mean of the largest-m third of the data (or `known_offset`),
/// the rate comes from a log-linear fit of |y - B| and is clamped to (1e-6, 1 - 1e-9); when every
/// point sits at the noise floor the rate defaults to 0.9.
std::vector<double> initial_guess(
    const DecayModel &model, const std::vector<double> &m, const std::vector<double> &y,
    std::optional<double> known_offset = std::nullopt);

/// Levenberg-Marquardt least squares with analytic Jacobians. Rates live on a logistic scale during the
/// search so every iterate satisfies the bounds. Never throws on non-convergence; check `converged`.
/// Throws std::invalid_argument when there are fewer than num_params + 1 distinct lengths.
FitResult fit(const DecayModel &model, const std::vector<double> &m, const std::vector<double> &y, const FitOptions &options = {});

struct FidelityReport {
    size_t dim = 2;
    double p = 0;
    double p_stderr = 0;
    double average_fidelity = 0;
    double average_fidelity_stderr = 0;
    /// Two standard errors.
    double average_fidelity_margin = 0;
    double error_rate = 0;
    double error_rate_stderr = 0;
    bool rescaled = false;
    double pulse_fidelity = 0;
    double pulse_fidelity_stderr = 0;
    double pulse_fidelity_margin = 0;
};

/// Converts a converged fit to average fidelity and error rate. Throws std::invalid_argument for
/// unconverged fits, multi-exponential models, or DirectFidelity with d != 2.
FidelityReport report_fidelity(const FitResult &fit, size_t d, bool rescale_single_qubit = false);

}  // namespace rbsim

#endif
