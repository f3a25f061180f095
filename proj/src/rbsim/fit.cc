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

#include "rbsim/fit.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>

#include "rbsim/twirl.h"

namespace rbsim {

DecayModel DecayModel::single_exp() {
    return {ModelKind::SingleExp, 1};
}

DecayModel DecayModel::direct_fidelity() {
    return {ModelKind::DirectFidelity, 1};
}

DecayModel DecayModel::multi_exp(size_t terms) {
    if (terms < 1 || terms > 3) {
        throw std::invalid_argument("Multi-exponential model supports 1 to 3 terms");
    }
    return {ModelKind::MultiExp, terms};
}

DecayModel DecayModel::power() {
    return {ModelKind::PowerModel, 1};
}

DecayModel DecayModel::parse(const std::string &name) {
    if (name == "single_exp") {
        return single_exp();
    }
    if (name == "direct_fidelity") {
        return direct_fidelity();
    }
    if (name == "power") {
        return power();
    }
    if (name.rfind("multi_exp:", 0) == 0 && name.size() == 11 && std::isdigit((unsigned char)name[10])) {
        return multi_exp((size_t)(name[10] - '0'));
    }
    throw std::invalid_argument("Unknown decay model '" + name + "'");
}

std::string DecayModel::name() const {
    switch (kind) {
        case ModelKind::SingleExp:
            return "single_exp";
        case ModelKind::DirectFidelity:
            return "direct_fidelity";
        case ModelKind::MultiExp:
            return "multi_exp:" + std::to_string(num_exponentials);
        case ModelKind::PowerModel:
            return "power";
    }
    return "?";
}

size_t DecayModel::num_params() const {
    switch (kind) {
        case ModelKind::SingleExp:
        case ModelKind::DirectFidelity:
            return 3;
        case ModelKind::MultiExp:
            return 1 + 2 * num_exponentials;
        case ModelKind::PowerModel:
            return 2;
    }
    return 0;
}

std::vector<std::string> DecayModel::param_names() const {
    switch (kind) {
        case ModelKind::SingleExp:
            return {"A", "p", "B"};
        case ModelKind::DirectFidelity:
            return {"A", "F", "B"};
        case ModelKind::MultiExp: {
            std::vector<std::string> names{"B"};
            for (size_t k = 1; k <= num_exponentials; k++) {
                names.push_back("A" + std::to_string(k));
                names.push_back("alpha" + std::to_string(k));
            }
            return names;
        }
        case ModelKind::PowerModel:
            return {"c", "q"};
    }
    return {};
}

std::vector<size_t> DecayModel::rate_params() const {
    switch (kind) {
        case ModelKind::SingleExp:
        case ModelKind::DirectFidelity:
        case ModelKind::PowerModel:
            return {1};
        case ModelKind::MultiExp: {
            std::vector<size_t> out;
            for (size_t k = 0; k < num_exponentials; k++) {
                out.push_back(2 + 2 * k);
            }
            return out;
        }
    }
    return {};
}

double DecayModel::eval(const std::vector<double> &x, double m) const {
    switch (kind) {
        case ModelKind::SingleExp:
            return x[0] * std::pow(x[1], m) + x[2];
        case ModelKind::DirectFidelity:
            return x[0] * std::pow(2 * x[1] - 1, m) + x[2];
        case ModelKind::MultiExp: {
            double v = x[0];
            for (size_t k = 0; k < num_exponentials; k++) {
                v += x[1 + 2 * k] * std::pow(x[2 + 2 * k], m);
            }
            return v;
        }
        case ModelKind::PowerModel:
            return x[0] * std::pow(x[1], m - 1);
    }
    return 0;
}

namespace {

// d/dr (a r^m) without 0 * inf at r = 0.
double power_slope(double amplitude, double rate, double m) {
    if (m == 0) {
        return 0;
    }
    return amplitude * m * std::pow(rate, m - 1);
}

}  // namespace

void DecayModel::gradient(const std::vector<double> &x, double m, std::vector<double> &g) const {
    g.assign(num_params(), 0.0);
    switch (kind) {
        case ModelKind::SingleExp:
            g[0] = std::pow(x[1], m);
            g[1] = power_slope(x[0], x[1], m);
            g[2] = 1;
            break;
        case ModelKind::DirectFidelity:
            g[0] = std::pow(2 * x[1] - 1, m);
            g[1] = 2 * power_slope(x[0], 2 * x[1] - 1, m);
            g[2] = 1;
            break;
        case ModelKind::MultiExp:
            g[0] = 1;
            for (size_t k = 0; k < num_exponentials; k++) {
                g[1 + 2 * k] = std::pow(x[2 + 2 * k], m);
                g[2 + 2 * k] = power_slope(x[1 + 2 * k], x[2 + 2 * k], m);
            }
            break;
        case ModelKind::PowerModel:
            g[0] = std::pow(x[1], m - 1);
            g[1] = power_slope(x[0], x[1], m - 1);
            break;
    }
}

double FitResult::param(const std::string &name) const {
    auto names = model.param_names();
    for (size_t k = 0; k < names.size(); k++) {
        if (names[k] == name) {
            return params[k];
        }
    }
    throw std::invalid_argument("No parameter named " + name);
}

double FitResult::stderr_of(const std::string &name) const {
    auto names = model.param_names();
    for (size_t k = 0; k < names.size(); k++) {
        if (names[k] == name) {
            return stderrs[k];
        }
    }
    throw std::invalid_argument("No parameter named " + name);
}

namespace {

constexpr double RATE_MIN = 1e-6;
constexpr double RATE_MAX = 1 - 1e-9;

double logistic(double u) {
    return 1 / (1 + std::exp(-u));
}

double logit(double p) {
    p = std::clamp(p, 1e-15, 1 - 1e-15);
    return std::log(p / (1 - p));
}

// Internal coordinates: rates as logits; the direct-fidelity slot stores logit(2F - 1).
struct Transform {
    DecayModel model;
    std::vector<bool> is_rate;
    bool fidelity_slot;

    explicit Transform(const DecayModel &m) : model(m), is_rate(m.num_params(), false) {
        for (auto k : m.rate_params()) {
            is_rate[k] = true;
        }
        fidelity_slot = m.kind == ModelKind::DirectFidelity;
    }

    std::vector<double> to_internal(const std::vector<double> &x) const {
        std::vector<double> u = x;
        for (size_t k = 0; k < x.size(); k++) {
            if (is_rate[k]) {
                u[k] = logit(fidelity_slot ? 2 * x[k] - 1 : x[k]);
            }
        }
        return u;
    }

    std::vector<double> to_natural(const std::vector<double> &u) const {
        std::vector<double> x = u;
        for (size_t k = 0; k < u.size(); k++) {
            if (is_rate[k]) {
                double s = logistic(u[k]);
                x[k] = fidelity_slot ? (1 + s) / 2 : s;
            }
        }
        return x;
    }

    // dx/du for each coordinate.
    std::vector<double> chain(const std::vector<double> &u) const {
        std::vector<double> c(u.size(), 1.0);
        for (size_t k = 0; k < u.size(); k++) {
            if (is_rate[k]) {
                double s = logistic(u[k]);
                c[k] = s * (1 - s) * (fidelity_slot ? 0.5 : 1.0);
            }
        }
        return c;
    }
};

struct Problem {
    const DecayModel &model;
    const std::vector<double> &m;
    const std::vector<double> &y;
    std::vector<double> inv_sigma;

    RealVector residuals(const std::vector<double> &x) const {
        RealVector r(m.size());
        for (size_t i = 0; i < m.size(); i++) {
            r[i] = (model.eval(x, m[i]) - y[i]) * inv_sigma[i];
        }
        return r;
    }

    RealMatrix natural_jacobian(const std::vector<double> &x) const {
        RealMatrix j(m.size(), model.num_params());
        std::vector<double> g;
        for (size_t i = 0; i < m.size(); i++) {
            model.gradient(x, m[i], g);
            for (size_t k = 0; k < g.size(); k++) {
                j(i, k) = g[k] * inv_sigma[i];
            }
        }
        return j;
    }
};

}  // namespace

std::vector<double> initial_guess(
    const DecayModel &model, const std::vector<double> &m, const std::vector<double> &y,
    std::optional<double> known_offset) {
    if (m.size() != y.size() || m.empty()) {
        throw std::invalid_argument("Lengths and values must be non-empty and the same size");
    }
    std::vector<size_t> order(m.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
        return m[a] < m[b];
    });
    size_t n = order.size();
    size_t tail = std::max<size_t>(1, (n + 2) / 3);

    double offset = 0;
    size_t usable_end = n;
    if (known_offset.has_value()) {
        offset = *known_offset;
    } else if (model.kind != ModelKind::PowerModel) {
        double acc = 0;
        for (size_t k = n - tail; k < n; k++) {
            acc += y[order[k]];
        }
        offset = acc / (double)tail;
        usable_end = n - tail;
    }

    double scale = 0;
    for (auto v : y) {
        scale = std::max(scale, std::abs(v));
    }
    double floor = 1e-12 * scale + 1e-15;

    // Log-linear regression over points above the floor that share the sign of the first residual.
    double first = y[order[0]] - offset;
    std::vector<std::pair<double, double>> pts;
    for (size_t k = 0; k < usable_end; k++) {
        double r = y[order[k]] - offset;
        if (std::abs(r) > floor && (r > 0) == (first > 0)) {
            pts.emplace_back(m[order[k]], std::log(std::abs(r)));
        }
    }
    double rate = 0.9;
    if (pts.size() >= 2) {
        double mx = 0, my = 0;
        for (auto &[a, b] : pts) {
            mx += a;
            my += b;
        }
        mx /= (double)pts.size();
        my /= (double)pts.size();
        double sxx = 0, sxy = 0;
        for (auto &[a, b] : pts) {
            sxx += (a - mx) * (a - mx);
            sxy += (a - mx) * (b - my);
        }
        if (sxx > 0) {
            rate = std::clamp(std::exp(sxy / sxx), RATE_MIN, RATE_MAX);
        }
    }
    double m0 = m[order[0]];
    double amplitude = std::abs(first) > floor ? first / std::pow(rate, m0) : 0.0;

    switch (model.kind) {
        case ModelKind::SingleExp:
            return {amplitude, rate, offset};
        case ModelKind::DirectFidelity:
            return {amplitude, (1 + rate) / 2, offset};
        case ModelKind::PowerModel:
            return {y[order[0]] / std::pow(rate, m0 - 1), rate};
        case ModelKind::MultiExp: {
            std::vector<double> x{offset};
            double terms = (double)model.num_exponentials;
            for (size_t k = 0; k < model.num_exponentials; k++) {
                double r = std::clamp(std::pow(rate, 1 + 0.5 * (double)k), RATE_MIN, RATE_MAX);
                x.push_back(amplitude * std::pow(rate, m0) / std::pow(r, m0) / terms);
                x.push_back(r);
            }
            return x;
        }
    }
    return {};
}

FitResult fit(const DecayModel &model, const std::vector<double> &m, const std::vector<double> &y, const FitOptions &options) {
    if (m.size() != y.size()) {
        throw std::invalid_argument("Lengths and values differ in size");
    }
    std::set<double> distinct(m.begin(), m.end());
    size_t k = model.num_params();
    if (distinct.size() < k + 1) {
        std::ostringstream ss;
        ss << model.name() << " needs at least " << k + 1 << " distinct lengths, got " << distinct.size();
        throw std::invalid_argument(ss.str());
    }
    for (size_t i = 0; i < m.size(); i++) {
        if (!std::isfinite(m[i]) || !std::isfinite(y[i])) {
            throw std::invalid_argument("Data contains non-finite values");
        }
    }

    Problem prob{model, m, y, std::vector<double>(m.size(), 1.0)};
    if (options.sigma.has_value()) {
        if (options.sigma->size() != m.size()) {
            throw std::invalid_argument("Sigma has the wrong size");
        }
        for (size_t i = 0; i < m.size(); i++) {
            double s = (*options.sigma)[i];
            if (!(s > 0)) {
                throw std::invalid_argument("Sigma entries must be positive");
            }
            prob.inv_sigma[i] = 1 / s;
        }
    }

    std::vector<double> start;
    if (options.initial.has_value()) {
        start = *options.initial;
    } else if (model.kind == ModelKind::MultiExp) {
        start = initial_guess(model, m, y);
        // Seed the terms around the single-exponential solution.
        try {
            auto single = fit(DecayModel::single_exp(), m, y, FitOptions{options.max_iterations, options.sigma, false, std::nullopt});
            if (single.converged) {
                double a = single.params[0], p = single.params[1];
                start[0] = single.params[2];
                double terms = (double)model.num_exponentials;
                for (size_t t = 0; t < model.num_exponentials; t++) {
                    start[2 + 2 * t] = std::clamp(p * (1 - 0.02 * (double)t), RATE_MIN, RATE_MAX);
                    start[1 + 2 * t] = a / terms;
                }
            }
        } catch (const std::invalid_argument &) {
        }
    } else {
        start = initial_guess(model, m, y);
    }
    if (start.size() != k) {
        throw std::invalid_argument("Initial parameter vector has the wrong size");
    }
    for (auto r : model.rate_params()) {
        double v = model.kind == ModelKind::DirectFidelity ? 2 * start[r] - 1 : start[r];
        if (!(v > 0 && v <= 1)) {
            start[r] = model.kind == ModelKind::DirectFidelity ? (1 + std::clamp(v, RATE_MIN, RATE_MAX)) / 2
                                                               : std::clamp(v, RATE_MIN, RATE_MAX);
        }
    }

    Transform tr(model);
    std::vector<double> u = tr.to_internal(start);
    std::vector<double> x = tr.to_natural(u);
    RealVector r = prob.residuals(x);
    double cost = r.squaredNorm();
    double y_scale = 0;
    for (size_t i = 0; i < y.size(); i++) {
        y_scale += y[i] * y[i] * prob.inv_sigma[i] * prob.inv_sigma[i];
    }
    double exact_tol = 1e-30 * (y_scale + 1e-300);

    FitResult res;
    res.model = model;
    res.num_points = m.size();
    double lambda = 1e-3;
    bool done = cost <= exact_tol;
    if (done) {
        res.converged = true;
        res.message = "exact fit at the initial guess";
    }
    size_t it = 0;
    while (!done && it < options.max_iterations) {
        it++;
        RealMatrix jn = prob.natural_jacobian(x);
        auto c = tr.chain(u);
        RealMatrix j = jn;
        for (size_t col = 0; col < k; col++) {
            j.col(col) *= c[col];
        }
        RealMatrix a = j.transpose() * j;
        RealVector g = j.transpose() * r;
        if (g.cwiseAbs().maxCoeff() <= 1e-15 * std::max(1.0, cost)) {
            res.converged = true;
            res.message = "gradient vanished";
            break;
        }
        bool accepted = false;
        while (!accepted) {
            RealMatrix damped = a;
            for (size_t d = 0; d < k; d++) {
                damped(d, d) += lambda * std::max(a(d, d), 1e-12);
            }
            RealVector step = damped.ldlt().solve(-g);
            std::vector<double> u_new = u;
            for (size_t d = 0; d < k; d++) {
                u_new[d] += step[d];
            }
            std::vector<double> x_new = tr.to_natural(u_new);
            RealVector r_new = prob.residuals(x_new);
            double cost_new = r_new.squaredNorm();
            if (std::isfinite(cost_new) && cost_new < cost) {
                double reduction = (cost - cost_new) / std::max(cost, 1e-300);
                double step_norm = step.norm();
                double u_norm = 0;
                for (auto v : u) {
                    u_norm += v * v;
                }
                u = u_new;
                x = x_new;
                r = r_new;
                cost = cost_new;
                lambda = std::max(lambda / 10, 1e-12);
                accepted = true;
                if (cost <= exact_tol) {
                    res.converged = true;
                    res.message = "residual at machine precision";
                    done = true;
                } else if (reduction < 1e-14 || step_norm <= 1e-12 * (std::sqrt(u_norm) + 1e-12)) {
                    res.converged = true;
                    res.message = "relative reduction below tolerance";
                    done = true;
                }
            } else {
                lambda *= 10;
                if (lambda > 1e16) {
                    // No downhill step exists at any damping: we are at a (possibly flat) minimum.
                    res.converged = g.cwiseAbs().maxCoeff() <= 1e-8 * std::max(1.0, std::sqrt(cost));
                    res.message = res.converged ? "no further decrease possible" : "damping limit reached";
                    done = true;
                    break;
                }
            }
        }
    }
    if (!done && !res.converged) {
        res.message = "iteration limit reached";
    }
    res.iterations = it;
    res.params = x;
    res.sum_sq_residuals = cost;

    // Covariance in natural parameters, rank-checked on the column-scaled normal matrix.
    RealMatrix jn = prob.natural_jacobian(x);
    RealMatrix normal = jn.transpose() * jn;
    RealVector col_norm(k);
    bool zero_column = false;
    for (size_t col = 0; col < k; col++) {
        col_norm[col] = std::sqrt(normal(col, col));
        if (!(col_norm[col] > 0)) {
            zero_column = true;
            col_norm[col] = 1;
        }
    }
    RealMatrix scaled = col_norm.cwiseInverse().asDiagonal() * normal * col_norm.cwiseInverse().asDiagonal();
    Eigen::SelfAdjointEigenSolver<RealMatrix> eig(scaled);
    RealVector ev = eig.eigenvalues();
    double ev_max = std::max(ev.maxCoeff(), 1e-300);
    res.rank_deficient = zero_column || ev.minCoeff() <= 1e-12 * ev_max;
    RealVector inv_ev(k);
    for (size_t d = 0; d < k; d++) {
        inv_ev[d] = ev[d] > 1e-12 * ev_max ? 1 / ev[d] : 0;
    }
    RealMatrix scaled_inv = eig.eigenvectors() * inv_ev.asDiagonal() * eig.eigenvectors().transpose();
    RealMatrix inv = col_norm.cwiseInverse().asDiagonal() * scaled_inv * col_norm.cwiseInverse().asDiagonal();
    double s2 = 1;
    if (!options.absolute_sigma) {
        s2 = m.size() > k ? cost / (double)(m.size() - k) : 0;
    }
    res.covariance = s2 * inv;
    res.stderrs.resize(k);
    for (size_t d = 0; d < k; d++) {
        res.stderrs[d] = std::sqrt(std::max(res.covariance(d, d), 0.0));
    }
    if (res.rank_deficient) {
        res.message += "; normal matrix is rank deficient, covariance uses a pseudo-inverse";
    }
    return res;
}

FidelityReport report_fidelity(const FitResult &fit, size_t d, bool rescale_single_qubit) {
    if (!fit.converged) {
        throw std::invalid_argument("Cannot report fidelity from an unconverged fit");
    }
    FidelityReport rep;
    rep.dim = d;
    double dd = (double)d;
    switch (fit.model.kind) {
        case ModelKind::SingleExp:
        case ModelKind::PowerModel: {
            rep.p = fit.params[1];
            rep.p_stderr = fit.stderrs[1];
            auto conv = fidelity_conversions(rep.p, d);
            rep.average_fidelity = conv.average_fidelity;
            rep.average_fidelity_stderr = rep.p_stderr * (dd - 1) / dd;
            break;
        }
        case ModelKind::DirectFidelity:
            if (d != 2) {
                throw std::invalid_argument("The direct-fidelity model is a single-qubit model");
            }
            rep.average_fidelity = fit.params[1];
            rep.average_fidelity_stderr = fit.stderrs[1];
            rep.p = 2 * rep.average_fidelity - 1;
            rep.p_stderr = 2 * rep.average_fidelity_stderr;
            break;
        case ModelKind::MultiExp:
            throw std::invalid_argument("Multi-exponential fits have no single average fidelity");
    }
    rep.average_fidelity_margin = 2 * rep.average_fidelity_stderr;
    rep.error_rate = 1 - rep.average_fidelity;
    rep.error_rate_stderr = rep.average_fidelity_stderr;
    if (rescale_single_qubit) {
        double pulses = mean_pulses_per_c1();
        rep.rescaled = true;
        rep.pulse_fidelity = single_qubit_rescale(rep.average_fidelity);
        rep.pulse_fidelity_stderr = rep.average_fidelity_stderr / pulses;
        rep.pulse_fidelity_margin = 2 * rep.pulse_fidelity_stderr;
    }
    return rep;
}

}  // namespace rbsim
