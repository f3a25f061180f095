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

#include "rbsim/noise.h"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace rbsim {

namespace {

constexpr double PROBABILITY_SUM_TOL = 1e-12;

void require_probability(double p, const char *name) {
    if (!(p >= 0 && p <= 1)) {
        std::ostringstream ss;
        ss << "probability " << name << " = " << p << " is outside [0, 1]";
        throw std::invalid_argument(ss.str());
    }
}

}  // namespace

ToyCrosstalkParams toy_crosstalk_for_experiment(int experiment, double p11, double p21, double p12, double p22, double p_zz) {
    ToyCrosstalkParams t;
    t.p11 = p11;
    t.p21 = p21;
    t.p12 = p12;
    t.p22 = p22;
    t.p_zz = p_zz;
    switch (experiment) {
        case 1:
            t.eps1 = 1;
            t.eps2 = 0;
            t.p01 = 1 - p11 - p21 - p_zz;
            break;
        case 2:
            t.eps1 = 0;
            t.eps2 = 1;
            t.p02 = 1 - p12 - p22 - p_zz;
            break;
        case 3: {
            t.eps1 = 1;
            t.eps2 = 1;
            double slack = 1 - p11 - p21 - p12 - p22 - p_zz;
            t.p01 = slack / 2;
            t.p02 = slack / 2;
            break;
        }
        default:
            throw std::invalid_argument("Experiment must be 1, 2 or 3");
    }
    return t;
}

NoiseModel NoiseModel::ideal(size_t num_qubits) {
    NoiseModel m;
    m.kind = NoiseKind::Ideal;
    m.num_qubits = num_qubits;
    return m;
}

NoiseModel NoiseModel::depolarizing(size_t num_qubits, double p) {
    NoiseModel m;
    m.kind = NoiseKind::Depolarizing;
    m.num_qubits = num_qubits;
    m.depolarizing_p = p;
    m.validate();
    return m;
}

NoiseModel NoiseModel::pauli_channel(size_t num_qubits, std::map<std::string, double> probs) {
    NoiseModel m;
    m.kind = NoiseKind::PauliChannel;
    m.num_qubits = num_qubits;
    m.pauli_probs = std::move(probs);
    m.validate();
    return m;
}

NoiseModel NoiseModel::toy_crosstalk(const ToyCrosstalkParams &params) {
    NoiseModel m;
    m.kind = NoiseKind::ToyCrosstalk;
    m.num_qubits = 2;
    m.toy = params;
    m.validate();
    return m;
}

NoiseModel NoiseModel::raw_kraus(std::vector<ComplexMatrix> ops) {
    if (ops.empty()) {
        throw std::invalid_argument("Kraus list is empty");
    }
    NoiseModel m;
    m.kind = NoiseKind::RawKraus;
    m.num_qubits = qubits_for_dim((size_t)ops[0].rows());
    m.kraus = std::move(ops);
    m.validate();
    return m;
}

void NoiseModel::validate() const {
    size_t d = hilbert_dim(num_qubits);
    switch (kind) {
        case NoiseKind::Ideal:
            return;
        case NoiseKind::Depolarizing: {
            double lo = -1.0 / (double)(d * d - 1);
            if (!(depolarizing_p >= lo && depolarizing_p <= 1)) {
                std::ostringstream ss;
                ss << "complete-positivity check failed: depolarizing p = " << depolarizing_p << " is outside [" << lo
                   << ", 1]";
                throw std::invalid_argument(ss.str());
            }
            return;
        }
        case NoiseKind::PauliChannel: {
            double total = 0;
            for (const auto &[label, q] : pauli_probs) {
                auto p = PauliString::from_str(label);
                if (p.num_qubits() != num_qubits) {
                    throw std::invalid_argument("Pauli label '" + label + "' has the wrong length");
                }
                require_probability(q, label.c_str());
                total += q;
            }
            if (std::abs(total - 1) > PROBABILITY_SUM_TOL) {
                std::ostringstream ss;
                ss.precision(17);
                ss << "trace-preservation check failed: Pauli probabilities sum to " << total;
                throw std::invalid_argument(ss.str());
            }
            return;
        }
        case NoiseKind::ToyCrosstalk: {
            if (num_qubits != 2) {
                throw std::invalid_argument("Crosstalk toy model acts on 2 qubits");
            }
            if ((toy.eps1 != 0 && toy.eps1 != 1) || (toy.eps2 != 0 && toy.eps2 != 1)) {
                throw std::invalid_argument("Crosstalk drive flags must be 0 or 1");
            }
            require_probability(toy.p01, "p01");
            require_probability(toy.p11, "p11");
            require_probability(toy.p21, "p21");
            require_probability(toy.p02, "p02");
            require_probability(toy.p12, "p12");
            require_probability(toy.p22, "p22");
            require_probability(toy.p_zz, "p_zz");
            double total =
                toy.eps1 * (toy.p01 + toy.p11 + toy.p21) + toy.eps2 * (toy.p02 + toy.p12 + toy.p22) + toy.p_zz;
            if (std::abs(total - 1) > PROBABILITY_SUM_TOL) {
                std::ostringstream ss;
                ss.precision(17);
                ss << "trace-preservation check failed: crosstalk weights sum to " << total;
                throw std::invalid_argument(ss.str());
            }
            return;
        }
        case NoiseKind::RawKraus: {
            for (const auto &k : kraus) {
                if ((size_t)k.rows() != d || (size_t)k.cols() != d) {
                    throw std::invalid_argument("Kraus operator has the wrong shape");
                }
            }
            Ptm r = ptm_from_kraus(kraus);
            if (!r.is_trace_preserving(1e-10)) {
                throw std::invalid_argument("trace-preservation check failed: sum K^dag K != I");
            }
            double min_ev = choi_min_eigenvalue(r);
            if (min_ev < -1e-8) {
                std::ostringstream ss;
                ss << "complete-positivity check failed: Choi eigenvalue " << min_ev;
                throw std::invalid_argument(ss.str());
            }
            return;
        }
    }
}

std::vector<double> NoiseModel::pauli_error_probabilities() const {
    size_t n = liouville_dim(num_qubits);
    std::vector<double> q(n, 0.0);
    switch (kind) {
        case NoiseKind::Ideal:
            q[0] = 1;
            break;
        case NoiseKind::Depolarizing: {
            double d2 = (double)n;
            for (size_t k = 0; k < n; k++) {
                q[k] = (1 - depolarizing_p) / d2;
            }
            q[0] += depolarizing_p;
            break;
        }
        case NoiseKind::PauliChannel:
            for (const auto &[label, p] : pauli_probs) {
                q[PauliString::from_str(label).index()] += p;
            }
            break;
        case NoiseKind::ToyCrosstalk: {
            auto idx = [](const char *s) {
                return PauliString::from_str(s).index();
            };
            q[idx("II")] += toy.eps1 * toy.p01 + toy.eps2 * toy.p02;
            q[idx("XI")] += toy.eps1 * toy.p11 + toy.eps2 * toy.p22;
            q[idx("IX")] += toy.eps1 * toy.p21 + toy.eps2 * toy.p12;
            q[idx("ZZ")] += toy.p_zz;
            break;
        }
        case NoiseKind::RawKraus:
            throw std::invalid_argument("Kraus noise has no Pauli error probabilities");
    }
    return q;
}

bool NoiseModel::is_pauli_diagonal() const {
    return kind != NoiseKind::RawKraus;
}

std::vector<ComplexMatrix> NoiseModel::kraus_operators() const {
    if (kind == NoiseKind::RawKraus) {
        return kraus;
    }
    std::vector<ComplexMatrix> ops;
    auto q = pauli_error_probabilities();
    for (size_t k = 0; k < q.size(); k++) {
        if (q[k] > 0) {
            ops.push_back(std::sqrt(q[k]) * pauli_matrix(PauliString::from_index(num_qubits, k)));
        }
    }
    return ops;
}

std::string NoiseModel::describe() const {
    std::ostringstream ss;
    switch (kind) {
        case NoiseKind::Ideal:
            ss << "ideal";
            break;
        case NoiseKind::Depolarizing:
            ss << "depolarizing(p=" << depolarizing_p << ")";
            break;
        case NoiseKind::PauliChannel:
            ss << "pauli{";
            for (const auto &[label, p] : pauli_probs) {
                ss << label << ":" << p << ",";
            }
            ss << "}";
            break;
        case NoiseKind::ToyCrosstalk:
            ss << "crosstalk(eps=" << toy.eps1 << toy.eps2 << ")";
            break;
        case NoiseKind::RawKraus:
            ss << "kraus[" << kraus.size() << "]";
            break;
    }
    return ss.str();
}

Ptm pauli_channel_ptm(size_t num_qubits, const std::vector<double> &probs) {
    size_t n = liouville_dim(num_qubits);
    if (probs.size() != n) {
        throw std::invalid_argument("Pauli probability vector has the wrong length");
    }
    RealMatrix r = RealMatrix::Zero(n, n);
    for (size_t j = 0; j < n; j++) {
        double lambda = 0;
        for (size_t k = 0; k < n; k++) {
            lambda += anticommute_bit(num_qubits, k, j) ? -probs[k] : probs[k];
        }
        r(j, j) = lambda;
    }
    return Ptm(num_qubits, std::move(r));
}

Ptm compile(const NoiseModel &model) {
    model.validate();
    if (model.kind == NoiseKind::Ideal) {
        return Ptm::identity(model.num_qubits);
    }
    if (model.kind == NoiseKind::RawKraus) {
        return ptm_from_kraus(model.kraus);
    }
    return pauli_channel_ptm(model.num_qubits, model.pauli_error_probabilities());
}

SpamModel SpamModel::ideal(size_t num_qubits) {
    return SpamModel{NoiseModel::ideal(num_qubits), NoiseModel::ideal(num_qubits)};
}

LiouvilleVector dress_state(const SpamModel &spam, const LiouvilleVector &state) {
    return apply(compile(spam.prep), state);
}

LiouvilleVector dress_effect(const SpamModel &spam, const LiouvilleVector &effect) {
    return apply(adjoint(compile(spam.meas)), effect);
}

}  // namespace rbsim
