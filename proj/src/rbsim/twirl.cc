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

#include "rbsim/twirl.h"

#include <cmath>
#include <sstream>

namespace rbsim {

Ptm exhaustive_twirl(const Ptm &noise, const GateSetGroup &group) {
    if (noise.num_qubits != group.num_qubits) {
        throw std::invalid_argument("Noise and group act on different qubit counts");
    }
    size_t n = noise.dim();
    RealMatrix acc = RealMatrix::Zero(n, n);
    for (size_t k = 0; k < group.order(); k++) {
        RealMatrix c = group.ptms.empty() ? group.elements[k].to_ptm().mat : group.ptms[k];
        acc.noalias() += c.transpose() * noise.mat * c;
    }
    return Ptm(noise.num_qubits, acc / (double)group.order());
}

RealMatrix IrrepDecomposition::projector(size_t s) const {
    size_t n = liouville_dim(num_qubits);
    RealMatrix p = RealMatrix::Zero(n, n);
    for (auto k : subspaces.at(s).members) {
        p(k, k) = 1;
    }
    return p;
}

size_t IrrepDecomposition::subspace_of(size_t pauli_index) const {
    for (size_t s = 0; s < subspaces.size(); s++) {
        for (auto k : subspaces[s].members) {
            if (k == pauli_index) {
                return s;
            }
        }
    }
    throw std::invalid_argument("Pauli index not covered by the decomposition");
}

size_t IrrepDecomposition::index_of_label(const std::string &label) const {
    for (size_t s = 0; s < subspaces.size(); s++) {
        if (subspaces[s].label == label) {
            return s;
        }
    }
    throw std::invalid_argument("Unknown subspace label '" + label + "'");
}

IrrepDecomposition irrep_decomposition(GroupKind kind, size_t factors) {
    IrrepDecomposition dec;
    dec.kind = kind;
    dec.num_qubits = group_num_qubits(kind, factors);
    size_t n = liouville_dim(dec.num_qubits);
    switch (kind) {
        case GroupKind::C1:
        case GroupKind::C2: {
            dec.subspaces.push_back({"W0", {0}});
            Subspace rest{"W1", {}};
            for (size_t k = 1; k < n; k++) {
                rest.members.push_back(k);
            }
            dec.subspaces.push_back(rest);
            break;
        }
        case GroupKind::C1xC1:
        case GroupKind::C1Power: {
            size_t q = dec.num_qubits;
            dec.factors = q;
            for (size_t s = 0; s < ((size_t)1 << q); s++) {
                dec.subspaces.push_back({"W" + std::to_string(s), {}});
            }
            for (size_t k = 0; k < n; k++) {
                auto p = PauliString::from_index(q, k);
                size_t s = 0;
                for (size_t b = 0; b < q; b++) {
                    s = (s << 1) | (p.letters[b] != 0);
                }
                dec.subspaces[s].members.push_back(k);
            }
            break;
        }
        case GroupKind::C1xI:
        case GroupKind::IxC1: {
            dec.multiplicity_free = false;
            size_t twirled = kind == GroupKind::C1xI ? 0 : 1;
            const char *letters = "IXYZ";
            for (size_t other = 0; other < 4; other++) {
                for (int nontrivial = 0; nontrivial < 2; nontrivial++) {
                    Subspace s;
                    std::string other_letter(1, letters[other]);
                    std::string twirled_letter = nontrivial ? "s" : "I";
                    s.label = twirled == 1 ? other_letter + twirled_letter : twirled_letter + other_letter;
                    for (size_t j = nontrivial ? 1 : 0; j < (nontrivial ? 4u : 1u); j++) {
                        s.members.push_back(twirled == 1 ? 4 * other + j : 4 * j + other);
                    }
                    dec.subspaces.push_back(s);
                }
            }
            break;
        }
    }
    return dec;
}

AlphaSet projector_decompose(const Ptm &twirled, const IrrepDecomposition &dec) {
    if (twirled.num_qubits != dec.num_qubits) {
        throw std::invalid_argument("Channel and decomposition act on different qubit counts");
    }
    if (!twirled.is_trace_preserving(1e-10)) {
        throw std::invalid_argument("Twirled channel is not trace preserving");
    }
    const auto &group = cached_group(dec.kind, dec.factors);
    for (size_t k = 0; k < group.order(); k++) {
        RealMatrix c = group.ptms.empty() ? group.elements[k].to_ptm().mat : group.ptms[k];
        double err = (c * twirled.mat - twirled.mat * c).cwiseAbs().maxCoeff();
        if (err > 1e-8) {
            std::ostringstream ss;
            ss << "Channel does not commute with group element " << k << " (deviation " << err << "); twirl it first";
            throw std::invalid_argument(ss.str());
        }
    }
    AlphaSet out;
    size_t n = twirled.dim();
    RealMatrix rebuilt = RealMatrix::Zero(n, n);
    for (size_t s = 0; s < dec.subspaces.size(); s++) {
        RealMatrix p = dec.projector(s);
        double alpha = (p * twirled.mat).trace() / (double)dec.subspaces[s].dim();
        out.labels.push_back(dec.subspaces[s].label);
        out.values.push_back(alpha);
        rebuilt += alpha * p;
    }
    out.residual = (twirled.mat - rebuilt).cwiseAbs().maxCoeff();
    if (out.residual > 1e-8) {
        std::ostringstream ss;
        ss << "Twirled channel is not a combination of the " << group_name(dec.kind, dec.factors)
           << " subspace projectors (residual " << out.residual << ")";
        if (!dec.multiplicity_free) {
            ss << "; this group has repeated components, use the subsystem coefficient tables instead";
        }
        throw DecompositionError(ss.str(), out.residual);
    }
    return out;
}

namespace {

size_t pair_index(size_t twirled_qubit, size_t other, size_t twirled) {
    return twirled_qubit == 1 ? 4 * other + twirled : 4 * twirled + other;
}

}  // namespace

SubsystemTwirlTables subsystem_twirl_coefficients(const Ptm &noise, size_t twirled_qubit) {
    if (noise.num_qubits != 2 || twirled_qubit > 1) {
        throw std::invalid_argument("Subsystem twirl tables need a 2-qubit channel and twirled qubit 0 or 1");
    }
    SubsystemTwirlTables t;
    t.twirled_qubit = twirled_qubit;
    for (size_t k = 0; k < 4; k++) {
        for (size_t i = 0; i < 4; i++) {
            t.alpha0(k, i) = noise.mat(pair_index(twirled_qubit, k, 0), pair_index(twirled_qubit, i, 0));
            double acc = 0;
            for (size_t j = 1; j < 4; j++) {
                acc += noise.mat(pair_index(twirled_qubit, k, j), pair_index(twirled_qubit, i, j));
            }
            t.alpha1(k, i) = acc / 3;
        }
    }
    return t;
}

Ptm subsystem_twirl_matrix(const SubsystemTwirlTables &tables) {
    RealMatrix r = RealMatrix::Zero(16, 16);
    for (size_t k = 0; k < 4; k++) {
        for (size_t i = 0; i < 4; i++) {
            r(pair_index(tables.twirled_qubit, k, 0), pair_index(tables.twirled_qubit, i, 0)) = tables.alpha0(k, i);
            for (size_t j = 1; j < 4; j++) {
                r(pair_index(tables.twirled_qubit, k, j), pair_index(tables.twirled_qubit, i, j)) = tables.alpha1(k, i);
            }
        }
    }
    return Ptm(2, std::move(r));
}

FidelityConversion fidelity_conversions(double p, size_t d) {
    if (d < 2) {
        throw std::invalid_argument("Dimension must be at least 2");
    }
    double dd = (double)d;
    return {p + (1 - p) / dd, (1 - p) * (dd - 1) / dd};
}

double single_qubit_rescale(double average_fidelity) {
    return 1 - (1 - average_fidelity) / mean_pulses_per_c1();
}

double r_depol(const IrrepDecomposition &dec, size_t s, size_t pauli_index) {
    const auto &sub = dec.subspaces.at(s);
    double acc = 1;
    for (auto k : sub.members) {
        acc += anticommute_bit(dec.num_qubits, k, pauli_index) ? -1 : 1;
    }
    return acc / (double)(sub.dim() + 1);
}

double epsilon_upper_bound(const IrrepDecomposition &dec, size_t s) {
    double dim = (double)dec.subspaces.at(s).dim();
    return (dim + 1) / dim;
}

AlphaSet alpha_from_epsilon(const EpsilonSet &eps, const IrrepDecomposition &dec, const RdepolFunction &rdepol) {
    if (!dec.multiplicity_free) {
        throw std::invalid_argument("Weight parametrization needs a multiplicity-free decomposition");
    }
    size_t ns = dec.subspaces.size();
    if (eps.eps.size() != ns) {
        throw std::invalid_argument("Expected one weight per subspace");
    }
    for (size_t s = 1; s < ns; s++) {
        double hi = epsilon_upper_bound(dec, s);
        if (!(eps.eps[s] >= -1e-12 && eps.eps[s] <= hi + 1e-12)) {
            std::ostringstream ss;
            ss << "Weight for " << dec.subspaces[s].label << " = " << eps.eps[s] << " is outside [0, " << hi << "]";
            throw std::invalid_argument(ss.str());
        }
    }
    AlphaSet out;
    for (size_t t = 0; t < ns; t++) {
        size_t rep = dec.subspaces[t].members.front();
        double alpha = 1;
        for (size_t s = 1; s < ns; s++) {
            alpha *= 1 + eps.eps[s] * (rdepol(dec, s, rep) - 1);
        }
        out.labels.push_back(dec.subspaces[t].label);
        out.values.push_back(alpha);
    }
    return out;
}

EpsilonSet epsilon_from_alpha(const AlphaSet &alpha, const IrrepDecomposition &dec) {
    size_t ns = dec.subspaces.size();
    if (alpha.values.size() != ns) {
        throw std::invalid_argument("Expected one decay per subspace");
    }
    for (size_t s = 1; s < ns; s++) {
        if (!std::isfinite(alpha.values[s]) || alpha.values[s] == 0) {
            throw std::invalid_argument("Decays must be finite and nonzero to invert the weight parametrization");
        }
    }
    EpsilonSet out;
    out.eps.assign(ns, 0.0);
    if (ns == 2) {
        out.eps[1] = 1 - alpha.values[1];
        if (out.eps[1] < -1e-12 || out.eps[1] > epsilon_upper_bound(dec, 1) + 1e-12) {
            throw std::domain_error("no completely positive fixed-subspace weight set reproduces these decays");
        }
        return out;
    }
    if (ns != 4 || dec.num_qubits != 2) {
        throw std::invalid_argument("Weight inversion is implemented for one nontrivial subspace or two single-qubit factors");
    }
    double a1 = alpha.values[1], a2 = alpha.values[2], a3 = alpha.values[3];
    double ratio = a1 / a2;
    double disc = a2 * a2 + 3 * a3 / ratio;
    if (disc < 0) {
        throw std::domain_error("no real fixed-subspace weight set reproduces these decays");
    }
    double root = std::sqrt(disc);
    struct Candidate {
        double e1, e2, e3;
    };
    std::vector<Candidate> admissible;
    for (double y : {-a2 + root, -a2 - root}) {
        if (std::abs(y) < 1e-15) {
            continue;
        }
        Candidate c{1 - ratio * y, 1 - y, (5.0 / 6.0) * (1 - a2 / y)};
        double tol = 1e-12;
        bool ok = c.e1 >= -tol && c.e1 <= epsilon_upper_bound(dec, 1) + tol && c.e2 >= -tol &&
                  c.e2 <= epsilon_upper_bound(dec, 2) + tol && c.e3 >= -tol && c.e3 <= epsilon_upper_bound(dec, 3) + tol;
        if (ok) {
            admissible.push_back(c);
        }
    }
    if (admissible.empty()) {
        throw std::domain_error("no completely positive fixed-subspace weight set reproduces these decays");
    }
    if (admissible.size() == 2) {
        out.ambiguous_root = true;
        // A weight at the W3 bound only survives when nothing else is admissible.
        bool first_edge = std::abs(admissible[0].e3 - epsilon_upper_bound(dec, 3)) < 1e-12;
        bool second_edge = std::abs(admissible[1].e3 - epsilon_upper_bound(dec, 3)) < 1e-12;
        if (first_edge != second_edge) {
            admissible.erase(admissible.begin() + (first_edge ? 0 : 1));
        } else if (std::abs(admissible[1].e2) < std::abs(admissible[0].e2)) {
            admissible.erase(admissible.begin());
        }
    }
    out.eps[1] = admissible[0].e1;
    out.eps[2] = admissible[0].e2;
    out.eps[3] = admissible[0].e3;
    return out;
}

InterleavedEstimate interleaved_estimate(double p, double p_interleaved, size_t d) {
    if (p == 0) {
        throw std::invalid_argument("Reference decay must be nonzero");
    }
    if (!(p > 0 && p <= 1)) {
        throw std::invalid_argument("Reference decay must lie in (0, 1]");
    }
    double dd = (double)d;
    InterleavedEstimate e;
    e.error_rate = (dd - 1) * (1 - p_interleaved / p) / dd;
    e.bound_direct = (dd - 1) * (std::abs(p - p_interleaved / p) + (1 - p)) / dd;
    e.bound_quadratic =
        2 * (dd * dd - 1) * (1 - p) / (p * dd * dd) + 4 * std::sqrt(1 - p) * std::sqrt(dd * dd - 1) / p;
    e.bound = std::min(e.bound_direct, e.bound_quadratic);
    return e;
}

double alpha_correlation(const AlphaSet &alpha) {
    if (alpha.values.size() != 4) {
        throw std::invalid_argument("Correlation needs the four C1xC1 decays");
    }
    return alpha.values[3] - alpha.values[1] * alpha.values[2];
}

MonteCarloEstimate average_fidelity_monte_carlo(const Ptm &channel, size_t samples, RngStream &rng) {
    if (samples < 2) {
        throw std::invalid_argument("Need at least 2 samples");
    }
    size_t d = hilbert_dim(channel.num_qubits);
    double sum = 0, sum_sq = 0;
    for (size_t k = 0; k < samples; k++) {
        auto psi = vectorize(random_pure_state(d, rng));
        double f = psi.coeffs.dot(channel.mat * psi.coeffs);
        sum += f;
        sum_sq += f * f;
    }
    double mean = sum / (double)samples;
    double var = (sum_sq - sum * mean) / (double)(samples - 1);
    return {mean, std::sqrt(std::max(var, 0.0) / (double)samples)};
}

}  // namespace rbsim
