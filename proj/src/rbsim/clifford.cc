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

#include "rbsim/clifford.h"

#include <cctype>
#include <cmath>
#include <deque>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>

namespace rbsim {

CliffordElement CliffordElement::identity(size_t num_qubits) {
    size_t n = liouville_dim(num_qubits);
    CliffordElement c;
    c.num_qubits = num_qubits;
    c.image.resize(n);
    c.sign.assign(n, 1);
    for (size_t j = 0; j < n; j++) {
        c.image[j] = (uint16_t)j;
    }
    return c;
}

CliffordElement CliffordElement::from_unitary(const ComplexMatrix &u) {
    if (u.rows() != u.cols()) {
        throw std::invalid_argument("Clifford unitary must be square");
    }
    size_t num_qubits = qubits_for_dim((size_t)u.rows());
    double d = (double)u.rows();
    if (!approx_equal(ComplexMatrix(u * u.adjoint()), ComplexMatrix::Identity(u.rows(), u.cols()), 1e-9)) {
        throw std::invalid_argument("Matrix is not unitary");
    }
    size_t n = liouville_dim(num_qubits);
    std::vector<ComplexMatrix> paulis;
    for (size_t k = 0; k < n; k++) {
        paulis.push_back(pauli_matrix(PauliString::from_index(num_qubits, k)));
    }
    CliffordElement c = identity(num_qubits);
    for (size_t j = 1; j < n; j++) {
        ComplexMatrix conj = u * paulis[j] * u.adjoint();
        bool found = false;
        for (size_t k = 1; k < n && !found; k++) {
            std::complex<double> overlap = hs_inner(paulis[k], conj) / d;
            if (std::abs(std::abs(overlap) - 1) < 1e-9) {
                if (std::abs(overlap.imag()) > 1e-9) {
                    throw std::invalid_argument("Unitary maps a Pauli to a non-Hermitian multiple of a Pauli");
                }
                c.image[j] = (uint16_t)k;
                c.sign[j] = overlap.real() > 0 ? 1 : -1;
                found = true;
            }
        }
        if (!found) {
            throw std::invalid_argument("Unitary is not a Clifford operation");
        }
    }
    return c;
}

Ptm CliffordElement::to_ptm() const {
    size_t n = image.size();
    RealMatrix r = RealMatrix::Zero(n, n);
    for (size_t j = 0; j < n; j++) {
        r(image[j], j) = sign[j];
    }
    return Ptm(num_qubits, std::move(r));
}

void CliffordElement::apply_to(const RealVector &in, RealVector &out) const {
    for (size_t j = 0; j < image.size(); j++) {
        out[image[j]] = sign[j] * in[j];
    }
}

bool CliffordElement::preserves_commutation() const {
    size_t n = image.size();
    for (size_t a = 1; a < n; a++) {
        for (size_t b = a + 1; b < n; b++) {
            if (anticommute_bit(num_qubits, a, b) != anticommute_bit(num_qubits, image[a], image[b])) {
                return false;
            }
        }
    }
    return true;
}

std::string CliffordElement::key() const {
    std::string k;
    k.reserve(image.size() * 3);
    for (size_t j = 1; j < image.size(); j++) {
        k.push_back((char)(image[j] & 0xFF));
        k.push_back((char)(image[j] >> 8));
        k.push_back((char)sign[j]);
    }
    return k;
}

CliffordElement compose(const CliffordElement &second, const CliffordElement &first) {
    if (second.num_qubits != first.num_qubits) {
        throw std::invalid_argument("Cannot compose Cliffords on different qubit counts");
    }
    CliffordElement c = first;
    for (size_t j = 0; j < first.image.size(); j++) {
        size_t mid = first.image[j];
        c.image[j] = second.image[mid];
        c.sign[j] = (int8_t)(first.sign[j] * second.sign[mid]);
    }
    return c;
}

CliffordElement inverse(const CliffordElement &c) {
    CliffordElement inv = c;
    for (size_t j = 0; j < c.image.size(); j++) {
        inv.image[c.image[j]] = (uint16_t)j;
        inv.sign[c.image[j]] = c.sign[j];
    }
    return inv;
}

CliffordElement sequence_inverse(std::span<const CliffordElement> sequence) {
    if (sequence.empty()) {
        throw std::invalid_argument("Cannot invert an empty sequence");
    }
    CliffordElement total = CliffordElement::identity(sequence[0].num_qubits);
    for (const auto &g : sequence) {
        total = compose(g, total);
    }
    return inverse(total);
}

std::string group_name(GroupKind kind, size_t factors) {
    switch (kind) {
        case GroupKind::C1:
            return "C1";
        case GroupKind::C2:
            return "C2";
        case GroupKind::C1xI:
            return "C1xI";
        case GroupKind::IxC1:
            return "IxC1";
        case GroupKind::C1xC1:
            return "C1xC1";
        case GroupKind::C1Power:
            return "C1^" + std::to_string(factors);
    }
    return "?";
}

std::pair<GroupKind, size_t> parse_group_name(const std::string &name) {
    if (name == "C1") {
        return {GroupKind::C1, 1};
    }
    if (name == "C2") {
        return {GroupKind::C2, 1};
    }
    if (name == "C1xI") {
        return {GroupKind::C1xI, 1};
    }
    if (name == "IxC1") {
        return {GroupKind::IxC1, 1};
    }
    if (name == "C1xC1") {
        return {GroupKind::C1xC1, 2};
    }
    if (name.rfind("C1^", 0) == 0 && name.size() == 4 && name[3] >= '1' && name[3] <= '3') {
        return {GroupKind::C1Power, (size_t)(name[3] - '0')};
    }
    throw std::invalid_argument("Unknown gate-set group '" + name + "'");
}

std::optional<size_t> GateSetGroup::index_of(const CliffordElement &element) const {
    if (element.num_qubits != num_qubits) {
        return std::nullopt;
    }
    auto it = lookup.find(element.key());
    if (it == lookup.end()) {
        return std::nullopt;
    }
    return it->second;
}

GateSetGroup generate_closure(
    GroupKind kind, size_t num_qubits, std::span<const CliffordElement> generators, size_t max_order) {
    GateSetGroup group;
    group.kind = kind;
    group.num_qubits = num_qubits;
    auto id = CliffordElement::identity(num_qubits);
    group.lookup.emplace(id.key(), 0);
    group.elements.push_back(id);
    std::deque<size_t> frontier{0};
    while (!frontier.empty()) {
        size_t cur = frontier.front();
        frontier.pop_front();
        for (const auto &g : generators) {
            if (g.num_qubits != num_qubits) {
                throw std::invalid_argument("Generator acts on the wrong number of qubits");
            }
            auto next = compose(g, group.elements[cur]);
            auto [it, inserted] = group.lookup.emplace(next.key(), group.elements.size());
            if (inserted) {
                group.elements.push_back(std::move(next));
                frontier.push_back(group.elements.size() - 1);
                if (group.elements.size() > max_order) {
                    throw std::runtime_error("Group closure exceeded the order limit");
                }
            }
        }
    }
    // Dense copies get large past two qubits (C1^3 would need ~450 MB).
    if (num_qubits <= 2) {
        group.ptms.reserve(group.elements.size());
        for (const auto &e : group.elements) {
            group.ptms.push_back(e.to_ptm().mat);
        }
    }
    return group;
}

size_t group_num_qubits(GroupKind kind, size_t factors) {
    switch (kind) {
        case GroupKind::C1:
            return 1;
        case GroupKind::C2:
        case GroupKind::C1xI:
        case GroupKind::IxC1:
        case GroupKind::C1xC1:
            return 2;
        case GroupKind::C1Power:
            if (factors < 1 || factors > 3) {
                throw std::invalid_argument("C1^k supports k in 1..3");
            }
            return factors;
    }
    throw std::invalid_argument("Unknown group kind");
}

std::vector<CliffordElement> group_generators(GroupKind kind, size_t factors) {
    size_t n = group_num_qubits(kind, factors);
    auto h = hadamard_unitary();
    auto s = phase_unitary();
    auto on = [&](const ComplexMatrix &u, size_t q) {
        return CliffordElement::from_unitary(embed_single_qubit(u, q, n));
    };
    std::vector<CliffordElement> gens;
    switch (kind) {
        case GroupKind::C1:
            gens = {on(h, 0), on(s, 0)};
            break;
        case GroupKind::C2:
            gens = {on(h, 0), on(h, 1), on(s, 0), on(s, 1), CliffordElement::from_unitary(cnot_unitary())};
            break;
        case GroupKind::C1xI:
            gens = {on(h, 0), on(s, 0)};
            break;
        case GroupKind::IxC1:
            gens = {on(h, 1), on(s, 1)};
            break;
        case GroupKind::C1xC1:
        case GroupKind::C1Power:
            for (size_t q = 0; q < n; q++) {
                gens.push_back(on(h, q));
                gens.push_back(on(s, q));
            }
            break;
    }
    return gens;
}

GateSetGroup generate_group(GroupKind kind, size_t factors) {
    auto gens = group_generators(kind, factors);
    auto group = generate_closure(kind, group_num_qubits(kind, factors), gens);
    group.factors = kind == GroupKind::C1Power ? factors : 1;
    return group;
}

const GateSetGroup &cached_group(GroupKind kind, size_t factors) {
    static std::mutex mu;
    static std::map<std::pair<int, size_t>, std::unique_ptr<GateSetGroup>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto key = std::make_pair((int)kind, kind == GroupKind::C1Power ? factors : (size_t)1);
    auto &slot = cache[key];
    if (!slot) {
        slot = std::make_unique<GateSetGroup>(generate_group(kind, factors));
    }
    return *slot;
}

std::vector<size_t> sample_indices(const GateSetGroup &group, RngStream &rng, size_t m) {
    if (m == 0) {
        throw std::invalid_argument("Sequence length must be at least 1");
    }
    std::vector<size_t> out(m);
    for (auto &k : out) {
        k = (size_t)rng.below(group.order());
    }
    return out;
}

std::vector<CliffordElement> sample_uniform(const GateSetGroup &group, RngStream &rng, size_t m) {
    std::vector<CliffordElement> out;
    for (auto k : sample_indices(group, rng, m)) {
        out.push_back(group.elements[k]);
    }
    return out;
}

ComplexMatrix hadamard_unitary() {
    ComplexMatrix h(2, 2);
    h << 1, 1, 1, -1;
    return h / std::sqrt(2.0);
}

ComplexMatrix phase_unitary() {
    ComplexMatrix s(2, 2);
    s << 1, 0, 0, std::complex<double>(0, 1);
    return s;
}

ComplexMatrix cnot_unitary() {
    ComplexMatrix c = ComplexMatrix::Zero(4, 4);
    c(0, 0) = 1;
    c(1, 1) = 1;
    c(2, 3) = 1;
    c(3, 2) = 1;
    return c;
}

ComplexMatrix embed_single_qubit(const ComplexMatrix &u, size_t qubit, size_t num_qubits) {
    if (qubit >= num_qubits) {
        throw std::invalid_argument("Qubit index out of range");
    }
    ComplexMatrix result = ComplexMatrix::Identity(1, 1);
    for (size_t q = 0; q < num_qubits; q++) {
        ComplexMatrix factor = q == qubit ? u : ComplexMatrix::Identity(2, 2);
        ComplexMatrix next(result.rows() * 2, result.cols() * 2);
        for (Eigen::Index r = 0; r < result.rows(); r++) {
            for (Eigen::Index c = 0; c < result.cols(); c++) {
                next.block(2 * r, 2 * c, 2, 2) = result(r, c) * factor;
            }
        }
        result = std::move(next);
    }
    return result;
}

const std::vector<std::vector<Rotation>> &c1_pulse_table() {
    static const std::vector<std::vector<Rotation>> table = {
        {},
        {{'Y', 1}, {'X', 1}},
        {{'X', -1}, {'Y', -1}},
        {{'X', 2}},
        {{'Y', -1}, {'X', -1}},
        {{'X', 1}, {'Y', -1}},
        {{'Y', 2}},
        {{'Y', -1}, {'X', 1}},
        {{'X', 1}, {'Y', 1}},
        {{'X', 2}, {'Y', 2}},
        {{'Y', 1}, {'X', -1}},
        {{'X', -1}, {'Y', 1}},
        {{'Y', 1}, {'X', 2}},
        {{'X', -1}},
        {{'X', 1}, {'Y', -1}, {'X', -1}},
        {{'Y', -1}},
        {{'X', 1}},
        {{'X', 1}, {'Y', 1}, {'X', 1}},
        {{'Y', -1}, {'X', 2}},
        {{'X', 1}, {'Y', 2}},
        {{'X', 1}, {'Y', -1}, {'X', 1}},
        {{'Y', 1}},
        {{'X', -1}, {'Y', 2}},
        {{'X', 1}, {'Y', 1}, {'X', -1}},
    };
    return table;
}

ComplexMatrix c1_table_unitary(size_t row) {
    const auto &table = c1_pulse_table();
    if (row < 1 || row > table.size()) {
        throw std::invalid_argument("Pulse-table row must be in 1..24");
    }
    ComplexMatrix u = ComplexMatrix::Identity(2, 2);
    for (const auto &pulse : table[row - 1]) {
        double half_angle = pulse.quarter_turns * M_PI / 4;
        ComplexMatrix sigma = pauli_matrix(PauliString::from_str(std::string(1, pulse.axis)));
        ComplexMatrix r = std::cos(half_angle) * ComplexMatrix::Identity(2, 2) -
                          std::complex<double>(0, std::sin(half_angle)) * sigma;
        u = r * u;
    }
    return u;
}

double mean_pulses_per_c1() {
    const auto &table = c1_pulse_table();
    size_t total = 0;
    for (const auto &row : table) {
        total += std::max<size_t>(row.size(), 1);
    }
    return (double)total / (double)table.size();
}

ComplexMatrix named_gate_unitary(const std::string &name, size_t num_qubits) {
    if (name.rfind("c1row:", 0) == 0) {
        if (num_qubits != 1) {
            throw std::invalid_argument("Pulse-table gates act on one qubit");
        }
        return c1_table_unitary((size_t)std::stoul(name.substr(6)));
    }
    if (name == "CNOT" || name == "CZ" || name == "SWAP") {
        if (num_qubits != 2) {
            throw std::invalid_argument(name + " needs a 2-qubit register");
        }
        if (name == "CNOT") {
            return cnot_unitary();
        }
        ComplexMatrix u = ComplexMatrix::Identity(4, 4);
        if (name == "CZ") {
            u(3, 3) = -1;
        } else {
            u.setZero();
            u(0, 0) = u(3, 3) = u(1, 2) = u(2, 1) = 1;
        }
        return u;
    }
    std::string base = name;
    size_t qubit = 0;
    if (!base.empty() && std::isdigit((unsigned char)base.back())) {
        qubit = (size_t)(base.back() - '0');
        base.pop_back();
    }
    using C = std::complex<double>;
    ComplexMatrix u(2, 2);
    if (base == "I") {
        u = ComplexMatrix::Identity(2, 2);
    } else if (base == "X" || base == "Y" || base == "Z") {
        u = pauli_matrix(PauliString::from_str(base));
    } else if (base == "H") {
        u = hadamard_unitary();
    } else if (base == "S") {
        u = phase_unitary();
    } else if (base == "SDG") {
        u = phase_unitary().adjoint();
    } else if (base == "SX") {
        u << C(0.5, 0.5), C(0.5, -0.5), C(0.5, -0.5), C(0.5, 0.5);
    } else {
        throw std::invalid_argument("Unknown gate name '" + name + "'");
    }
    return embed_single_qubit(u, qubit, num_qubits);
}

}  // namespace rbsim
