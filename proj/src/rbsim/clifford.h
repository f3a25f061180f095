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

#ifndef RBSIM_CLIFFORD_H
#define RBSIM_CLIFFORD_H

#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "rbsim/liouville.h"
#include "rbsim/random.h"

namespace rbsim {

/// A Clifford operation stored as its conjugation action on Pauli indices:
/// U sigma_j U^dag = sign[j] * sigma_{image[j]}. Slot 0 (the identity) is always fixed.
struct CliffordElement {
    size_t num_qubits = 0;
    std::vector<uint16_t> image;
    std::vector<int8_t> sign;

    static CliffordElement identity(size_t num_qubits);
    /// Throws std::invalid_argument when U does not map Paulis to signed Paulis.
    static CliffordElement from_unitary(const ComplexMatrix &u);

    Ptm to_ptm() const;
    /// out = R(this) * in, exploiting the signed-permutation structure.
    void apply_to(const RealVector &in, RealVector &out) const;
    bool preserves_commutation() const;
    /// Key used for hashing and equality lookups.
    std::string key() const;

    bool operator==(const CliffordElement &other) const = default;
};

/// The element that applies `first` and then `second`.
CliffordElement compose(const CliffordElement &second, const CliffordElement &first);
CliffordElement inverse(const CliffordElement &c);
/// Inverse of a whole circuit whose first-applied gate is sequence[0]. Throws on an empty sequence.
CliffordElement sequence_inverse(std::span<const CliffordElement> sequence);

enum class GroupKind {
    C1,
    C2,
    /// Single-qubit Cliffords on qubit 0 of a 2-qubit register.
    C1xI,
    /// Single-qubit Cliffords on qubit 1 of a 2-qubit register.
    IxC1,
    C1xC1,
    /// Independent single-qubit Cliffords on each of `factors` qubits.
    C1Power,
};

std::string group_name(GroupKind kind, size_t factors = 1);
/// Accepts "C1", "C2", "C1xI", "IxC1", "C1xC1" and "C1^k".
std::pair<GroupKind, size_t> parse_group_name(const std::string &name);

struct GateSetGroup {
    GroupKind kind = GroupKind::C1;
    size_t num_qubits = 0;
    size_t factors = 1;
    std::vector<CliffordElement> elements;
    /// Dense PTMs parallel to `elements`; only filled for groups on at most 2 qubits.
    std::vector<RealMatrix> ptms;

    size_t order() const {
        return elements.size();
    }
    std::optional<size_t> index_of(const CliffordElement &element) const;

    std::unordered_map<std::string, size_t> lookup;
};

/// Breadth-first closure of `generators` under composition, identity first.
/// Throws std::runtime_error if the closure exceeds `max_order` elements.
GateSetGroup generate_closure(
    GroupKind kind, size_t num_qubits, std::span<const CliffordElement> generators, size_t max_order = 1 << 20);
std::vector<CliffordElement> group_generators(GroupKind kind, size_t factors = 1);
size_t group_num_qubits(GroupKind kind, size_t factors = 1);
GateSetGroup generate_group(GroupKind kind, size_t factors = 1);
/// Process-wide cache of generated groups. Safe to call from several threads.
const GateSetGroup &cached_group(GroupKind kind, size_t factors = 1);

/// m independent uniform draws of element indices. Throws std::invalid_argument when m == 0.
std::vector<size_t> sample_indices(const GateSetGroup &group, RngStream &rng, size_t m);
std::vector<CliffordElement> sample_uniform(const GateSetGroup &group, RngStream &rng, size_t m);

ComplexMatrix hadamard_unitary();
ComplexMatrix phase_unitary();
/// CNOT with qubit 0 as control.
ComplexMatrix cnot_unitary();
/// Embeds a single-qubit unitary on `qubit` of an n-qubit register.
ComplexMatrix embed_single_qubit(const ComplexMatrix &u, size_t qubit, size_t num_qubits);

/// One physical pulse: rotation about X or Y by quarter_turns * pi/2.
struct Rotation {
    char axis;
    int quarter_turns;
};

/// Single-qubit Clifford table as pulse sequences, 24 rows. The identity row is one (empty) pulse.
const std::vector<std::vector<Rotation>> &c1_pulse_table();
/// Unitary of a table row (1-based), pulses applied left to right.
ComplexMatrix c1_table_unitary(size_t row);
/// Mean pulses per table row with the identity counted as one pulse.
double mean_pulses_per_c1();

/// Named gates for interleaving targets: I X Y Z H S SDG SX on one qubit as "H" or "H1"
/// (suffix is the qubit), "CNOT", "CZ", "SWAP", or "c1row:<k>" for a pulse-table row.
ComplexMatrix named_gate_unitary(const std::string &name, size_t num_qubits);

}  // namespace rbsim

#endif
