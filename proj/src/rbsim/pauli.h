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

#ifndef RBSIM_PAULI_H
#define RBSIM_PAULI_H

#include <complex>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace rbsim {

using ComplexMatrix = Eigen::MatrixXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

/// Largest register handled anywhere in the library.
constexpr size_t MAX_QUBITS = 4;

/// Tensor product of single-qubit Paulis. Letters are 0=I, 1=X, 2=Y, 3=Z.
///
/// Qubit 0 is the leftmost tensor factor and the most significant base-4 digit of index(),
/// so the index ordering agrees with the Kronecker product ordering of matrices.
struct PauliString {
    std::vector<uint8_t> letters;

    PauliString() = default;
    explicit PauliString(std::vector<uint8_t> letters);

    static PauliString identity(size_t num_qubits);
    static PauliString from_index(size_t num_qubits, size_t index);
    /// Parses strings like "XZ" or "I_Y". Both 'I' and '_' denote identity.
    static PauliString from_str(std::string_view text);

    size_t num_qubits() const {
        return letters.size();
    }
    size_t index() const;
    /// Number of non-identity letters.
    size_t weight() const;
    /// Bitmask of qubits with non-identity letters; bit q is qubit q.
    uint32_t support_mask() const;
    std::string str() const;

    bool operator==(const PauliString &other) const = default;
};

/// True when the two Pauli strings commute.
bool commutes(const PauliString &a, const PauliString &b);
/// Commutation by index, avoiding allocation. Returns 0 when commuting, 1 otherwise.
int anticommute_bit(size_t num_qubits, size_t a, size_t b);

/// Unnormalized Pauli matrix (entries in {0, +-1, +-i}).
ComplexMatrix pauli_matrix(const PauliString &p);
/// Pauli matrix divided by sqrt(2^n), so the basis is Hilbert-Schmidt orthonormal.
ComplexMatrix normalized_pauli_matrix(const PauliString &p);

/// 2^n, throwing std::invalid_argument past MAX_QUBITS.
size_t hilbert_dim(size_t num_qubits);
/// 4^n.
size_t liouville_dim(size_t num_qubits);
/// Inverse of hilbert_dim. Throws std::invalid_argument if dim is not a power of two.
size_t qubits_for_dim(size_t dim);

}  // namespace rbsim

#endif
