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

#ifndef RBSIM_LIOUVILLE_H
#define RBSIM_LIOUVILLE_H

#include <span>
#include <vector>

#include "rbsim/pauli.h"

namespace rbsim {

/// Coefficients of an operator in the normalized Pauli basis: v_i = Tr(sigma_i X).
struct LiouvilleVector {
    size_t num_qubits = 0;
    RealVector coeffs;

    LiouvilleVector() = default;
    LiouvilleVector(size_t num_qubits, RealVector coeffs);
    static LiouvilleVector zero(size_t num_qubits);
};

/// Pauli transfer matrix, R_ij = Tr(sigma_i L(sigma_j)) with normalized Paulis.
struct Ptm {
    size_t num_qubits = 0;
    RealMatrix mat;

    Ptm() = default;
    Ptm(size_t num_qubits, RealMatrix mat);
    static Ptm identity(size_t num_qubits);

    size_t dim() const {
        return (size_t)mat.rows();
    }
    bool is_trace_preserving(double tol = 1e-10) const;
    bool is_unital(double tol = 1e-10) const;
};

/// Vectorizes a Hermitian operator. Throws std::invalid_argument for non-power-of-two or non-Hermitian input.
LiouvilleVector vectorize(const ComplexMatrix &op);
ComplexMatrix devectorize(const LiouvilleVector &v);

/// Density matrix of a computational basis state; qubit 0 is the most significant bit of basis_index.
ComplexMatrix basis_state(size_t num_qubits, size_t basis_index);

Ptm ptm_from_kraus(std::span<const ComplexMatrix> kraus);
Ptm ptm_from_unitary(const ComplexMatrix &u);
/// Applies Kraus operators directly to a density matrix.
ComplexMatrix apply_kraus(std::span<const ComplexMatrix> kraus, const ComplexMatrix &rho);

LiouvilleVector apply(const Ptm &channel, const LiouvilleVector &v);
/// The channel that applies `first` and then `second`.
Ptm compose(const Ptm &second, const Ptm &first);
/// Kronecker product; `a` acts on the leading qubits.
Ptm tensor(const Ptm &a, const Ptm &b);
/// Adjoint channel (Heisenberg picture); for a PTM this is the transpose.
Ptm adjoint(const Ptm &channel);
double expectation(const LiouvilleVector &effect, const LiouvilleVector &state);

/// Choi matrix sum_ij R_ij sigma_i (x) conj(sigma_j), unnormalized so its trace is d for a TP map.
ComplexMatrix choi_matrix(const Ptm &channel);
double choi_min_eigenvalue(const Ptm &channel);
bool is_completely_positive(const Ptm &channel, double tol = 1e-8);

/// Hilbert-Schmidt inner product Tr(A^dag B).
std::complex<double> hs_inner(const ComplexMatrix &a, const ComplexMatrix &b);
/// Square root of a Hermitian positive semidefinite matrix via eigendecomposition. Eigenvalues at the
/// rounding floor (relative 1e-14) are treated as exact zeros.
ComplexMatrix hermitian_sqrt(const ComplexMatrix &m);
/// Uhlmann fidelity (Tr sqrt(sqrt(a) b sqrt(a)))^2.
double state_fidelity(const ComplexMatrix &a, const ComplexMatrix &b);
/// Entanglement fidelity Tr(R)/d^2 and average gate fidelity (d F_e + 1)/(d + 1) against the identity.
double entanglement_fidelity(const Ptm &channel);
double average_gate_fidelity(const Ptm &channel);

bool approx_equal(const RealMatrix &a, const RealMatrix &b, double tol);
bool approx_equal(const ComplexMatrix &a, const ComplexMatrix &b, double tol);

}  // namespace rbsim

#endif
