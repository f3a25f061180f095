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

#ifndef RBSIM_TWIRL_H
#define RBSIM_TWIRL_H

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "rbsim/clifford.h"
#include "rbsim/liouville.h"

namespace rbsim {

/// Group average (1/|G|) sum_C R(C)^T R R(C), summed element by element.
Ptm exhaustive_twirl(const Ptm &noise, const GateSetGroup &group);

struct Subspace {
    std::string label;
    /// Pauli indices spanning the subspace.
    std::vector<size_t> members;

    size_t dim() const {
        return members.size();
    }
};

/// Partition of the Pauli basis into subspaces invariant under a group.
///
/// For C1, C2 and C1^k the subspaces are the irreducible, inequivalent components and the twirl of any
/// channel is diagonal on them. For C1xI and IxC1 they are the Pauli orbits; those groups carry
/// repeated (equivalent) components, so twirled channels can couple different subspaces.
struct IrrepDecomposition {
    GroupKind kind = GroupKind::C1;
    size_t factors = 1;
    size_t num_qubits = 1;
    bool multiplicity_free = true;
    std::vector<Subspace> subspaces;

    RealMatrix projector(size_t s) const;
    size_t subspace_of(size_t pauli_index) const;
    size_t index_of_label(const std::string &label) const;
};

/// For C1^k (and C1xC1) subspace s holds the Paulis whose support, read as a bit string over qubits
/// left to right, equals s. So for two qubits W1 is I(x)sigma, W2 is sigma(x)I and W3 is sigma(x)sigma.
IrrepDecomposition irrep_decomposition(GroupKind kind, size_t factors = 1);

/// Raised when a twirled channel is not a combination of the decomposition's projectors.
struct DecompositionError : std::runtime_error {
    double residual;
    DecompositionError(const std::string &msg, double residual) : std::runtime_error(msg), residual(residual) {
    }
};

/// Coefficient tables of a twirl over single-qubit Cliffords acting on one qubit of a pair.
/// With t the twirled qubit and u the other one, the twirled channel maps
///   sigma_i[u] sigma_0[t] -> sum_k alpha0(k, i) sigma_k[u] sigma_0[t]
///   sigma_i[u] sigma_j[t] -> sum_k alpha1(k, i) sigma_k[u] sigma_j[t]  for j != 0.
struct SubsystemTwirlTables {
    size_t twirled_qubit = 1;
    Eigen::Matrix4d alpha0;
    Eigen::Matrix4d alpha1;
};

struct AlphaSet {
    std::vector<std::string> labels;
    std::vector<double> values;
    double residual = 0;
    std::optional<SubsystemTwirlTables> tables;

    double operator[](size_t k) const {
        return values.at(k);
    }
};

/// alpha_S = Tr(P_S R)/dim S. Checks trace preservation, commutation with every group element (1e-8),
/// and throws DecompositionError when the residual ||R - sum_S alpha_S P_S|| exceeds 1e-8.
AlphaSet projector_decompose(const Ptm &twirled, const IrrepDecomposition &dec);

/// Closed-form coefficient tables for a single-qubit Clifford twirl on `twirled_qubit` of a 2-qubit channel:
/// alpha0(k, i) = R[(k,0),(i,0)] and alpha1(k, i) = (1/3) sum_{j=1..3} R[(k,j),(i,j)], indices ordered (other, twirled).
SubsystemTwirlTables subsystem_twirl_coefficients(const Ptm &noise, size_t twirled_qubit);
/// Rebuilds the twirled 16x16 PTM from the tables.
Ptm subsystem_twirl_matrix(const SubsystemTwirlTables &tables);

struct FidelityConversion {
    double average_fidelity;
    double error_rate;
};
/// F = p + (1 - p)/d and r = (1 - p)(d - 1)/d.
FidelityConversion fidelity_conversions(double p, size_t d);
/// Per-pulse fidelity: 1 - (1 - F)/n with n the mean pulses per single-qubit Clifford.
double single_qubit_rescale(double average_fidelity);

/// Diagonal entry of the subspace-restricted depolarizing channel for subspace s on Pauli i:
/// (1 + sum_{sigma in S} (-1)^{<sigma, sigma_i>}) / (dim S + 1).
double r_depol(const IrrepDecomposition &dec, size_t s, size_t pauli_index);

using RdepolFunction = std::function<double(const IrrepDecomposition &, size_t, size_t)>;

/// Weights of the fixed-subspace depolarizing parametrization; eps[0] belongs to the trivial subspace and is ignored.
struct EpsilonSet {
    std::vector<double> eps;
    bool ambiguous_root = false;
};

/// Upper bound on eps_S for complete positivity: (dim S + 1)/dim S.
double epsilon_upper_bound(const IrrepDecomposition &dec, size_t s);
/// alpha_T = prod_S [1 + eps_S (r_depol(S, i in T) - 1)]. Throws std::invalid_argument on out-of-range weights.
AlphaSet alpha_from_epsilon(const EpsilonSet &eps, const IrrepDecomposition &dec, const RdepolFunction &rdepol = r_depol);
/// Inverse map for the single-nontrivial-subspace groups and C1xC1. For C1xC1 the quadratic root is chosen
/// among the completely positive solutions; if both qualify the one with smaller |eps of W2| is returned
/// and `ambiguous_root` is set. Throws std::domain_error when no completely positive solution exists
/// and std::invalid_argument for a zero decay.
EpsilonSet epsilon_from_alpha(const AlphaSet &alpha, const IrrepDecomposition &dec);

struct InterleavedEstimate {
    double error_rate;
    double bound;
    double bound_direct;
    double bound_quadratic;
};
/// Interleaved error estimate (d-1)(1 - p_interleaved/p)/d and the smaller of the two systematic bounds.
InterleavedEstimate interleaved_estimate(double p, double p_interleaved, size_t d);

/// alpha(W3) - alpha(W1) alpha(W2) for C1xC1 decay sets.
double alpha_correlation(const AlphaSet &alpha);

struct MonteCarloEstimate {
    double mean;
    double stderr;
};
/// Average over Haar-random pure states of <psi| L(psi) |psi>.
MonteCarloEstimate average_fidelity_monte_carlo(const Ptm &channel, size_t samples, RngStream &rng);

}  // namespace rbsim

#endif
