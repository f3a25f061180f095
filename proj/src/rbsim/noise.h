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

#ifndef RBSIM_NOISE_H
#define RBSIM_NOISE_H

#include <map>
#include <string>
#include <vector>

#include "rbsim/liouville.h"

namespace rbsim {

enum class NoiseKind { Ideal, Depolarizing, PauliChannel, ToyCrosstalk, RawKraus };

/// Two-qubit crosstalk toy model. Drive flags eps1/eps2 switch the error terms of each drive on or off:
/// drive 1 contributes p01 I, p11 X(x)I, p21 I(x)X; drive 2 contributes p02 I, p12 I(x)X, p22 X(x)I;
/// p_zz is an always-on Z(x)Z term. Probabilities must satisfy the trace condition exactly
/// (eps1 (p01+p11+p21) + eps2 (p02+p12+p22) + p_zz = 1); nothing is renormalized.
struct ToyCrosstalkParams {
    int eps1 = 1;
    int eps2 = 1;
    double p01 = 0, p11 = 0, p21 = 0;
    double p02 = 0, p12 = 0, p22 = 0;
    double p_zz = 0;
};

/// Fills the no-error probabilities so the trace condition holds for one of the simultaneous experiments
/// (1: only drive 1 on, 2: only drive 2 on, 3: both on). In experiment 3 the slack is split evenly.
ToyCrosstalkParams toy_crosstalk_for_experiment(int experiment, double p11, double p21, double p12, double p22, double p_zz);

struct NoiseModel {
    NoiseKind kind = NoiseKind::Ideal;
    size_t num_qubits = 1;
    /// Depolarizing: L(rho) = p rho + (1 - p) Tr(rho) I/d.
    double depolarizing_p = 1;
    /// Pauli-string label (e.g. "XI") to probability.
    std::map<std::string, double> pauli_probs;
    ToyCrosstalkParams toy;
    std::vector<ComplexMatrix> kraus;

    static NoiseModel ideal(size_t num_qubits);
    static NoiseModel depolarizing(size_t num_qubits, double p);
    static NoiseModel pauli_channel(size_t num_qubits, std::map<std::string, double> probs);
    static NoiseModel toy_crosstalk(const ToyCrosstalkParams &params);
    static NoiseModel raw_kraus(std::vector<ComplexMatrix> ops);

    /// Throws std::invalid_argument naming the failed check.
    void validate() const;
    /// Kraus operators of the model, for every variant.
    std::vector<ComplexMatrix> kraus_operators() const;
    /// Pauli error probabilities indexed by Pauli index, for the Pauli-diagonal variants.
    std::vector<double> pauli_error_probabilities() const;
    bool is_pauli_diagonal() const;
    std::string describe() const;
};

/// Validates and compiles to a PTM. Pauli-diagonal variants use the commutation-sign formula;
/// RawKraus goes through the Kraus sum and is checked for trace preservation and complete positivity.
Ptm compile(const NoiseModel &model);

/// Diagonal PTM of a Pauli channel: lambda_j = sum_k q_k (-1)^{<k, j>}.
Ptm pauli_channel_ptm(size_t num_qubits, const std::vector<double> &probs);

struct SpamModel {
    NoiseModel prep;
    NoiseModel meas;

    static SpamModel ideal(size_t num_qubits);
};

/// Preparation error applied to the ideal state.
LiouvilleVector dress_state(const SpamModel &spam, const LiouvilleVector &state);
/// Measurement error absorbed into the effect via the adjoint channel.
LiouvilleVector dress_effect(const SpamModel &spam, const LiouvilleVector &effect);

}  // namespace rbsim

#endif
