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

#ifndef RBSIM_PROTOCOLS_H
#define RBSIM_PROTOCOLS_H

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "rbsim/clifford.h"
#include "rbsim/fit.h"
#include "rbsim/noise.h"
#include "rbsim/twirl.h"

namespace rbsim {

enum class ProtocolKind { Standard, Simultaneous, Correlated, Interleaved, Shadow };

std::string protocol_name(ProtocolKind kind);
ProtocolKind parse_protocol_name(const std::string &name);

enum class SequenceSampling {
    Random,
    /// Every length-m word over the group, each with weight 1/|G|^m. Exact mode only.
    Exhaustive,
};

/// A two-outcome measurement reported as offset + scale * Pr(effect).
struct Observable {
    std::string name;
    LiouvilleVector effect;
    double scale = 1;
    double offset = 0;
    /// Pauli index for Pauli-type observables, -1 otherwise.
    long pauli_index = -1;
};

/// Observable names:
///   "survival"            projector onto the prepared basis state
///   "basis:<bits>"        projector onto a computational basis state, qubit 0 first
///   "pauli:<P>"           Tr(P rho) for a Pauli string P
///   "coef:<P>"            Tr(P rho)/sqrt(d), the normalized-basis Liouville coefficient
///   "z1", "z2", "zz"      coef:ZI, coef:IZ, coef:ZZ on two qubits
///   "pr:<q>=<b>"          Pr(qubit q reads b), q counted from 1
///   "pr_q1_up", "pr_q2_up" pr:1=0, pr:2=0
Observable parse_observable(const std::string &name, size_t num_qubits, size_t initial_state);

struct RbConfig {
    ProtocolKind protocol = ProtocolKind::Standard;
    GroupKind group = GroupKind::C1;
    size_t group_factors = 1;
    /// Simultaneous protocol: 1 twirls qubit 1 only (C1xI), 2 qubit 2 only (IxC1), 3 both (C1xC1).
    int experiment = 3;
    std::vector<size_t> lengths;
    size_t sequences = 1;
    /// 0 selects exact expectation values; otherwise values are binomial sample means over `shots` draws.
    size_t shots = 0;
    uint64_t seed = 0;
    NoiseModel noise = NoiseModel::ideal(1);
    SpamModel spam = SpamModel::ideal(1);
    /// Prepared computational basis state, qubit 0 as most significant bit.
    size_t initial_state = 0;
    std::vector<std::string> observables;
    SequenceSampling sampling = SequenceSampling::Random;
    /// Interleaved protocol: named target gate (see named_gate_unitary) and its extra noise.
    std::string target_gate = "I";
    NoiseModel target_noise = NoiseModel::ideal(1);
    /// Decay model used by the correlated and interleaved protocols.
    std::string fit_model;
    /// Worker threads; 0 reads RBSIM_THREADS, then falls back to the hardware count.
    size_t threads = 0;

    size_t num_qubits() const;
    /// The group the protocol samples from (the simultaneous experiment number picks it).
    std::pair<GroupKind, size_t> effective_group() const;
    /// Throws std::invalid_argument describing the first problem found.
    void validate() const;
};

struct DecayPoint {
    size_t m = 0;
    double mean = 0;
    double variance = 0;
    size_t count = 0;
};

struct DecaySeries {
    std::string observable;
    std::vector<DecayPoint> points;

    std::vector<double> lengths() const;
    std::vector<double> means() const;
};

struct DecayDataset {
    std::string protocol;
    std::string group;
    std::vector<DecaySeries> series;

    const DecaySeries &get(const std::string &observable) const;
};

/// Sequences are C_1..C_m followed by the inverse of the word, with the noise channel after every gate
/// (m + 1 insertions). Preparation noise acts on the initial state, measurement noise on the effects.
DecayDataset run_standard_rb(const RbConfig &config);
/// Same engine as run_standard_rb on the subsystem groups; default observables cover survival, the
/// single-qubit and two-qubit Z coefficients, and both single-qubit marginals.
DecayDataset run_simultaneous_rb(const RbConfig &config);

struct CorrelatedResult {
    DecayDataset data;
    std::vector<FitResult> fits;
    /// Fitted decay per subspace, alpha[0] = 1.
    AlphaSet alpha;
    EpsilonSet eps;
    /// False when the fitted decays admit no completely positive weight set; `eps_error` says why.
    bool eps_valid = false;
    std::string eps_error;
    double delta_alpha = 0;
};
/// Fits every Pauli correlator with a zero-offset exponential (power model by default) and inverts the
/// subspace decays to fixed-subspace depolarizing weights.
CorrelatedResult run_correlated_rb(const RbConfig &config);

struct InterleavedResult {
    DecayDataset reference;
    DecayDataset interleaved;
    FitResult reference_fit;
    FitResult interleaved_fit;
    double p = 0;
    double p_interleaved = 0;
    InterleavedEstimate estimate;
};
/// Reference stage as run_standard_rb; interleaved stage runs C_1, T, C_2, T, ..., C_m, T and one inverse.
/// Each random gate and the inverse are followed by the noise channel; the target T carries the extra
/// target noise immediately before it, so the slot between random gates holds T o L_T o L.
InterleavedResult run_interleaved_rb(const RbConfig &config);

/// Simulation stage of run_correlated_rb: one series per correlator, no fitting.
DecayDataset simulate_correlated(const RbConfig &config);
/// Simulation stage of run_interleaved_rb: reference and interleaved data, no fitting.
std::pair<DecayDataset, DecayDataset> simulate_interleaved(const RbConfig &config);

/// Runs fn(begin, end) over [0, n) split into contiguous chunks on `threads` workers.
void parallel_for(size_t n, size_t threads, const std::function<void(size_t, size_t)> &fn);
size_t resolve_thread_count(size_t requested);
/// Pairwise (cascade) summation for reproducible, low-error totals.
double pairwise_sum(const double *values, size_t n);

/// Mean and unbiased variance of per-sequence values.
DecayPoint summarize(size_t m, const std::vector<double> &values);

}  // namespace rbsim

#endif
