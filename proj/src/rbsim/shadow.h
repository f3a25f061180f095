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

#ifndef RBSIM_SHADOW_H
#define RBSIM_SHADOW_H

#include <cstdint>
#include <string>
#include <vector>

#include "rbsim/protocols.h"

namespace rbsim {

/// One measured bit string after a random gate word, no inversion gate.
struct ShadowRecord {
    size_t m = 0;
    std::vector<uint32_t> gate_ids;
    /// Outcome bits, qubit 0 as the most significant bit.
    uint64_t outcome = 0;

    bool operator==(const ShadowRecord &other) const = default;
};

/// Probe superoperator A with normalization, plus the projector that restricts the ideal gate
/// representation to the probed irrep (identity for unrestricted probes).
struct ProbeOperator {
    std::string name;
    RealMatrix matrix;
    RealMatrix restriction;
    double normalization = 1;

    static ProbeOperator identity(size_t num_qubits);
    static ProbeOperator projector(const IrrepDecomposition &dec, size_t subspace);
    static ProbeOperator custom(const RealMatrix &matrix, double normalization = 1);
};

/// "identity", "P<j>" (subspace index) or a subspace label such as "W1".
ProbeOperator parse_probe(const std::string &name, const IrrepDecomposition &dec);

/// Noiseless reference data used in post-processing.
struct ShadowReference {
    RealVector rho;
    std::vector<RealVector> povm;

    static ShadowReference ideal(size_t num_qubits, size_t initial_state);
};

/// Records for each length in cfg.lengths: cfg.sequences words, each measured cfg.shots times.
/// Order is length-major, then sequence, then shot.
std::vector<ShadowRecord> shadow_collect(const RbConfig &cfg);

/// normalization * <<E_x| T R(g_m) A R(g_{m-1}) ... A R(g_1) T |rho>> with ideal gate PTMs.
double correlation_function(const ShadowRecord &record, const ProbeOperator &probe, const GateSetGroup &group,
                            const ShadowReference &ref);

struct MedianOfMeans {
    double value = 0;
    /// sqrt(pi/2) * (spread of batch means) / sqrt(batches); zero for a single batch.
    double stderr = 0;
    size_t used = 0;
};
/// Splits the first batch_size * batches values, in order, into consecutive batches and returns the median
/// of their means (middle pair averaged for an even count). Throws if there are too few values.
MedianOfMeans median_of_means(const std::vector<double> &values, size_t batch_size, size_t batches);

struct ShadowEstimate {
    size_t m = 0;
    double value = 0;
    double stderr = 0;
    size_t records = 0;
};
/// Median-of-means estimate per sequence length, lengths in order of first appearance.
std::vector<ShadowEstimate> shadow_estimate(const std::vector<ShadowRecord> &records, const ProbeOperator &probe,
                                            const GateSetGroup &group, const ShadowReference &ref, size_t batch_size,
                                            size_t batches);

/// k(m) = Tr[theta phi^(m-1)] for noise after every gate and SPAM-dressed state and effects.
/// phi(i, j) = Tr(P_i A P_j L^T)/dim P_j. Requires a multiplicity-free decomposition.
struct ShadowTheory {
    RealMatrix theta;
    RealMatrix phi;

    double eval(size_t m) const;
};
ShadowTheory shadow_theory_model(const ProbeOperator &probe, const Ptm &noise, const IrrepDecomposition &dec,
                                 const SpamModel &spam, size_t initial_state);

/// E over all |G|^m words and outcomes of the correlation function, weighted by the noisy outcome
/// probabilities. Exact, for validating the theory at small m.
double shadow_exhaustive_expectation(const RbConfig &cfg, const ProbeOperator &probe, size_t m);

}  // namespace rbsim

#endif
