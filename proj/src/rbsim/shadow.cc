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

#include "rbsim/shadow.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <stdexcept>

namespace rbsim {

ProbeOperator ProbeOperator::identity(size_t num_qubits) {
    size_t n = liouville_dim(num_qubits);
    return ProbeOperator{"identity", RealMatrix::Identity(n, n), RealMatrix::Identity(n, n), 1};
}

ProbeOperator ProbeOperator::projector(const IrrepDecomposition &dec, size_t subspace) {
    if (subspace >= dec.subspaces.size()) {
        throw std::invalid_argument("Probe subspace index out of range");
    }
    RealMatrix p = dec.projector(subspace);
    return ProbeOperator{"P" + std::to_string(subspace), p, p, 1};
}

ProbeOperator ProbeOperator::custom(const RealMatrix &matrix, double normalization) {
    size_t d = (size_t)std::llround(std::sqrt((double)matrix.rows()));
    if (matrix.rows() != matrix.cols() || d * d != (size_t)matrix.rows() || d < 2 || (d & (d - 1)) != 0) {
        throw std::invalid_argument("Probe matrix must be square with side 4^n");
    }
    RealMatrix id = RealMatrix::Identity(matrix.rows(), matrix.cols());
    return ProbeOperator{"custom", matrix, id, normalization};
}

ProbeOperator parse_probe(const std::string &name, const IrrepDecomposition &dec) {
    if (name == "identity") {
        return ProbeOperator::identity(dec.num_qubits);
    }
    if (name.size() > 1 && name[0] == 'P' && name.find_first_not_of("0123456789", 1) == std::string::npos) {
        return ProbeOperator::projector(dec, std::stoul(name.substr(1)));
    }
    auto probe = ProbeOperator::projector(dec, dec.index_of_label(name));
    probe.name = name;
    return probe;
}

ShadowReference ShadowReference::ideal(size_t num_qubits, size_t initial_state) {
    ShadowReference ref;
    ref.rho = vectorize(basis_state(num_qubits, initial_state)).coeffs;
    for (size_t x = 0; x < hilbert_dim(num_qubits); x++) {
        ref.povm.push_back(vectorize(basis_state(num_qubits, x)).coeffs);
    }
    return ref;
}

namespace {

constexpr uint64_t STREAM_SHADOW = 3;

void check_probe(const ProbeOperator &probe, size_t liouville) {
    if ((size_t)probe.matrix.rows() != liouville || (size_t)probe.restriction.rows() != liouville) {
        throw std::invalid_argument("Probe dimension does not match the group");
    }
}

}  // namespace

std::vector<ShadowRecord> shadow_collect(const RbConfig &cfg) {
    cfg.validate();
    if (cfg.shots == 0) {
        throw std::invalid_argument("Shadow collection needs shots >= 1");
    }
    auto [kind, factors] = cfg.effective_group();
    const auto &group = cached_group(kind, factors);
    size_t n = group.num_qubits;
    RealMatrix noise = compile(cfg.noise).mat;
    RealVector rho = dress_state(cfg.spam, vectorize(basis_state(n, cfg.initial_state))).coeffs;
    std::vector<RealVector> effects;
    for (size_t x = 0; x < hilbert_dim(n); x++) {
        effects.push_back(dress_effect(cfg.spam, vectorize(basis_state(n, x))).coeffs);
    }

    std::vector<ShadowRecord> out;
    size_t threads = resolve_thread_count(cfg.threads);
    for (size_t m : cfg.lengths) {
        std::vector<ShadowRecord> block(cfg.sequences * cfg.shots);
        parallel_for(cfg.sequences, threads, [&](size_t begin, size_t end) {
            RealVector v(rho.size()), tmp(rho.size());
            std::vector<double> cumulative(effects.size());
            for (size_t k = begin; k < end; k++) {
                RngStream rng(cfg.seed, {STREAM_SHADOW, (uint64_t)m, (uint64_t)k});
                auto idx = sample_indices(group, rng, m);
                v = rho;
                for (size_t g : idx) {
                    group.elements[g].apply_to(v, tmp);
                    v.noalias() = noise * tmp;
                }
                double total = 0;
                for (size_t x = 0; x < effects.size(); x++) {
                    total += std::max(0.0, effects[x].dot(v));
                    cumulative[x] = total;
                }
                std::vector<uint32_t> ids(idx.begin(), idx.end());
                for (size_t s = 0; s < cfg.shots; s++) {
                    double u = rng.uniform() * total;
                    size_t x = std::upper_bound(cumulative.begin(), cumulative.end(), u) - cumulative.begin();
                    x = std::min(x, effects.size() - 1);
                    block[k * cfg.shots + s] = ShadowRecord{m, ids, (uint64_t)x};
                }
            }
        });
        out.insert(out.end(), std::make_move_iterator(block.begin()), std::make_move_iterator(block.end()));
    }
    return out;
}

namespace {

// T R(g_m) A ... A R(g_1) T |rho>>; the outcome-independent part of the correlation function.
RealVector probe_chain(const uint32_t *ids, size_t m, const ProbeOperator &probe, const GateSetGroup &group,
                       const RealVector &rho) {
    RealVector v = probe.restriction * rho, tmp(rho.size());
    for (size_t k = 0; k < m; k++) {
        if (k > 0) {
            tmp.noalias() = probe.matrix * v;
            v.swap(tmp);
        }
        group.elements[ids[k]].apply_to(v, tmp);
        v.swap(tmp);
    }
    tmp.noalias() = probe.restriction * v;
    return tmp;
}

}  // namespace

double correlation_function(const ShadowRecord &record, const ProbeOperator &probe, const GateSetGroup &group,
                            const ShadowReference &ref) {
    check_probe(probe, liouville_dim(group.num_qubits));
    if (record.gate_ids.size() != record.m) {
        throw std::invalid_argument("Record gate count does not match its length");
    }
    if (record.outcome >= ref.povm.size()) {
        throw std::invalid_argument("Record outcome out of range");
    }
    for (auto g : record.gate_ids) {
        if (g >= group.order()) {
            throw std::invalid_argument("Record gate id out of range");
        }
    }
    RealVector w = probe_chain(record.gate_ids.data(), record.m, probe, group, ref.rho);
    return probe.normalization * ref.povm[record.outcome].dot(w);
}

MedianOfMeans median_of_means(const std::vector<double> &values, size_t batch_size, size_t batches) {
    if (batch_size == 0 || batches == 0) {
        throw std::invalid_argument("Batch size and batch count must be positive");
    }
    if (values.size() < batch_size * batches) {
        throw std::invalid_argument("Median of means needs " + std::to_string(batch_size * batches) +
                                    " values, got " + std::to_string(values.size()));
    }
    std::vector<double> means(batches);
    for (size_t b = 0; b < batches; b++) {
        means[b] = pairwise_sum(values.data() + b * batch_size, batch_size) / (double)batch_size;
    }
    MedianOfMeans out;
    out.used = batch_size * batches;
    if (batches > 1) {
        auto stats = summarize(0, means);
        out.stderr = std::sqrt(std::numbers::pi / 2 * stats.variance / (double)batches);
    }
    std::sort(means.begin(), means.end());
    out.value = batches % 2 ? means[batches / 2] : (means[batches / 2 - 1] + means[batches / 2]) / 2;
    return out;
}

std::vector<ShadowEstimate> shadow_estimate(const std::vector<ShadowRecord> &records, const ProbeOperator &probe,
                                            const GateSetGroup &group, const ShadowReference &ref, size_t batch_size,
                                            size_t batches) {
    std::vector<size_t> order;
    std::map<size_t, std::vector<double>> values;
    for (const auto &r : records) {
        auto it = values.find(r.m);
        if (it == values.end()) {
            order.push_back(r.m);
            it = values.emplace(r.m, std::vector<double>{}).first;
        }
        if (it->second.size() < batch_size * batches) {
            it->second.push_back(correlation_function(r, probe, group, ref));
        }
    }
    std::vector<ShadowEstimate> out;
    for (size_t m : order) {
        const auto &v = values[m];
        if (v.size() < batch_size * batches) {
            throw std::invalid_argument("Length " + std::to_string(m) + " has " + std::to_string(v.size()) +
                                        " records; median of means needs " + std::to_string(batch_size * batches));
        }
        auto mom = median_of_means(v, batch_size, batches);
        out.push_back(ShadowEstimate{m, mom.value, mom.stderr, mom.used});
    }
    return out;
}

double ShadowTheory::eval(size_t m) const {
    if (m == 0) {
        throw std::invalid_argument("Shadow model is defined for m >= 1");
    }
    RealMatrix power = RealMatrix::Identity(phi.rows(), phi.cols());
    for (size_t k = 1; k < m; k++) {
        power = power * phi;
    }
    return (theta * power).trace();
}

ShadowTheory shadow_theory_model(const ProbeOperator &probe, const Ptm &noise, const IrrepDecomposition &dec,
                                 const SpamModel &spam, size_t initial_state) {
    if (!dec.multiplicity_free) {
        throw std::invalid_argument("The shadow model needs a multiplicity-free decomposition");
    }
    size_t n = dec.num_qubits;
    check_probe(probe, liouville_dim(n));
    if (noise.num_qubits != n) {
        throw std::invalid_argument("Noise and decomposition act on different qubit counts");
    }
    size_t k = dec.subspaces.size();
    std::vector<RealMatrix> proj;
    for (size_t s = 0; s < k; s++) {
        proj.push_back(dec.projector(s));
    }
    ShadowTheory out;
    out.phi = RealMatrix::Zero(k, k);
    RealMatrix lt = noise.mat.transpose();
    for (size_t i = 0; i < k; i++) {
        for (size_t j = 0; j < k; j++) {
            out.phi(i, j) = (proj[i] * probe.matrix * proj[j] * lt).trace() / (double)dec.subspaces[j].dim();
        }
    }
    auto ref = ShadowReference::ideal(n, initial_state);
    RealVector rho_noisy = dress_state(spam, vectorize(basis_state(n, initial_state))).coeffs;
    RealVector state_side(k), effect_side(k);
    for (size_t j = 0; j < k; j++) {
        state_side(j) = (probe.restriction * ref.rho).dot(proj[j] * rho_noisy);
        double e = 0;
        for (size_t x = 0; x < ref.povm.size(); x++) {
            RealVector noisy = dress_effect(spam, LiouvilleVector(n, ref.povm[x])).coeffs;
            e += ref.povm[x].dot(probe.restriction * proj[j] * lt * noisy);
        }
        effect_side(j) = e / (double)dec.subspaces[j].dim();
    }
    out.theta = probe.normalization * state_side * effect_side.transpose();
    return out;
}

double shadow_exhaustive_expectation(const RbConfig &cfg, const ProbeOperator &probe, size_t m) {
    cfg.validate();
    auto [kind, factors] = cfg.effective_group();
    const auto &group = cached_group(kind, factors);
    size_t n = group.num_qubits;
    check_probe(probe, liouville_dim(n));
    double words = std::pow((double)group.order(), (double)m);
    if (m == 0 || words > 5e6) {
        throw std::invalid_argument("Exhaustive shadow expectation needs 1 <= |G|^m <= 5e6");
    }
    RealMatrix noise = compile(cfg.noise).mat;
    RealVector rho = dress_state(cfg.spam, vectorize(basis_state(n, cfg.initial_state))).coeffs;
    auto ref = ShadowReference::ideal(n, cfg.initial_state);
    std::vector<RealVector> effects;
    for (const auto &e : ref.povm) {
        effects.push_back(dress_effect(cfg.spam, LiouvilleVector(n, e)).coeffs);
    }
    size_t count = (size_t)words;
    std::vector<double> terms(count);
    parallel_for(count, resolve_thread_count(cfg.threads), [&](size_t begin, size_t end) {
        std::vector<uint32_t> ids(m);
        RealVector v(rho.size()), tmp(rho.size());
        for (size_t w = begin; w < end; w++) {
            size_t rest = w;
            for (size_t k = 0; k < m; k++) {
                ids[k] = (uint32_t)(rest % group.order());
                rest /= group.order();
            }
            v = rho;
            for (size_t k = 0; k < m; k++) {
                group.elements[ids[k]].apply_to(v, tmp);
                v.noalias() = noise * tmp;
            }
            RealVector chain = probe_chain(ids.data(), m, probe, group, ref.rho);
            double total = 0;
            for (size_t x = 0; x < effects.size(); x++) {
                total += effects[x].dot(v) * ref.povm[x].dot(chain);
            }
            terms[w] = probe.normalization * total;
        }
    });
    return pairwise_sum(terms.data(), count) / (double)count;
}

}  // namespace rbsim
