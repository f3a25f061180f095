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

#include "rbsim/protocols.h"

#include <gtest/gtest.h>

#include <cmath>

using namespace rbsim;

namespace {

RbConfig standard_config(NoiseModel noise, std::vector<size_t> lengths, size_t sequences) {
    RbConfig cfg;
    cfg.noise = std::move(noise);
    cfg.lengths = std::move(lengths);
    cfg.sequences = sequences;
    cfg.seed = 17;
    cfg.threads = 1;
    return cfg;
}

RbConfig simultaneous_config(int experiment, const ToyCrosstalkParams &toy, std::vector<size_t> lengths) {
    RbConfig cfg;
    cfg.protocol = ProtocolKind::Simultaneous;
    cfg.experiment = experiment;
    cfg.noise = NoiseModel::toy_crosstalk(toy);
    cfg.spam = SpamModel::ideal(2);
    cfg.lengths = std::move(lengths);
    cfg.sequences = 4;
    cfg.seed = 3;
    cfg.threads = 2;
    return cfg;
}

// Pauli channel whose eigenvalues are given; probabilities by the inverse Walsh-Hadamard transform.
NoiseModel pauli_channel_from_eigenvalues(size_t n, const std::vector<double> &lambda) {
    size_t d2 = liouville_dim(n);
    std::map<std::string, double> probs;
    for (size_t j = 0; j < d2; j++) {
        double p = 0;
        for (size_t i = 0; i < d2; i++) {
            p += lambda[i] * (anticommute_bit(n, i, j) ? -1 : 1);
        }
        probs[PauliString::from_index(n, j).str()] = p / (double)d2;
    }
    return NoiseModel::pauli_channel(n, probs);
}

}  // namespace

TEST(Protocols, ideal_survival_is_one) {
    auto cfg = standard_config(NoiseModel::ideal(1), {1, 5, 20}, 6);
    auto data = run_standard_rb(cfg);
    for (const auto &p : data.get("survival").points) {
        ASSERT_NEAR(p.mean, 1, 1e-12);
        ASSERT_EQ(p.count, 6u);
    }
}

TEST(Protocols, depolarizing_closed_form) {
    for (auto [kind, p] : {std::pair{GroupKind::C1, 0.97}, std::pair{GroupKind::C2, 0.95}}) {
        size_t n = group_num_qubits(kind);
        double d = (double)hilbert_dim(n);
        auto cfg = standard_config(NoiseModel::depolarizing(n, p), {1, 2, 7, 15}, 5);
        cfg.group = kind;
        cfg.spam = SpamModel::ideal(n);
        auto data = run_standard_rb(cfg);
        for (const auto &pt : data.get("survival").points) {
            // m + 1 noise insertions: the trailing one folds into the amplitude.
            double expected = (1 - 1 / d) * p * std::pow(p, (double)pt.m) + 1 / d;
            ASSERT_NEAR(pt.mean, expected, 1e-10);
            ASSERT_NEAR(pt.variance, 0, 1e-18);
        }
    }
}

TEST(Protocols, exhaustive_matches_twirled_channel) {
    auto noise = NoiseModel::pauli_channel(1, {{"I", 0.9}, {"X", 0.05}, {"Y", 0.02}, {"Z", 0.03}});
    auto cfg = standard_config(noise, {1, 2}, 1);
    cfg.sampling = SequenceSampling::Exhaustive;
    cfg.initial_state = 1;
    auto data = run_standard_rb(cfg);
    Ptm lam = compile(noise);
    Ptm twirled = exhaustive_twirl(lam, cached_group(GroupKind::C1));
    auto rho = vectorize(basis_state(1, 1));
    for (const auto &pt : data.get("survival").points) {
        RealVector v = rho.coeffs;
        for (size_t k = 0; k < pt.m; k++) {
            v = twirled.mat * v;
        }
        v = lam.mat * v;
        ASSERT_EQ(pt.count, (size_t)std::pow(24, pt.m));
        ASSERT_NEAR(pt.mean, rho.coeffs.dot(v), 1e-10);
    }
}

TEST(Protocols, exhaustive_rejects_shots) {
    auto cfg = standard_config(NoiseModel::ideal(1), {1}, 1);
    cfg.sampling = SequenceSampling::Exhaustive;
    cfg.shots = 10;
    ASSERT_THROW(run_standard_rb(cfg), std::invalid_argument);
}

TEST(Protocols, shot_mode_converges_to_exact) {
    auto noise = NoiseModel::pauli_channel(1, {{"I", 0.94}, {"X", 0.03}, {"Z", 0.03}});
    auto exact_cfg = standard_config(noise, {1, 4, 12}, 100);
    auto shot_cfg = exact_cfg;
    shot_cfg.shots = 10000;
    auto exact = run_standard_rb(exact_cfg).get("survival");
    auto sampled = run_standard_rb(shot_cfg).get("survival");
    for (size_t k = 0; k < exact.points.size(); k++) {
        double mu = exact.points[k].mean;
        double sigma = std::sqrt(mu * (1 - mu) / 1e6);
        ASSERT_LT(std::abs(sampled.points[k].mean - mu), 5 * sigma + 1e-12);
    }
}

TEST(Protocols, runs_are_reproducible_across_thread_counts) {
    auto noise = NoiseModel::depolarizing(2, 0.9);
    auto cfg = standard_config(noise, {1, 3}, 7);
    cfg.group = GroupKind::C2;
    cfg.spam = SpamModel::ideal(2);
    cfg.shots = 50;
    auto a = run_standard_rb(cfg);
    cfg.threads = 3;
    auto b = run_standard_rb(cfg);
    for (size_t k = 0; k < 2; k++) {
        ASSERT_EQ(a.series[0].points[k].mean, b.series[0].points[k].mean);
    }
}

TEST(Protocols, spam_shifts_amplitude_not_rate) {
    auto cfg = standard_config(NoiseModel::depolarizing(1, 0.98), {1, 2, 3, 5, 8, 13, 21, 34}, 3);
    auto clean = run_standard_rb(cfg).get("survival");
    cfg.spam.prep = NoiseModel::pauli_channel(1, {{"I", 0.95}, {"X", 0.05}});
    cfg.spam.meas = NoiseModel::pauli_channel(1, {{"I", 0.97}, {"X", 0.02}, {"Y", 0.01}});
    auto dirty = run_standard_rb(cfg).get("survival");
    auto fc = fit(DecayModel::single_exp(), clean.lengths(), clean.means());
    auto fd = fit(DecayModel::single_exp(), dirty.lengths(), dirty.means());
    ASSERT_NEAR(fc.param("p"), fd.param("p"), 1e-9);
    ASSERT_GT(std::abs(fc.param("A") - fd.param("A")), 1e-3);
}

TEST(Protocols, simultaneous_ideal_observables_constant) {
    auto cfg = simultaneous_config(3, toy_crosstalk_for_experiment(3, 0, 0, 0, 0, 0), {1, 4});
    auto data = run_simultaneous_rb(cfg);
    for (const auto &[name, value] : std::vector<std::pair<std::string, double>>{
             {"survival", 1}, {"z1", 0.5}, {"z2", 0.5}, {"zz", 0.5}, {"pr_q1_up", 1}, {"pr_q2_up", 1}}) {
        for (const auto &pt : data.get(name).points) {
            ASSERT_NEAR(pt.mean, value, 1e-12) << name;
        }
    }
}

TEST(Protocols, simultaneous_toy_decays_follow_twirl) {
    auto toy = toy_crosstalk_for_experiment(3, 0.011, 0.017, 0.023, 0.009, 0.04);
    // The toy channel is not invariant under the local Cliffords, so only the full group average is exact.
    auto cfg = simultaneous_config(3, toy, {1, 2});
    cfg.sampling = SequenceSampling::Exhaustive;
    auto data = run_simultaneous_rb(cfg);
    auto lam = compile(cfg.noise);
    auto alpha = projector_decompose(exhaustive_twirl(lam, cached_group(GroupKind::C1xC1)),
                                     irrep_decomposition(GroupKind::C1xC1));
    // coef:ZI lives in W2, coef:IZ in W1, coef:ZZ in W3.
    for (const auto &[name, s, label] :
         std::vector<std::tuple<std::string, size_t, std::string>>{{"z1", 2, "ZI"}, {"z2", 1, "IZ"}, {"zz", 3, "ZZ"}}) {
        double lead = lam.mat(PauliString::from_str(label).index(), PauliString::from_str(label).index());
        for (const auto &pt : data.get(name).points) {
            ASSERT_NEAR(pt.mean, 0.5 * lead * std::pow(alpha[s], (double)pt.m), 1e-12) << name;
        }
    }
    // z2 is Tr(IZ rho)/2, so the qubit-2 marginal is 1/2 + z2.
    for (size_t k = 0; k < 2; k++) {
        ASSERT_NEAR(data.get("pr_q2_up").points[k].mean, 0.5 + data.get("z2").points[k].mean, 1e-12);
    }
}

TEST(Protocols, experiments_two_and_three_agree_without_drive_crosstalk) {
    std::vector<size_t> lengths{1, 2};
    auto c2 = simultaneous_config(2, toy_crosstalk_for_experiment(2, 0.01, 0, 0.02, 0.015, 0.03), lengths);
    auto c3 = simultaneous_config(3, toy_crosstalk_for_experiment(3, 0.01, 0, 0.02, 0.015, 0.03), lengths);
    c2.sampling = c3.sampling = SequenceSampling::Exhaustive;
    auto e2 = run_simultaneous_rb(c2);
    auto e3 = run_simultaneous_rb(c3);
    for (size_t k = 0; k < lengths.size(); k++) {
        ASSERT_NEAR(e2.get("pr_q2_up").points[k].mean, e3.get("pr_q2_up").points[k].mean, 1e-12);
    }
}

TEST(Protocols, simultaneous_requires_two_qubits) {
    auto cfg = simultaneous_config(3, toy_crosstalk_for_experiment(3, 0, 0, 0, 0, 0), {1});
    cfg.noise = NoiseModel::ideal(1);
    ASSERT_THROW(run_simultaneous_rb(cfg), std::invalid_argument);
    cfg.experiment = 4;
    ASSERT_THROW(run_simultaneous_rb(cfg), std::invalid_argument);
}

TEST(Protocols, correlated_recovers_epsilon) {
    auto dec = irrep_decomposition(GroupKind::C1xC1);
    EpsilonSet eps{{0, 0.03, 0.05, 0.02}, false};
    auto alpha = alpha_from_epsilon(eps, dec);
    std::vector<double> lambda(16);
    for (size_t i = 0; i < 16; i++) {
        lambda[i] = alpha[dec.subspace_of(i)];
    }
    RbConfig cfg;
    cfg.protocol = ProtocolKind::Correlated;
    cfg.group = GroupKind::C1xC1;
    cfg.group_factors = 2;
    cfg.noise = pauli_channel_from_eigenvalues(2, lambda);
    cfg.spam = SpamModel::ideal(2);
    cfg.lengths = {1, 2, 4, 8, 16};
    cfg.sequences = 3;
    auto res = run_correlated_rb(cfg);
    ASSERT_TRUE(res.eps_valid) << res.eps_error;
    for (size_t s = 1; s < 4; s++) {
        ASSERT_NEAR(res.alpha[s], alpha[s], 1e-9);
        ASSERT_NEAR(res.eps.eps[s], eps.eps[s], 1e-8);
    }
    ASSERT_NEAR(res.delta_alpha, alpha_correlation(alpha), 1e-9);
}

TEST(Protocols, correlated_tensor_noise_has_no_joint_weight) {
    Ptm joint = tensor(compile(NoiseModel::depolarizing(1, 0.97)), compile(NoiseModel::depolarizing(1, 0.95)));
    std::vector<double> lambda(16);
    for (size_t i = 0; i < 16; i++) {
        lambda[i] = joint.mat(i, i);
    }
    RbConfig cfg;
    cfg.protocol = ProtocolKind::Correlated;
    cfg.group = GroupKind::C1xC1;
    cfg.group_factors = 2;
    cfg.noise = pauli_channel_from_eigenvalues(2, lambda);
    cfg.spam = SpamModel::ideal(2);
    cfg.lengths = {1, 3, 6, 10};
    cfg.sequences = 2;
    auto res = run_correlated_rb(cfg);
    ASSERT_TRUE(res.eps_valid);
    ASSERT_NEAR(res.eps.eps[3], 0, 1e-8);
    ASSERT_NEAR(res.delta_alpha, 0, 1e-10);
}

TEST(Protocols, correlated_ideal_and_missing_coverage) {
    RbConfig cfg;
    cfg.protocol = ProtocolKind::Correlated;
    cfg.group = GroupKind::C1xC1;
    cfg.group_factors = 2;
    cfg.noise = NoiseModel::ideal(2);
    cfg.spam = SpamModel::ideal(2);
    cfg.lengths = {1, 2, 3};
    auto res = run_correlated_rb(cfg);
    for (size_t s = 1; s < 4; s++) {
        ASSERT_NEAR(res.alpha[s], 1, 1e-12);
        ASSERT_NEAR(res.eps.eps[s], 0, 1e-12);
    }
    cfg.observables = {"coef:ZI", "coef:IZ"};
    ASSERT_THROW(run_correlated_rb(cfg), std::invalid_argument);
}

TEST(Protocols, interleaved_extra_target_noise) {
    RbConfig cfg = standard_config(NoiseModel::depolarizing(1, 0.99), {1, 2, 4, 8, 16, 32}, 3);
    cfg.protocol = ProtocolKind::Interleaved;
    cfg.target_gate = "H";
    cfg.target_noise = NoiseModel::depolarizing(1, 0.97);
    auto res = run_interleaved_rb(cfg);
    ASSERT_NEAR(res.p, 0.99, 1e-9);
    ASSERT_NEAR(res.p_interleaved, 0.99 * 0.97, 1e-9);
    ASSERT_NEAR(res.estimate.error_rate, 0.015, 1e-9);

    cfg.target_noise = NoiseModel::ideal(1);
    auto same = run_interleaved_rb(cfg);
    for (size_t k = 0; k < cfg.lengths.size(); k++) {
        ASSERT_NEAR(same.reference.series[0].points[k].mean, same.interleaved.series[0].points[k].mean, 1e-12);
    }
    ASSERT_NEAR(same.estimate.error_rate, 0, 1e-9);
}

TEST(Protocols, interleaved_target_must_fit_register) {
    RbConfig cfg = standard_config(NoiseModel::ideal(1), {1, 2, 3, 4}, 1);
    cfg.protocol = ProtocolKind::Interleaved;
    cfg.target_gate = "CNOT";
    ASSERT_ANY_THROW(run_interleaved_rb(cfg));
}

TEST(Protocols, observables) {
    auto o = parse_observable("pauli:ZI", 2, 0);
    ASSERT_EQ(o.pauli_index, (long)PauliString::from_str("ZI").index());
    auto rho = vectorize(basis_state(2, 1));
    ASSERT_NEAR(o.offset + o.scale * o.effect.coeffs.dot(rho.coeffs), 1, 1e-12);
    auto q = parse_observable("pr:2=1", 2, 0);
    ASSERT_NEAR(q.effect.coeffs.dot(rho.coeffs), 1, 1e-12);
    ASSERT_NEAR(parse_observable("basis:01", 2, 0).effect.coeffs.dot(rho.coeffs), 1, 1e-12);
    ASSERT_THROW(parse_observable("pr:3=0", 2, 0), std::invalid_argument);
    ASSERT_THROW(parse_observable("banana", 1, 0), std::invalid_argument);
    ASSERT_THROW(parse_observable("z1", 1, 0), std::invalid_argument);
}

TEST(Protocols, summary_statistics) {
    auto p = summarize(4, {1, 2, 3, 4});
    ASSERT_DOUBLE_EQ(p.mean, 2.5);
    ASSERT_DOUBLE_EQ(p.variance, 5.0 / 3.0);
    std::vector<double> v(1000, 0.1);
    ASSERT_NEAR(pairwise_sum(v.data(), v.size()), 100, 1e-12);
}
