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

#include "rbsim/noise.h"

#include <gtest/gtest.h>

#include "rbsim/random.h"

using namespace rbsim;

namespace {

ToyCrosstalkParams sample_toy() {
    ToyCrosstalkParams t;
    t.p11 = 0.02;
    t.p21 = 0.013;
    t.p12 = 0.031;
    t.p22 = 0.007;
    t.p_zz = 0.05;
    t.p01 = 0.4;
    t.p02 = 1 - t.p01 - t.p11 - t.p21 - t.p12 - t.p22 - t.p_zz;
    return t;
}

}  // namespace

TEST(Noise, depolarizing_is_scaled_identity) {
    auto r = compile(NoiseModel::depolarizing(1, 0.97));
    RealMatrix expected = RealMatrix::Identity(4, 4) * 0.97;
    expected(0, 0) = 1;
    ASSERT_TRUE(approx_equal(r.mat, expected, 1e-15));
    auto r2 = compile(NoiseModel::depolarizing(2, 0.9));
    ASSERT_NEAR(r2.mat(5, 5), 0.9, 1e-15);
    ASSERT_NEAR(r2.mat(0, 0), 1, 1e-15);
}

TEST(Noise, ideal_is_identity) {
    ASSERT_TRUE(approx_equal(compile(NoiseModel::ideal(2)).mat, RealMatrix::Identity(16, 16), 0));
}

TEST(Noise, pauli_diagonal_variants_match_kraus_route) {
    std::vector<NoiseModel> models = {
        NoiseModel::depolarizing(2, 0.93),
        NoiseModel::pauli_channel(1, {{"I", 0.9}, {"X", 0.05}, {"Y", 0.03}, {"Z", 0.02}}),
        NoiseModel::toy_crosstalk(sample_toy()),
    };
    for (const auto &m : models) {
        auto kraus = m.kraus_operators();
        ASSERT_TRUE(approx_equal(compile(m).mat, ptm_from_kraus(kraus).mat, 1e-13)) << m.describe();
    }
}

TEST(Noise, toy_crosstalk_eigenvalue_table) {
    auto t = sample_toy();
    auto r = compile(NoiseModel::toy_crosstalk(t));
    auto at = [&](const char *s) {
        size_t k = PauliString::from_str(s).index();
        return r.mat(k, k);
    };
    // Eigenvalues of the crosstalk map on each Pauli pair.
    double both_drives_on_second = 1 - 2 * (t.p21 + t.p12);
    double both_drives_on_first = 1 - 2 * (t.p11 + t.p22);
    ASSERT_NEAR(at("II"), 1, 1e-14);
    ASSERT_NEAR(at("IX"), 1 - 2 * t.p_zz, 1e-14);
    ASSERT_NEAR(at("XI"), 1 - 2 * t.p_zz, 1e-14);
    ASSERT_NEAR(at("IZ"), both_drives_on_second, 1e-14);
    ASSERT_NEAR(at("ZI"), both_drives_on_first, 1e-14);
    ASSERT_NEAR(at("YY"), 2 * (t.p01 + t.p02 + t.p_zz) - 1, 1e-14);
    ASSERT_NEAR(at("ZZ"), 2 * (t.p01 + t.p02 + t.p_zz) - 1, 1e-14);
    ASSERT_NEAR(at("XX"), 1, 1e-14);
    ASSERT_NEAR(at("XZ"), 1 - 2 * (t.p21 + t.p12 + t.p_zz), 1e-14);
    ASSERT_TRUE(r.is_trace_preserving(1e-14));
    // Off-diagonal entries vanish.
    RealMatrix off = r.mat;
    off.diagonal().setZero();
    ASSERT_EQ(off.cwiseAbs().maxCoeff(), 0);
}

TEST(Noise, toy_crosstalk_trace_violation_is_an_error) {
    auto t = sample_toy();
    t.p_zz += 0.01;
    try {
        NoiseModel::toy_crosstalk(t);
        FAIL() << "expected an exception";
    } catch (const std::invalid_argument &e) {
        ASSERT_NE(std::string(e.what()).find("trace-preservation"), std::string::npos);
    }
}

TEST(Noise, invalid_parameters_rejected) {
    ASSERT_THROW(NoiseModel::depolarizing(1, 1.2), std::invalid_argument);
    ASSERT_THROW(NoiseModel::depolarizing(1, -0.5), std::invalid_argument);
    ASSERT_NO_THROW(NoiseModel::depolarizing(1, -1.0 / 3));
    ASSERT_THROW(NoiseModel::pauli_channel(1, {{"I", 0.9}, {"X", 0.2}}), std::invalid_argument);
    ASSERT_THROW(NoiseModel::pauli_channel(1, {{"I", 1.1}, {"X", -0.1}}), std::invalid_argument);
    ASSERT_THROW(NoiseModel::pauli_channel(1, {{"II", 1.0}}), std::invalid_argument);
    std::vector<ComplexMatrix> not_tp = {ComplexMatrix::Identity(2, 2) * 0.9};
    ASSERT_THROW(NoiseModel::raw_kraus(not_tp), std::invalid_argument);
}

TEST(Noise, raw_kraus_compiles) {
    RngStream rng(4);
    auto kraus = random_kraus_channel(2, 3, rng);
    auto m = NoiseModel::raw_kraus(kraus);
    ASSERT_TRUE(approx_equal(compile(m).mat, ptm_from_kraus(kraus).mat, 1e-14));
    ASSERT_FALSE(m.is_pauli_diagonal());
}

TEST(Noise, toy_crosstalk_for_experiment_fills_slack) {
    for (int e = 1; e <= 3; e++) {
        auto t = toy_crosstalk_for_experiment(e, 0.01, 0.02, 0.03, 0.04, 0.05);
        ASSERT_NO_THROW(NoiseModel::toy_crosstalk(t));
    }
    ASSERT_THROW(NoiseModel::toy_crosstalk(toy_crosstalk_for_experiment(3, 0.5, 0.5, 0.1, 0, 0)), std::invalid_argument);
}

TEST(Noise, spam_dressing) {
    auto spam = SpamModel{NoiseModel::pauli_channel(1, {{"I", 0.95}, {"X", 0.05}}),
                          NoiseModel::pauli_channel(1, {{"I", 0.9}, {"X", 0.1}})};
    auto rho = vectorize(basis_state(1, 0));
    auto e0 = vectorize(basis_state(1, 0));
    // P(0) after a 5% prep flip and a 10% readout flip.
    double p0 = expectation(dress_effect(spam, e0), dress_state(spam, rho));
    ASSERT_NEAR(p0, 0.95 * 0.9 + 0.05 * 0.1, 1e-14);
}
