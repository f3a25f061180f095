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

#include "rbsim/clifford.h"

#include <gtest/gtest.h>

#include <set>

using namespace rbsim;

TEST(Clifford, group_orders) {
    ASSERT_EQ(cached_group(GroupKind::C1).order(), 24u);
    ASSERT_EQ(cached_group(GroupKind::C2).order(), 11520u);
    ASSERT_EQ(cached_group(GroupKind::C1xC1).order(), 576u);
    ASSERT_EQ(cached_group(GroupKind::C1xI).order(), 24u);
    ASSERT_EQ(cached_group(GroupKind::IxC1).order(), 24u);
    ASSERT_EQ(cached_group(GroupKind::C1Power, 1).order(), 24u);
}

TEST(Clifford, elements_preserve_commutation_and_are_distinct) {
    const auto &g = cached_group(GroupKind::C2);
    std::set<std::string> keys;
    for (const auto &e : g.elements) {
        ASSERT_TRUE(e.preserves_commutation());
        keys.insert(e.key());
    }
    ASSERT_EQ(keys.size(), g.order());
}

TEST(Clifford, closure_under_composition) {
    const auto &g = cached_group(GroupKind::C1);
    for (const auto &a : g.elements) {
        for (const auto &b : g.elements) {
            ASSERT_TRUE(g.index_of(compose(a, b)).has_value());
        }
    }
}

TEST(Clifford, compose_matches_ptm_product) {
    const auto &g = cached_group(GroupKind::C2);
    RngStream rng(1);
    for (int t = 0; t < 50; t++) {
        auto a = g.elements[rng.below(g.order())];
        auto b = g.elements[rng.below(g.order())];
        ASSERT_TRUE(approx_equal(compose(a, b).to_ptm().mat, (a.to_ptm().mat * b.to_ptm().mat).eval(), 0));
        ASSERT_EQ(compose(a, inverse(a)), CliffordElement::identity(2));
    }
}

TEST(Clifford, from_unitary_matches_ptm_of_unitary) {
    ComplexMatrix u = cnot_unitary() * embed_single_qubit(hadamard_unitary(), 1, 2);
    auto c = CliffordElement::from_unitary(u);
    ASSERT_TRUE(approx_equal(c.to_ptm().mat, ptm_from_unitary(u).mat, 1e-12));
    ComplexMatrix t(2, 2);
    t << 1, 0, 0, std::polar(1.0, M_PI / 4);
    ASSERT_THROW(CliffordElement::from_unitary(t), std::invalid_argument);
}

TEST(Clifford, sequence_inverse_returns_to_identity) {
    const auto &g = cached_group(GroupKind::C2);
    RngStream rng(2);
    for (size_t m : {1, 2, 7, 30}) {
        auto seq = sample_uniform(g, rng, m);
        auto inv = sequence_inverse(seq);
        CliffordElement total = CliffordElement::identity(2);
        for (const auto &e : seq) {
            total = compose(e, total);
        }
        ASSERT_EQ(compose(inv, total), CliffordElement::identity(2));
    }
    ASSERT_THROW(sequence_inverse({}), std::invalid_argument);
    ASSERT_THROW(sample_indices(g, rng, 0), std::invalid_argument);
}

TEST(Clifford, pulse_table_covers_c1) {
    const auto &g = cached_group(GroupKind::C1);
    std::set<size_t> hit;
    for (size_t row = 1; row <= 24; row++) {
        auto idx = g.index_of(CliffordElement::from_unitary(c1_table_unitary(row)));
        ASSERT_TRUE(idx.has_value()) << row;
        hit.insert(*idx);
    }
    ASSERT_EQ(hit.size(), 24u);
    ASSERT_DOUBLE_EQ(mean_pulses_per_c1(), 1.875);
}

TEST(Clifford, seeded_streams_are_reproducible_and_distinct) {
    const auto &g = cached_group(GroupKind::C1);
    RngStream a(7, {1, 2}), b(7, {1, 2}), c(7, {1, 3});
    auto sa = sample_indices(g, a, 20);
    ASSERT_EQ(sa, sample_indices(g, b, 20));
    ASSERT_NE(sa, sample_indices(g, c, 20));
}

TEST(Clifford, wrong_generators_give_wrong_order) {
    auto gens = group_generators(GroupKind::C2);
    gens.pop_back();  // drop the entangling gate
    auto g = generate_closure(GroupKind::C2, 2, gens);
    ASSERT_EQ(g.order(), 576u);
}

TEST(Clifford, parse_group_names) {
    ASSERT_EQ(parse_group_name("C2").first, GroupKind::C2);
    ASSERT_EQ(parse_group_name("C1^3").second, 3u);
    ASSERT_EQ(group_name(GroupKind::C1Power, 2), "C1^2");
    ASSERT_THROW(parse_group_name("C3"), std::invalid_argument);
}

TEST(Clifford, named_gates_are_clifford) {
    for (auto name : {"H", "S", "SDG", "SX", "X", "Y", "Z", "I", "c1row:13"}) {
        ASSERT_TRUE(cached_group(GroupKind::C1).index_of(CliffordElement::from_unitary(named_gate_unitary(name, 1))));
    }
    for (auto name : {"CNOT", "CZ", "SWAP", "H1", "S0"}) {
        ASSERT_TRUE(cached_group(GroupKind::C2).index_of(CliffordElement::from_unitary(named_gate_unitary(name, 2))));
    }
    ASSERT_THROW(named_gate_unitary("T", 1), std::invalid_argument);
}
