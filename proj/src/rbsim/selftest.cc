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

#include "rbsim/selftest.h"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "rbsim/noise.h"
#include "rbsim/twirl.h"

namespace rbsim {

SelftestInjection parse_injection(const std::string &name) {
    if (name.empty() || name == "none") {
        return SelftestInjection::None;
    }
    if (name == "wrong-c2-generators") {
        return SelftestInjection::WrongC2Generators;
    }
    if (name == "tampered-rdepol") {
        return SelftestInjection::TamperedRdepol;
    }
    throw std::invalid_argument("Unknown injection '" + name + "' (wrong-c2-generators, tampered-rdepol)");
}

namespace {

std::string num(double v) {
    std::ostringstream ss;
    ss.precision(3);
    ss << v;
    return ss.str();
}

SelftestCheck group_orders(SelftestInjection injection) {
    size_t c1 = cached_group(GroupKind::C1).order();
    size_t c2;
    if (injection == SelftestInjection::WrongC2Generators) {
        auto gens = group_generators(GroupKind::C2);
        gens.pop_back();
        c2 = generate_closure(GroupKind::C2, 2, gens).order();
    } else {
        c2 = cached_group(GroupKind::C2).order();
    }
    return {"group orders |C1| = 24, |C2| = 11520", c1 == 24 && c2 == 11520,
            "|C1| = " + std::to_string(c1) + ", |C2| = " + std::to_string(c2)};
}

double off_diagonal(const Ptm &r) {
    RealMatrix off = r.mat;
    off.diagonal().setZero();
    RealVector diag = r.mat.diagonal().tail(r.dim() - 1);
    return std::max(off.cwiseAbs().maxCoeff(), diag.maxCoeff() - diag.minCoeff());
}

SelftestCheck twirl_is_depolarizing(GroupKind kind, size_t channels, double tol, uint64_t seed) {
    RngStream rng(seed);
    size_t n = group_num_qubits(kind);
    const auto &group = cached_group(kind);
    double worst = 0;
    for (size_t k = 0; k < channels; k++) {
        Ptm lam = ptm_from_kraus(random_kraus_channel(hilbert_dim(n), 3, rng));
        worst = std::max(worst, off_diagonal(exhaustive_twirl(lam, group)));
    }
    return {"twirl over " + group_name(kind) + " is depolarizing", worst < tol, "max deviation " + num(worst)};
}

SelftestCheck twirl_is_invariant() {
    RngStream rng(21);
    const auto &group = cached_group(GroupKind::C1);
    Ptm lam = ptm_from_kraus(random_kraus_channel(2, 3, rng));
    Ptm base = exhaustive_twirl(lam, group);
    double worst = 0;
    for (size_t k = 0; k < group.order(); k += 5) {
        Ptm c(1, group.ptms[k]);
        Ptm conj = compose(adjoint(c), compose(lam, c));
        worst = std::max(worst, (exhaustive_twirl(conj, group).mat - base.mat).cwiseAbs().maxCoeff());
    }
    return {"twirl is invariant under conjugation by group elements", worst < 1e-12, "max deviation " + num(worst)};
}

SelftestCheck stabilizer_states_form_design() {
    RngStream rng(22);
    Ptm lam = ptm_from_kraus(random_kraus_channel(2, 2, rng));
    // Average fidelity over the six single-qubit stabilizer states.
    double avg = 0;
    for (size_t axis = 1; axis < 4; axis++) {
        for (double sign : {1.0, -1.0}) {
            RealVector v = RealVector::Zero(4);
            v(0) = 1 / std::sqrt(2.0);
            v(axis) = sign / std::sqrt(2.0);
            avg += v.dot(lam.mat * v) / 6;
        }
    }
    double ref = average_gate_fidelity(lam);
    return {"stabilizer states reproduce the Haar-average fidelity", std::abs(avg - ref) < 1e-12,
            "difference " + num(std::abs(avg - ref))};
}

SelftestCheck crosstalk_table() {
    ToyCrosstalkParams t{1, 1, 0.3, 0.011, 0.017, 0.0, 0.023, 0.009, 0.04};
    t.p02 = 1 - (t.p01 + t.p11 + t.p21 + t.p12 + t.p22 + t.p_zz);
    Ptm r = compile(NoiseModel::toy_crosstalk(t));
    auto at = [&](const char *s) {
        size_t k = PauliString::from_str(s).index();
        return r.mat(k, k);
    };
    double worst = 0;
    auto check = [&](double got, double want) { worst = std::max(worst, std::abs(got - want)); };
    check(at("II"), 1);
    check(at("IX"), 1 - 2 * t.p_zz);
    check(at("XI"), 1 - 2 * t.p_zz);
    check(at("IZ"), 1 - 2 * (t.p21 + t.p12));
    check(at("ZI"), 1 - 2 * (t.p11 + t.p22));
    check(at("XX"), 1);
    check(at("YY"), 2 * (t.p01 + t.p02 + t.p_zz) - 1);
    check(at("ZZ"), 2 * (t.p01 + t.p02 + t.p_zz) - 1);
    check(at("XZ"), 1 - 2 * (t.p21 + t.p12 + t.p_zz));
    check(at("ZX"), 1 - 2 * (t.p11 + t.p22 + t.p_zz));
    return {"crosstalk toy model eigenvalue table", worst < 1e-14, "max deviation " + num(worst)};
}

SelftestCheck weight_round_trip(SelftestInjection injection) {
    auto dec = irrep_decomposition(GroupKind::C1xC1);
    RdepolFunction rdepol = r_depol;
    if (injection == SelftestInjection::TamperedRdepol) {
        rdepol = [](const IrrepDecomposition &d, size_t s, size_t i) { return r_depol(d, s, i) + 0.01; };
    }
    RngStream rng(23);
    double worst = 0;
    size_t failures = 0;
    for (int k = 0; k < 50; k++) {
        EpsilonSet eps{{0, rng.uniform(), rng.uniform(), 5.0 / 6.0 * rng.uniform()}, false};
        try {
            auto back = epsilon_from_alpha(alpha_from_epsilon(eps, dec, rdepol), dec);
            for (size_t s = 1; s < 4; s++) {
                worst = std::max(worst, std::abs(back.eps[s] - eps.eps[s]));
            }
        } catch (const std::exception &) {
            failures++;
        }
    }
    bool spot = r_depol(dec, 3, PauliString::from_str("IX").index()) == -0.2 &&
                r_depol(dec, 3, PauliString::from_str("XX").index()) == 0.2;
    bool ok = failures == 0 && worst < 1e-9 && spot;
    return {"fixed-subspace weight round trip", ok,
            "max deviation " + num(worst) + ", " + std::to_string(failures) + " inversions failed"};
}

}  // namespace

std::vector<SelftestCheck> run_selftest(SelftestInjection injection) {
    std::vector<SelftestCheck> out;
    out.push_back(group_orders(injection));
    out.push_back(twirl_is_invariant());
    out.push_back(stabilizer_states_form_design());
    out.push_back(twirl_is_depolarizing(GroupKind::C1, 20, 1e-10, 24));
    out.push_back(twirl_is_depolarizing(GroupKind::C2, 1, 1e-9, 25));
    out.push_back(crosstalk_table());
    out.push_back(weight_round_trip(injection));
    return out;
}

}  // namespace rbsim
