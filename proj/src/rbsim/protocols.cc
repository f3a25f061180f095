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

#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <tuple>

namespace rbsim {

std::string protocol_name(ProtocolKind kind) {
    switch (kind) {
        case ProtocolKind::Standard:
            return "standard";
        case ProtocolKind::Simultaneous:
            return "simultaneous";
        case ProtocolKind::Correlated:
            return "correlated";
        case ProtocolKind::Interleaved:
            return "interleaved";
        case ProtocolKind::Shadow:
            return "shadow";
    }
    return "?";
}

ProtocolKind parse_protocol_name(const std::string &name) {
    for (auto k : {ProtocolKind::Standard, ProtocolKind::Simultaneous, ProtocolKind::Correlated,
                   ProtocolKind::Interleaved, ProtocolKind::Shadow}) {
        if (protocol_name(k) == name) {
            return k;
        }
    }
    throw std::invalid_argument("Unknown protocol '" + name + "'");
}

Observable parse_observable(const std::string &name, size_t num_qubits, size_t initial_state) {
    size_t d = hilbert_dim(num_qubits);
    auto projector = [&](size_t index) {
        return vectorize(basis_state(num_qubits, index));
    };
    auto pauli_obs = [&](const std::string &label, bool normalized) {
        auto p = PauliString::from_str(label);
        if (p.num_qubits() != num_qubits) {
            throw std::invalid_argument("Observable '" + name + "' has the wrong number of qubits");
        }
        // Pr(+1 eigenspace) with effect (I + P)/2, mapped to the +-1 expectation.
        ComplexMatrix eff = (ComplexMatrix::Identity(d, d) + pauli_matrix(p)) / 2.0;
        double norm = normalized ? std::sqrt((double)d) : 1.0;
        Observable o{name, vectorize(eff), 2 / norm, -1 / norm, (long)p.index()};
        if (p.index() == 0) {
            o.scale = 0;
            o.offset = 1 / norm;
        }
        return o;
    };
    auto marginal = [&](size_t qubit, int bit) {
        if (qubit >= num_qubits) {
            throw std::invalid_argument("Observable '" + name + "' names a qubit outside the register");
        }
        ComplexMatrix eff = ComplexMatrix::Zero(d, d);
        for (size_t x = 0; x < d; x++) {
            int b = (int)((x >> (num_qubits - 1 - qubit)) & 1);
            if (b == bit) {
                eff(x, x) = 1;
            }
        }
        return Observable{name, vectorize(eff), 1, 0};
    };

    if (name == "survival") {
        return Observable{name, projector(initial_state), 1, 0};
    }
    if (name.rfind("basis:", 0) == 0) {
        std::string bits = name.substr(6);
        if (bits.size() != num_qubits || bits.find_first_not_of("01") != std::string::npos) {
            throw std::invalid_argument("Bad basis observable '" + name + "'");
        }
        return Observable{name, projector(std::stoul(bits, nullptr, 2)), 1, 0};
    }
    if (name.rfind("pauli:", 0) == 0) {
        return pauli_obs(name.substr(6), false);
    }
    if (name.rfind("coef:", 0) == 0) {
        return pauli_obs(name.substr(5), true);
    }
    if (num_qubits == 2 && (name == "z1" || name == "z2" || name == "zz")) {
        auto o = pauli_obs(name == "z1" ? "ZI" : name == "z2" ? "IZ" : "ZZ", true);
        return o;
    }
    if (name == "pr_q1_up") {
        return marginal(0, 0);
    }
    if (name == "pr_q2_up") {
        return marginal(1, 0);
    }
    if (name.rfind("pr:", 0) == 0) {
        auto eq = name.find('=');
        if (eq == std::string::npos || eq + 2 != name.size() || (name.back() != '0' && name.back() != '1')) {
            throw std::invalid_argument("Bad marginal observable '" + name + "'");
        }
        size_t q = std::stoul(name.substr(3, eq - 3));
        if (q < 1) {
            throw std::invalid_argument("Qubits in marginal observables are counted from 1");
        }
        return marginal(q - 1, name.back() - '0');
    }
    throw std::invalid_argument("Unknown observable '" + name + "'");
}

size_t RbConfig::num_qubits() const {
    auto [kind, factors] = effective_group();
    return group_num_qubits(kind, factors);
}

std::pair<GroupKind, size_t> RbConfig::effective_group() const {
    if (protocol == ProtocolKind::Simultaneous) {
        switch (experiment) {
            case 1:
                return {GroupKind::C1xI, 1};
            case 2:
                return {GroupKind::IxC1, 1};
            case 3:
                return {GroupKind::C1xC1, 2};
            default:
                throw std::invalid_argument("Simultaneous experiment must be 1, 2 or 3");
        }
    }
    return {group, group_factors};
}

void RbConfig::validate() const {
    auto [kind, factors] = effective_group();
    size_t n = group_num_qubits(kind, factors);
    if (lengths.empty()) {
        throw std::invalid_argument("At least one sequence length is required");
    }
    for (auto m : lengths) {
        if (m == 0) {
            throw std::invalid_argument("Sequence lengths must be at least 1");
        }
    }
    if (sequences == 0) {
        throw std::invalid_argument("Sequences per length must be at least 1");
    }
    if (noise.num_qubits != n) {
        throw std::invalid_argument("Noise model acts on " + std::to_string(noise.num_qubits) + " qubits but the " +
                                    group_name(kind, factors) + " register has " + std::to_string(n));
    }
    if (spam.prep.num_qubits != n || spam.meas.num_qubits != n) {
        throw std::invalid_argument("SPAM models act on the wrong number of qubits");
    }
    noise.validate();
    spam.prep.validate();
    spam.meas.validate();
    if (initial_state >= hilbert_dim(n)) {
        throw std::invalid_argument("Initial state index out of range");
    }
    if (sampling == SequenceSampling::Exhaustive && shots != 0) {
        throw std::invalid_argument("Exhaustive enumeration is exact; set shots to 0");
    }
    switch (protocol) {
        case ProtocolKind::Standard:
            break;
        case ProtocolKind::Simultaneous:
            if (n != 2) {
                throw std::invalid_argument("Simultaneous benchmarking uses a 2-qubit register");
            }
            break;
        case ProtocolKind::Correlated:
            if (kind != GroupKind::C1xC1 && kind != GroupKind::C1Power) {
                throw std::invalid_argument("Correlated benchmarking samples from C1xC1 or C1^k");
            }
            break;
        case ProtocolKind::Interleaved:
            if (kind != GroupKind::C1 && kind != GroupKind::C2) {
                throw std::invalid_argument("Interleaved benchmarking uses C1 or C2");
            }
            if (target_noise.num_qubits != n) {
                throw std::invalid_argument("Target-gate noise acts on the wrong number of qubits");
            }
            target_noise.validate();
            break;
        case ProtocolKind::Shadow:
            if (shots == 0) {
                throw std::invalid_argument("Shadow collection records measured bit strings; shots must be at least 1");
            }
            break;
    }
    for (const auto &o : observables) {
        parse_observable(o, n, initial_state);
    }
}

std::vector<double> DecaySeries::lengths() const {
    std::vector<double> out;
    for (const auto &p : points) {
        out.push_back((double)p.m);
    }
    return out;
}

std::vector<double> DecaySeries::means() const {
    std::vector<double> out;
    for (const auto &p : points) {
        out.push_back(p.mean);
    }
    return out;
}

const DecaySeries &DecayDataset::get(const std::string &observable) const {
    for (const auto &s : series) {
        if (s.observable == observable) {
            return s;
        }
    }
    throw std::invalid_argument("No series for observable '" + observable + "'");
}

size_t resolve_thread_count(size_t requested) {
    if (requested > 0) {
        return requested;
    }
    if (const char *env = std::getenv("RBSIM_THREADS")) {
        long v = std::strtol(env, nullptr, 10);
        if (v > 0) {
            return (size_t)v;
        }
    }
    return std::max<size_t>(1, std::thread::hardware_concurrency());
}

void parallel_for(size_t n, size_t threads, const std::function<void(size_t, size_t)> &fn) {
    threads = std::max<size_t>(1, std::min(threads, n));
    if (threads <= 1) {
        fn(0, n);
        return;
    }
    std::vector<std::thread> workers;
    std::exception_ptr failure;
    std::mutex mu;
    size_t chunk = (n + threads - 1) / threads;
    for (size_t t = 0; t < threads; t++) {
        size_t begin = t * chunk, end = std::min(n, begin + chunk);
        if (begin >= end) {
            break;
        }
        workers.emplace_back([&, begin, end] {
            try {
                fn(begin, end);
            } catch (...) {
                std::lock_guard<std::mutex> lock(mu);
                if (!failure) {
                    failure = std::current_exception();
                }
            }
        });
    }
    for (auto &w : workers) {
        w.join();
    }
    if (failure) {
        std::rethrow_exception(failure);
    }
}

double pairwise_sum(const double *values, size_t n) {
    if (n <= 8) {
        double s = 0;
        for (size_t k = 0; k < n; k++) {
            s += values[k];
        }
        return s;
    }
    size_t half = n / 2;
    return pairwise_sum(values, half) + pairwise_sum(values + half, n - half);
}

DecayPoint summarize(size_t m, const std::vector<double> &values) {
    DecayPoint p;
    p.m = m;
    p.count = values.size();
    if (values.empty()) {
        return p;
    }
    p.mean = pairwise_sum(values.data(), values.size()) / (double)values.size();
    if (values.size() > 1) {
        std::vector<double> sq(values.size());
        for (size_t k = 0; k < values.size(); k++) {
            sq[k] = (values[k] - p.mean) * (values[k] - p.mean);
        }
        p.variance = pairwise_sum(sq.data(), sq.size()) / (double)(values.size() - 1);
    }
    return p;
}

namespace {

constexpr uint64_t STREAM_REFERENCE = 1;
constexpr uint64_t STREAM_INTERLEAVED = 2;

struct Engine {
    const GateSetGroup &group;
    RealMatrix noise;
    bool noise_trivial;
    RealMatrix target_pre;
    bool target_pre_trivial = true;
    std::optional<CliffordElement> target;
    RealVector rho;
    std::vector<Observable> observables;
    size_t shots;

    Engine(const RbConfig &cfg, const GateSetGroup &g, std::vector<Observable> obs)
        : group(g), shots(cfg.shots) {
        noise = compile(cfg.noise).mat;
        noise_trivial = cfg.noise.kind == NoiseKind::Ideal;
        size_t n = g.num_qubits;
        rho = dress_state(cfg.spam, vectorize(basis_state(n, cfg.initial_state))).coeffs;
        for (auto &o : obs) {
            o.effect = dress_effect(cfg.spam, o.effect);
        }
        observables = std::move(obs);
    }

    void apply_noise(const RealMatrix &m, RealVector &v, RealVector &tmp) const {
        tmp.noalias() = m * v;
        v.swap(tmp);
    }

    void apply_gate(const CliffordElement &c, RealVector &v, RealVector &tmp) const {
        c.apply_to(v, tmp);
        v.swap(tmp);
    }

    // Final state of one word; the inverse closes the whole word including interleaved targets.
    RealVector run(const size_t *idx, size_t m) const {
        RealVector v = rho, tmp(rho.size());
        CliffordElement total = CliffordElement::identity(group.num_qubits);
        for (size_t k = 0; k < m; k++) {
            const auto &c = group.elements[idx[k]];
            apply_gate(c, v, tmp);
            total = compose(c, total);
            if (!noise_trivial) {
                apply_noise(noise, v, tmp);
            }
            if (target.has_value()) {
                if (!target_pre_trivial) {
                    apply_noise(target_pre, v, tmp);
                }
                apply_gate(*target, v, tmp);
                total = compose(*target, total);
            }
        }
        apply_gate(inverse(total), v, tmp);
        if (!noise_trivial) {
            apply_noise(noise, v, tmp);
        }
        return v;
    }

    void measure(const RealVector &state, RngStream &rng, double *out) const {
        for (size_t o = 0; o < observables.size(); o++) {
            const auto &obs = observables[o];
            double prob = obs.effect.coeffs.dot(state);
            if (shots == 0) {
                out[o] = obs.offset + obs.scale * prob;
            } else {
                double k = (double)rng.binomial(shots, prob);
                out[o] = obs.offset + obs.scale * k / (double)shots;
            }
        }
    }
};

DecayDataset run_engine(const RbConfig &cfg, const Engine &engine, uint64_t stream_tag) {
    size_t nobs = engine.observables.size();
    size_t threads = resolve_thread_count(cfg.threads);
    DecayDataset data;
    auto [kind, factors] = cfg.effective_group();
    data.protocol = protocol_name(cfg.protocol);
    data.group = group_name(kind, factors);
    for (const auto &o : engine.observables) {
        data.series.push_back(DecaySeries{o.name, {}});
    }
    for (size_t mi = 0; mi < cfg.lengths.size(); mi++) {
        size_t m = cfg.lengths[mi];
        std::vector<double> values;
        size_t count;
        if (cfg.sampling == SequenceSampling::Exhaustive) {
            double total = std::pow((double)engine.group.order(), (double)m);
            if (total > 5e6) {
                throw std::invalid_argument("Exhaustive enumeration over " + std::to_string((size_t)total) +
                                            " words is too large");
            }
            count = (size_t)total;
            values.assign(count * nobs, 0.0);
            parallel_for(count, threads, [&](size_t begin, size_t end) {
                std::vector<size_t> idx(m);
                RngStream unused(0);
                for (size_t w = begin; w < end; w++) {
                    size_t rest = w;
                    for (size_t k = 0; k < m; k++) {
                        idx[k] = rest % engine.group.order();
                        rest /= engine.group.order();
                    }
                    engine.measure(engine.run(idx.data(), m), unused, &values[w * nobs]);
                }
            });
        } else {
            count = cfg.sequences;
            values.assign(count * nobs, 0.0);
            parallel_for(count, threads, [&](size_t begin, size_t end) {
                for (size_t k = begin; k < end; k++) {
                    RngStream rng(cfg.seed, {stream_tag, (uint64_t)m, (uint64_t)k});
                    auto idx = sample_indices(engine.group, rng, m);
                    engine.measure(engine.run(idx.data(), m), rng, &values[k * nobs]);
                }
            });
        }
        for (size_t o = 0; o < nobs; o++) {
            std::vector<double> col(count);
            for (size_t k = 0; k < count; k++) {
                col[k] = values[k * nobs + o];
            }
            data.series[o].points.push_back(summarize(m, col));
        }
    }
    return data;
}

std::vector<Observable> build_observables(const RbConfig &cfg, const std::vector<std::string> &defaults) {
    size_t n = cfg.num_qubits();
    std::vector<Observable> out;
    for (const auto &name : cfg.observables.empty() ? defaults : cfg.observables) {
        out.push_back(parse_observable(name, n, cfg.initial_state));
    }
    return out;
}

}  // namespace

DecayDataset run_standard_rb(const RbConfig &config) {
    config.validate();
    auto [kind, factors] = config.effective_group();
    const auto &group = cached_group(kind, factors);
    Engine engine(config, group, build_observables(config, {"survival"}));
    return run_engine(config, engine, STREAM_REFERENCE);
}

DecayDataset run_simultaneous_rb(const RbConfig &config) {
    RbConfig cfg = config;
    cfg.protocol = ProtocolKind::Simultaneous;
    cfg.validate();
    auto [kind, factors] = cfg.effective_group();
    const auto &group = cached_group(kind, factors);
    Engine engine(cfg, group, build_observables(cfg, {"survival", "z1", "z2", "zz", "pr_q1_up", "pr_q2_up"}));
    return run_engine(cfg, engine, STREAM_REFERENCE);
}

namespace {

struct CorrelatedSetup {
    RbConfig cfg;
    IrrepDecomposition dec;
    std::vector<Observable> obs;
    std::vector<long> subspace_of_obs;
};

CorrelatedSetup correlated_setup(const RbConfig &config) {
    CorrelatedSetup out;
    RbConfig &cfg = out.cfg;
    cfg = config;
    cfg.protocol = ProtocolKind::Correlated;
    cfg.validate();
    auto [kind, factors] = cfg.effective_group();
    const auto &group = cached_group(kind, factors);
    out.dec = irrep_decomposition(kind, factors);
    const auto &dec = out.dec;
    size_t n = group.num_qubits;

    // Default correlators: Z on exactly the support of each nontrivial subspace.
    std::vector<std::string> defaults;
    for (size_t s = 1; s < dec.subspaces.size(); s++) {
        std::string label;
        for (size_t q = 0; q < n; q++) {
            label.push_back(((s >> (n - 1 - q)) & 1) ? 'Z' : 'I');
        }
        defaults.push_back("coef:" + label);
    }
    out.obs = build_observables(cfg, defaults);
    const auto &obs = out.obs;
    auto &subspace_of_obs = out.subspace_of_obs;
    std::vector<bool> covered(dec.subspaces.size(), false);
    for (const auto &o : obs) {
        if (o.pauli_index <= 0) {
            throw std::invalid_argument("Correlated benchmarking needs non-identity Pauli observables, got '" + o.name + "'");
        }
        size_t s = dec.subspace_of((size_t)o.pauli_index);
        subspace_of_obs.push_back((long)s);
        covered[s] = true;
    }
    for (size_t s = 1; s < dec.subspaces.size(); s++) {
        if (!covered[s]) {
            throw std::invalid_argument("No correlator observable covers subspace " + dec.subspaces[s].label);
        }
    }

    return out;
}

}  // namespace

DecayDataset simulate_correlated(const RbConfig &config) {
    auto setup = correlated_setup(config);
    auto [kind, factors] = setup.cfg.effective_group();
    Engine engine(setup.cfg, cached_group(kind, factors), setup.obs);
    return run_engine(setup.cfg, engine, STREAM_REFERENCE);
}

CorrelatedResult run_correlated_rb(const RbConfig &config) {
    auto setup = correlated_setup(config);
    const auto &cfg = setup.cfg;
    const auto &dec = setup.dec;
    const auto &obs = setup.obs;
    const auto &subspace_of_obs = setup.subspace_of_obs;
    auto [kind, factors] = cfg.effective_group();
    const auto &group = cached_group(kind, factors);
    size_t n = group.num_qubits;
    Engine engine(cfg, group, obs);
    CorrelatedResult res;
    res.data = run_engine(cfg, engine, STREAM_REFERENCE);
    DecayModel model = DecayModel::parse(cfg.fit_model.empty() ? "power" : cfg.fit_model);
    res.alpha.labels.clear();
    res.alpha.values.assign(dec.subspaces.size(), 1.0);
    for (const auto &s : dec.subspaces) {
        res.alpha.labels.push_back(s.label);
    }
    std::vector<bool> assigned(dec.subspaces.size(), false);
    for (size_t k = 0; k < obs.size(); k++) {
        const auto &series = res.data.series[k];
        auto f = fit(model, series.lengths(), series.means());
        size_t rate_index = model.rate_params().front();
        size_t s = (size_t)subspace_of_obs[k];
        if (!assigned[s]) {
            res.alpha.values[s] = f.params[rate_index];
            assigned[s] = true;
        }
        res.fits.push_back(std::move(f));
    }
    if (dec.subspaces.size() == 4) {
        res.delta_alpha = alpha_correlation(res.alpha);
    }
    if (dec.subspaces.size() == 2 || (dec.subspaces.size() == 4 && n == 2)) {
        try {
            res.eps = epsilon_from_alpha(res.alpha, dec);
            res.eps_valid = true;
        } catch (const std::domain_error &e) {
            res.eps_error = e.what();
        }
    }
    return res;
}

std::pair<DecayDataset, DecayDataset> simulate_interleaved(const RbConfig &config) {
    RbConfig cfg = config;
    cfg.protocol = ProtocolKind::Interleaved;
    cfg.validate();
    auto [kind, factors] = cfg.effective_group();
    const auto &group = cached_group(kind, factors);
    size_t n = group.num_qubits;
    auto target = CliffordElement::from_unitary(named_gate_unitary(cfg.target_gate, n));
    if (!group.index_of(target).has_value()) {
        throw std::invalid_argument("Target gate " + cfg.target_gate + " is not in " + group_name(kind, factors));
    }
    auto obs = build_observables(cfg, {"survival"});
    Engine reference(cfg, group, obs);
    auto ref = run_engine(cfg, reference, STREAM_REFERENCE);
    Engine interleaved(cfg, group, obs);
    interleaved.target = target;
    interleaved.target_pre = compile(cfg.target_noise).mat;
    interleaved.target_pre_trivial = cfg.target_noise.kind == NoiseKind::Ideal;
    auto inter = run_engine(cfg, interleaved, STREAM_INTERLEAVED);
    inter.protocol = "interleaved";
    return {std::move(ref), std::move(inter)};
}

InterleavedResult run_interleaved_rb(const RbConfig &config) {
    InterleavedResult res;
    std::tie(res.reference, res.interleaved) = simulate_interleaved(config);
    DecayModel model = DecayModel::parse(config.fit_model.empty() ? "single_exp" : config.fit_model);
    size_t n = config.num_qubits();

    const auto &rs = res.reference.series.front();
    const auto &is = res.interleaved.series.front();
    res.reference_fit = fit(model, rs.lengths(), rs.means());
    res.interleaved_fit = fit(model, is.lengths(), is.means());
    size_t rate = model.rate_params().front();
    res.p = res.reference_fit.params[rate];
    res.p_interleaved = res.interleaved_fit.params[rate];
    if (model.kind == ModelKind::DirectFidelity) {
        res.p = 2 * res.p - 1;
        res.p_interleaved = 2 * res.p_interleaved - 1;
    }
    res.estimate = interleaved_estimate(res.p, res.p_interleaved, hilbert_dim(n));
    return res;
}

}  // namespace rbsim
