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

#include "rbsim/config.h"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

namespace rbsim {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string &path, const std::string &msg) {
    throw ConfigError(path + ": " + msg);
}

void check_object(const json &j, const std::string &path, const std::vector<std::string> &allowed) {
    if (!j.is_object()) {
        fail(path, "expected an object");
    }
    for (const auto &item : j.items()) {
        if (std::find(allowed.begin(), allowed.end(), item.key()) == allowed.end()) {
            fail(path + "." + item.key(), "unknown key");
        }
    }
}

void require(const json &j, const std::string &path, const std::string &key) {
    if (!j.contains(key)) {
        fail(path + "." + key, "required key is missing");
    }
}

uint64_t as_uint(const json &j, const std::string &path) {
    if (!j.is_number_integer() || (!j.is_number_unsigned() && j.get<int64_t>() < 0)) {
        fail(path, "expected a non-negative integer");
    }
    return j.get<uint64_t>();
}

double as_double(const json &j, const std::string &path) {
    if (!j.is_number()) {
        fail(path, "expected a number");
    }
    return j.get<double>();
}

std::string as_string(const json &j, const std::string &path) {
    if (!j.is_string()) {
        fail(path, "expected a string");
    }
    return j.get<std::string>();
}

bool as_bool(const json &j, const std::string &path) {
    if (!j.is_boolean()) {
        fail(path, "expected true or false");
    }
    return j.get<bool>();
}

template <typename T, typename F>
T optional_field(const json &j, const std::string &path, const std::string &key, T fallback, F convert) {
    if (!j.contains(key)) {
        return fallback;
    }
    return convert(j.at(key), path + "." + key);
}

std::complex<double> as_complex(const json &j, const std::string &path) {
    if (j.is_number()) {
        return {j.get<double>(), 0.0};
    }
    if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) {
        return {j[0].get<double>(), j[1].get<double>()};
    }
    fail(path, "expected a number or a [re, im] pair");
}

template <typename Scalar, typename F>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> as_matrix(const json &j, const std::string &path, F entry) {
    if (!j.is_array() || j.empty()) {
        fail(path, "expected a non-empty array of rows");
    }
    size_t rows = j.size();
    size_t cols = j[0].is_array() ? j[0].size() : 0;
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> m(rows, cols);
    for (size_t r = 0; r < rows; r++) {
        if (!j[r].is_array() || j[r].size() != cols || cols == 0) {
            fail(path + "[" + std::to_string(r) + "]", "rows must be arrays of equal length");
        }
        for (size_t c = 0; c < cols; c++) {
            m(r, c) = entry(j[r][c], path + "[" + std::to_string(r) + "][" + std::to_string(c) + "]");
        }
    }
    return m;
}

std::vector<size_t> parse_lengths(const json &j, const std::string &path) {
    std::vector<size_t> out;
    if (j.is_array()) {
        for (size_t k = 0; k < j.size(); k++) {
            out.push_back(as_uint(j[k], path + "[" + std::to_string(k) + "]"));
        }
    } else {
        check_object(j, path, {"start", "stop", "step"});
        require(j, path, "start");
        require(j, path, "stop");
        uint64_t start = as_uint(j["start"], path + ".start");
        uint64_t stop = as_uint(j["stop"], path + ".stop");
        uint64_t step = optional_field<uint64_t>(j, path, "step", 1, as_uint);
        if (step == 0 || stop < start) {
            fail(path, "need step >= 1 and stop >= start");
        }
        for (uint64_t m = start; m <= stop; m += step) {
            out.push_back(m);
        }
    }
    if (out.empty()) {
        fail(path, "at least one length is required");
    }
    for (auto m : out) {
        if (m == 0) {
            fail(path, "lengths must be at least 1");
        }
    }
    return out;
}

}  // namespace

NoiseModel parse_noise(const json &j, size_t default_qubits, const std::string &path) {
    if (!j.is_object()) {
        fail(path, "expected an object");
    }
    require(j, path, "type");
    std::string type = as_string(j["type"], path + ".type");
    try {
        if (type == "ideal") {
            check_object(j, path, {"type", "qubits"});
            return NoiseModel::ideal(optional_field<uint64_t>(j, path, "qubits", default_qubits, as_uint));
        }
        if (type == "depolarizing") {
            check_object(j, path, {"type", "qubits", "p"});
            require(j, path, "p");
            return NoiseModel::depolarizing(optional_field<uint64_t>(j, path, "qubits", default_qubits, as_uint),
                                            as_double(j["p"], path + ".p"));
        }
        if (type == "pauli") {
            check_object(j, path, {"type", "qubits", "probabilities"});
            require(j, path, "probabilities");
            const auto &probs = j["probabilities"];
            if (!probs.is_object() || probs.empty()) {
                fail(path + ".probabilities", "expected a non-empty object of Pauli label -> probability");
            }
            std::map<std::string, double> map;
            size_t n = 0;
            for (const auto &item : probs.items()) {
                map[item.key()] = as_double(item.value(), path + ".probabilities." + item.key());
                n = item.key().size();
            }
            size_t declared = optional_field<uint64_t>(j, path, "qubits", n, as_uint);
            if (declared != n) {
                fail(path + ".qubits", "does not match the Pauli label length");
            }
            return NoiseModel::pauli_channel(n, map);
        }
        if (type == "toy_crosstalk") {
            if (j.contains("experiment")) {
                check_object(j, path, {"type", "qubits", "experiment", "p11", "p21", "p12", "p22", "p_zz"});
                auto get = [&](const char *key) {
                    return optional_field<double>(j, path, key, 0.0, as_double);
                };
                int exp = (int)as_uint(j["experiment"], path + ".experiment");
                return NoiseModel::toy_crosstalk(
                    toy_crosstalk_for_experiment(exp, get("p11"), get("p21"), get("p12"), get("p22"), get("p_zz")));
            }
            check_object(j, path,
                         {"type", "qubits", "eps1", "eps2", "p01", "p11", "p21", "p02", "p12", "p22", "p_zz"});
            ToyCrosstalkParams t;
            t.eps1 = (int)optional_field<uint64_t>(j, path, "eps1", 1, as_uint);
            t.eps2 = (int)optional_field<uint64_t>(j, path, "eps2", 1, as_uint);
            if (t.eps1 > 1 || t.eps2 > 1) {
                fail(path, "drive flags eps1, eps2 must be 0 or 1");
            }
            t.p01 = optional_field<double>(j, path, "p01", 0.0, as_double);
            t.p11 = optional_field<double>(j, path, "p11", 0.0, as_double);
            t.p21 = optional_field<double>(j, path, "p21", 0.0, as_double);
            t.p02 = optional_field<double>(j, path, "p02", 0.0, as_double);
            t.p12 = optional_field<double>(j, path, "p12", 0.0, as_double);
            t.p22 = optional_field<double>(j, path, "p22", 0.0, as_double);
            t.p_zz = optional_field<double>(j, path, "p_zz", 0.0, as_double);
            return NoiseModel::toy_crosstalk(t);
        }
        if (type == "kraus") {
            check_object(j, path, {"type", "qubits", "operators"});
            require(j, path, "operators");
            const auto &ops = j["operators"];
            if (!ops.is_array() || ops.empty()) {
                fail(path + ".operators", "expected a non-empty array of matrices");
            }
            std::vector<ComplexMatrix> kraus;
            for (size_t k = 0; k < ops.size(); k++) {
                kraus.push_back(as_matrix<std::complex<double>>(ops[k], path + ".operators[" + std::to_string(k) + "]",
                                                                as_complex));
            }
            auto model = NoiseModel::raw_kraus(kraus);
            if (j.contains("qubits") && as_uint(j["qubits"], path + ".qubits") != model.num_qubits) {
                fail(path + ".qubits", "does not match the operator size");
            }
            return model;
        }
    } catch (const std::invalid_argument &e) {
        fail(path, e.what());
    }
    fail(path + ".type", "unknown noise type '" + type + "'");
}

const std::vector<std::string> &config_top_level_keys() {
    static const std::vector<std::string> keys{
        "protocol", "group",  "experiment",  "lengths", "sequences", "shots",  "seed", "sampling",
        "initial_state", "observables", "noise", "spam", "interleaved", "shadow", "fit",  "output", "threads"};
    return keys;
}

ExperimentConfig parse_experiment_config(const json &doc) {
    const std::string root = "config";
    check_object(doc, root, config_top_level_keys());
    ExperimentConfig out;
    out.document = doc;
    RbConfig &rb = out.rb;

    require(doc, root, "protocol");
    try {
        rb.protocol = parse_protocol_name(as_string(doc["protocol"], "config.protocol"));
        if (doc.contains("group")) {
            auto [kind, factors] = parse_group_name(as_string(doc["group"], "config.group"));
            rb.group = kind;
            rb.group_factors = factors;
        } else if (rb.protocol == ProtocolKind::Correlated) {
            rb.group = GroupKind::C1xC1;
            rb.group_factors = 2;
        }
    } catch (const std::invalid_argument &e) {
        fail(root, e.what());
    }
    if (doc.contains("experiment")) {
        if (rb.protocol != ProtocolKind::Simultaneous) {
            fail("config.experiment", "only applies to the simultaneous protocol");
        }
        rb.experiment = (int)as_uint(doc["experiment"], "config.experiment");
        if (doc.contains("group")) {
            fail("config.group", "the simultaneous protocol takes its group from the experiment number");
        }
    }
    require(doc, root, "lengths");
    rb.lengths = parse_lengths(doc["lengths"], "config.lengths");
    rb.sequences = optional_field<uint64_t>(doc, root, "sequences", 1, as_uint);
    rb.shots = optional_field<uint64_t>(doc, root, "shots", rb.protocol == ProtocolKind::Shadow ? 1 : 0, as_uint);
    rb.seed = optional_field<uint64_t>(doc, root, "seed", 0, as_uint);
    rb.threads = optional_field<uint64_t>(doc, root, "threads", 0, as_uint);
    if (doc.contains("sampling")) {
        std::string s = as_string(doc["sampling"], "config.sampling");
        if (s == "random") {
            rb.sampling = SequenceSampling::Random;
        } else if (s == "exhaustive") {
            rb.sampling = SequenceSampling::Exhaustive;
        } else {
            fail("config.sampling", "expected 'random' or 'exhaustive'");
        }
    }

    size_t n;
    try {
        n = rb.num_qubits();
    } catch (const std::invalid_argument &e) {
        fail(root, e.what());
    }
    if (doc.contains("initial_state")) {
        const auto &s = doc["initial_state"];
        if (s.is_string()) {
            std::string bits = s.get<std::string>();
            if (bits.size() != n || bits.find_first_not_of("01") != std::string::npos) {
                fail("config.initial_state", "expected a bit string with one digit per qubit");
            }
            rb.initial_state = std::stoul(bits, nullptr, 2);
        } else {
            rb.initial_state = as_uint(s, "config.initial_state");
        }
    }
    if (doc.contains("observables")) {
        const auto &obs = doc["observables"];
        if (!obs.is_array()) {
            fail("config.observables", "expected an array of names");
        }
        for (size_t k = 0; k < obs.size(); k++) {
            rb.observables.push_back(as_string(obs[k], "config.observables[" + std::to_string(k) + "]"));
        }
    }

    require(doc, root, "noise");
    rb.noise = parse_noise(doc["noise"], n, "config.noise");
    rb.spam = SpamModel::ideal(n);
    if (doc.contains("spam")) {
        const auto &spam = doc["spam"];
        check_object(spam, "config.spam", {"prep", "meas"});
        if (spam.contains("prep")) {
            rb.spam.prep = parse_noise(spam["prep"], n, "config.spam.prep");
        }
        if (spam.contains("meas")) {
            rb.spam.meas = parse_noise(spam["meas"], n, "config.spam.meas");
        }
    }
    rb.target_noise = NoiseModel::ideal(n);
    if (doc.contains("interleaved")) {
        if (rb.protocol != ProtocolKind::Interleaved) {
            fail("config.interleaved", "only applies to the interleaved protocol");
        }
        const auto &il = doc["interleaved"];
        check_object(il, "config.interleaved", {"target", "target_noise"});
        require(il, "config.interleaved", "target");
        rb.target_gate = as_string(il["target"], "config.interleaved.target");
        if (il.contains("target_noise")) {
            rb.target_noise = parse_noise(il["target_noise"], n, "config.interleaved.target_noise");
        }
    } else if (rb.protocol == ProtocolKind::Interleaved) {
        fail("config.interleaved", "required for the interleaved protocol");
    }

    if (doc.contains("fit")) {
        const auto &f = doc["fit"];
        check_object(f, "config.fit", {"model", "weighted", "rescale_single_qubit"});
        if (f.contains("model")) {
            out.fit.model = as_string(f["model"], "config.fit.model");
            rb.fit_model = out.fit.model;
        }
        out.fit.weighted = optional_field<bool>(f, "config.fit", "weighted", false, as_bool);
        out.fit.rescale_single_qubit = optional_field<bool>(f, "config.fit", "rescale_single_qubit", false, as_bool);
    }
    if (!rb.fit_model.empty()) {
        try {
            DecayModel::parse(rb.fit_model);
        } catch (const std::invalid_argument &e) {
            fail("config.fit.model", e.what());
        }
    } else if (rb.protocol == ProtocolKind::Correlated || rb.protocol == ProtocolKind::Shadow) {
        out.fit.model = "power";
    }
    if (out.fit.weighted && rb.shots == 0) {
        fail("config.fit.weighted", "weights come from shot-mode sample variances; set shots >= 1");
    }

    if (doc.contains("shadow")) {
        if (rb.protocol != ProtocolKind::Shadow) {
            fail("config.shadow", "only applies to the shadow protocol");
        }
        const auto &s = doc["shadow"];
        check_object(s, "config.shadow", {"probe", "probe_matrix", "normalization", "batch_size", "batches"});
        if (s.contains("probe") && s.contains("probe_matrix")) {
            fail("config.shadow", "give either probe or probe_matrix");
        }
        out.shadow.probe = optional_field<std::string>(s, "config.shadow", "probe", "P1", as_string);
        if (s.contains("probe_matrix")) {
            out.shadow.probe = "custom";
            out.shadow.probe_matrix = as_matrix<double>(s["probe_matrix"], "config.shadow.probe_matrix", as_double);
            if ((size_t)out.shadow.probe_matrix->rows() != liouville_dim(n) ||
                (size_t)out.shadow.probe_matrix->cols() != liouville_dim(n)) {
                fail("config.shadow.probe_matrix", "must be 4^n x 4^n");
            }
        }
        out.shadow.normalization = optional_field<double>(s, "config.shadow", "normalization", 1.0, as_double);
        out.shadow.batch_size = optional_field<uint64_t>(s, "config.shadow", "batch_size", 1, as_uint);
        out.shadow.batches = optional_field<uint64_t>(s, "config.shadow", "batches", 1, as_uint);
    }
    if (rb.protocol == ProtocolKind::Shadow) {
        if (out.shadow.batch_size == 0 || out.shadow.batches == 0) {
            fail("config.shadow", "batch_size and batches must be positive");
        }
        if (out.shadow.batch_size * out.shadow.batches > rb.sequences * rb.shots) {
            fail("config.shadow", "batch_size * batches exceeds the records collected per length");
        }
        if (!out.shadow.probe_matrix.has_value()) {
            try {
                auto [kind, factors] = rb.effective_group();
                parse_probe(out.shadow.probe, irrep_decomposition(kind, factors));
            } catch (const std::invalid_argument &e) {
                fail("config.shadow.probe", e.what());
            }
        }
    }

    if (doc.contains("output")) {
        const auto &o = doc["output"];
        check_object(o, "config.output", {"csv", "records", "manifest", "report", "svg", "formats", "log_scale"});
        out.output.csv = optional_field<std::string>(o, "config.output", "csv", out.output.csv, as_string);
        out.output.records = optional_field<std::string>(o, "config.output", "records", out.output.records, as_string);
        out.output.manifest =
            optional_field<std::string>(o, "config.output", "manifest", out.output.manifest, as_string);
        out.output.report = optional_field<std::string>(o, "config.output", "report", out.output.report, as_string);
        out.output.svg = optional_field<std::string>(o, "config.output", "svg", out.output.svg, as_string);
        out.output.log_scale = optional_field<bool>(o, "config.output", "log_scale", false, as_bool);
        if (o.contains("formats")) {
            const auto &f = o["formats"];
            if (!f.is_array()) {
                fail("config.output.formats", "expected an array");
            }
            out.output.write_svg = false;
            for (size_t k = 0; k < f.size(); k++) {
                std::string fmt = as_string(f[k], "config.output.formats[" + std::to_string(k) + "]");
                if (fmt == "svg") {
                    out.output.write_svg = true;
                } else if (fmt != "csv" && fmt != "json") {
                    fail("config.output.formats", "unknown format '" + fmt + "' (csv, json, svg)");
                }
            }
        }
    }

    try {
        rb.validate();
    } catch (const std::invalid_argument &e) {
        fail(root, e.what());
    }
    return out;
}

ExperimentConfig load_experiment_config(const std::string &path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config file '" + path + "'");
    }
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error &e) {
        throw ConfigError("config file '" + path + "' is not valid JSON: " + e.what());
    }
    return parse_experiment_config(doc);
}

}  // namespace rbsim
