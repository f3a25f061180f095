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

#include <gtest/gtest.h>

#include <fstream>

using namespace rbsim;
using nlohmann::json;

namespace {

json standard_doc() {
    return json::parse(R"({
        "protocol": "standard",
        "group": "C1",
        "lengths": {"start": 1, "stop": 9, "step": 2},
        "sequences": 4,
        "seed": 12,
        "noise": {"type": "depolarizing", "p": 0.98},
        "spam": {"prep": {"type": "pauli", "probabilities": {"I": 0.95, "X": 0.05}}},
        "fit": {"model": "single_exp", "rescale_single_qubit": true},
        "output": {"formats": ["csv", "json"]}
    })");
}

std::string error_of(const json &doc) {
    try {
        parse_experiment_config(doc);
    } catch (const ConfigError &e) {
        return e.what();
    }
    return "";
}

}  // namespace

TEST(Config, standard_document) {
    auto cfg = parse_experiment_config(standard_doc());
    ASSERT_EQ(cfg.rb.protocol, ProtocolKind::Standard);
    ASSERT_EQ(cfg.rb.lengths, (std::vector<size_t>{1, 3, 5, 7, 9}));
    ASSERT_EQ(cfg.rb.sequences, 4u);
    ASSERT_EQ(cfg.rb.seed, 12u);
    ASSERT_EQ(cfg.rb.noise.kind, NoiseKind::Depolarizing);
    ASSERT_EQ(cfg.rb.spam.prep.kind, NoiseKind::PauliChannel);
    ASSERT_TRUE(cfg.fit.rescale_single_qubit);
    ASSERT_FALSE(cfg.output.write_svg);
}

TEST(Config, unknown_keys_rejected_at_any_depth) {
    auto doc = standard_doc();
    doc["sequnces"] = 3;
    ASSERT_NE(error_of(doc).find("config.sequnces: unknown key"), std::string::npos);
    doc = standard_doc();
    doc["noise"]["prob"] = 0.1;
    ASSERT_NE(error_of(doc).find("config.noise.prob"), std::string::npos);
    doc = standard_doc();
    doc["fit"]["weigthed"] = true;
    ASSERT_NE(error_of(doc).find("config.fit.weigthed"), std::string::npos);
}

TEST(Config, invariants_rechecked) {
    auto doc = standard_doc();
    doc["noise"]["p"] = 1.5;
    ASSERT_NE(error_of(doc).find("complete-positivity"), std::string::npos);
    doc = standard_doc();
    doc["lengths"] = json::array({1, 0});
    ASSERT_FALSE(error_of(doc).empty());
    doc = standard_doc();
    doc["sequences"] = -1;
    ASSERT_NE(error_of(doc).find("non-negative integer"), std::string::npos);
    doc = standard_doc();
    doc["noise"] = json{{"type", "depolarizing"}, {"qubits", 2}, {"p", 0.9}};
    ASSERT_FALSE(error_of(doc).empty());
    doc = standard_doc();
    doc["sampling"] = "exhaustive";
    doc["shots"] = 5;
    ASSERT_FALSE(error_of(doc).empty());
    doc = standard_doc();
    doc.erase("noise");
    ASSERT_NE(error_of(doc).find("required"), std::string::npos);
}

TEST(Config, toy_crosstalk_forms) {
    json doc = json::parse(R"({
        "protocol": "simultaneous", "experiment": 2, "lengths": [1, 2],
        "noise": {"type": "toy_crosstalk", "experiment": 2, "p11": 0.01, "p12": 0.02, "p22": 0.01, "p_zz": 0.03}
    })");
    auto cfg = parse_experiment_config(doc);
    ASSERT_EQ(cfg.rb.effective_group().first, GroupKind::IxC1);
    ASSERT_EQ(cfg.rb.noise.toy.eps1, 0);

    doc["noise"] = json::parse(R"({"type": "toy_crosstalk", "p01": 0.5, "p02": 0.5, "p_zz": 0.01})");
    ASSERT_NE(error_of(doc).find("trace-preservation"), std::string::npos);
    doc["noise"]["p02"] = 0.49;
    ASSERT_NO_THROW(parse_experiment_config(doc));
}

TEST(Config, kraus_noise_and_interleaved) {
    json doc = json::parse(R"({
        "protocol": "interleaved", "lengths": [1, 2, 3, 4],
        "noise": {"type": "kraus", "operators": [[[1, 0], [0, 0.9]], [[0, 0], [0, [0.4358898943540674, 0]]]]},
        "interleaved": {"target": "H", "target_noise": {"type": "depolarizing", "p": 0.97}}
    })");
    auto cfg = parse_experiment_config(doc);
    ASSERT_EQ(cfg.rb.noise.kind, NoiseKind::RawKraus);
    ASSERT_EQ(cfg.rb.target_gate, "H");
    doc["noise"]["operators"][0][1][1] = 1.0;
    ASSERT_NE(error_of(doc).find("trace-preservation"), std::string::npos);
    doc = json::parse(R"({"protocol": "interleaved", "lengths": [1], "noise": {"type": "ideal"}})");
    ASSERT_NE(error_of(doc).find("config.interleaved"), std::string::npos);
}

TEST(Config, shadow_settings) {
    json doc = json::parse(R"({
        "protocol": "shadow", "lengths": [1, 2], "sequences": 100, "shots": 1,
        "noise": {"type": "depolarizing", "p": 0.95},
        "shadow": {"probe": "P1", "batch_size": 10, "batches": 10}
    })");
    auto cfg = parse_experiment_config(doc);
    ASSERT_EQ(cfg.fit.model, "power");
    doc["shadow"]["batches"] = 11;
    ASSERT_NE(error_of(doc).find("exceeds"), std::string::npos);
    doc["shadow"]["batches"] = 10;
    doc["shadow"]["probe"] = "W9";
    ASSERT_NE(error_of(doc).find("config.shadow.probe"), std::string::npos);
    doc["shadow"].erase("probe");
    doc["shadow"]["probe_matrix"] = json::parse("[[1,0,0,0],[0,1,0,0],[0,0,1,0],[0,0,0,1]]");
    ASSERT_TRUE(parse_experiment_config(doc).shadow.probe_matrix.has_value());
}

TEST(Config, schema_lists_the_same_top_level_keys) {
    std::ifstream in(RBSIM_SCHEMA_PATH);
    ASSERT_TRUE(in.good());
    json schema = json::parse(in);
    ASSERT_FALSE(schema["additionalProperties"].get<bool>());
    std::vector<std::string> keys;
    for (const auto &item : schema["properties"].items()) {
        keys.push_back(item.key());
    }
    auto expected = config_top_level_keys();
    std::sort(keys.begin(), keys.end());
    std::sort(expected.begin(), expected.end());
    ASSERT_EQ(keys, expected);
}

TEST(Config, sample_configs_parse) {
    for (const auto *name : {"standard_c1.json", "simultaneous_toy.json", "correlated.json", "interleaved.json",
                             "shadow_c1.json"}) {
        ASSERT_NO_THROW(load_experiment_config(std::string(RBSIM_CONFIG_DIR) + "/" + name)) << name;
    }
}
