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

#ifndef RBSIM_CONFIG_H
#define RBSIM_CONFIG_H

#include <stdexcept>
#include <string>

#include "json.hpp"
#include "rbsim/protocols.h"
#include "rbsim/shadow.h"

namespace rbsim {

/// Malformed or inconsistent experiment configuration.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ShadowSettings {
    /// Probe name for parse_probe, or "custom" when `probe_matrix` is given.
    std::string probe = "P1";
    std::optional<RealMatrix> probe_matrix;
    double normalization = 1;
    size_t batch_size = 1;
    size_t batches = 1;
};

struct FitSettings {
    std::string model = "single_exp";
    bool weighted = false;
    bool rescale_single_qubit = false;
};

struct OutputSettings {
    std::string csv = "decay.csv";
    std::string records = "records.tsv";
    std::string manifest = "manifest.json";
    std::string report = "report.json";
    std::string svg = "decay.svg";
    bool write_svg = true;
    bool log_scale = false;
};

struct ExperimentConfig {
    RbConfig rb;
    ShadowSettings shadow;
    FitSettings fit;
    OutputSettings output;
    /// The parsed document, used for hashing.
    nlohmann::json document;
};

/// Parses and validates a configuration document. Unknown keys and type mismatches raise ConfigError
/// naming the offending path; the RbConfig invariants are re-checked.
ExperimentConfig parse_experiment_config(const nlohmann::json &doc);
ExperimentConfig load_experiment_config(const std::string &path);

/// Noise block: {"type": "ideal" | "depolarizing" | "pauli" | "toy_crosstalk" | "kraus", ...}.
/// `default_qubits` applies when the block omits "qubits".
NoiseModel parse_noise(const nlohmann::json &doc, size_t default_qubits, const std::string &path = "noise");

/// Keys accepted at the top level, in schema order.
const std::vector<std::string> &config_top_level_keys();

}  // namespace rbsim

#endif
