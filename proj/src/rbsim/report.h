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

#ifndef RBSIM_REPORT_H
#define RBSIM_REPORT_H

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "rbsim/fit.h"
#include "rbsim/protocols.h"
#include "rbsim/shadow.h"

namespace rbsim {

constexpr const char *RBSIM_VERSION = "0.1.0";

/// Malformed decay table or record file.
struct DataFormatError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// 17 significant digits, '.' decimal point regardless of locale.
std::string format_double(double value);

/// Header `observable,m,mean,variance,count`, one row per (observable, length).
std::string decay_csv(const DecayDataset &data);
/// Rows are grouped into series by observable in order of first appearance.
DecayDataset parse_decay_csv(const std::string &text);

/// One record per line: m, TAB, comma-joined gate ids, TAB, outcome bits (qubit 0 first).
std::string format_records(const std::vector<ShadowRecord> &records, size_t num_qubits);
std::vector<ShadowRecord> parse_records(const std::string &text);

uint64_t fnv1a64(const std::string &bytes);
/// 16 hex digits of FNV-1a over the compact JSON dump (keys sorted).
std::string config_hash(const nlohmann::json &doc);

/// Writes to `path`.tmp and renames over `path`.
void atomic_write(const std::string &path, const std::string &content);
std::string read_text_file(const std::string &path);

/// Formula tags every derived report quantity must carry.
const std::vector<std::string> &formula_registry();

struct DerivedQuantity {
    std::string name;
    double value = 0;
    std::optional<double> stderr;
    std::string formula;
};

class ReportBundle {
   public:
    void set_provenance(uint64_t seed, const std::string &config_hash, const std::string &protocol);
    void add_dataset(const std::string &label, const DecayDataset &data);
    void add_fit(const std::string &label, const FitResult &fit);
    /// Throws std::logic_error if `formula` is not in the registry.
    void add_derived(const std::string &name, double value, std::optional<double> stderr, const std::string &formula);
    void add_note(const std::string &note);

    const std::vector<DerivedQuantity> &derived() const {
        return derived_;
    }
    nlohmann::json to_json() const;

   private:
    nlohmann::json provenance_ = nlohmann::json::object();
    nlohmann::json datasets_ = nlohmann::json::object();
    nlohmann::json fits_ = nlohmann::json::object();
    std::vector<DerivedQuantity> derived_;
    std::vector<std::string> notes_;
};

nlohmann::json fit_to_json(const FitResult &fit);
/// Adds F_avg, r (and the per-pulse fidelity when rescaled) for a converged rate fit.
void add_fidelity_quantities(ReportBundle &bundle, const std::string &prefix, const FitResult &fit, size_t d,
                             bool rescale_single_qubit);

/// Static decay plot: data points, fitted curve and a two-standard-error band from the fit covariance.
/// With `log_scale` the y axis shows log10(y - B) for models with an offset.
std::string decay_svg(const DecaySeries &series, const std::optional<FitResult> &fit, bool log_scale,
                      const std::string &title);

}  // namespace rbsim

#endif
