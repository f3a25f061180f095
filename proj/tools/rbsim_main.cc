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

#include <cmath>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "rbsim/config.h"
#include "rbsim/protocols.h"
#include "rbsim/report.h"
#include "rbsim/selftest.h"
#include "rbsim/shadow.h"

using namespace rbsim;
using nlohmann::json;

namespace {

constexpr int EXIT_CONFIG = 2;
constexpr int EXIT_SIMULATION = 3;
constexpr int EXIT_FIT = 4;

/// Carries an exit code out of a subcommand.
struct ExitError : std::runtime_error {
    int code;
    ExitError(int code, const std::string &msg) : std::runtime_error(msg), code(code) {
    }
};

std::string join_path(const std::string &dir, const std::string &name) {
    if (dir.empty()) {
        return name;
    }
    return (std::filesystem::path(dir) / name).string();
}

ExperimentConfig load_config_or_exit(const std::string &path, size_t threads) {
    try {
        auto cfg = load_experiment_config(path);
        if (threads != 0) {
            cfg.rb.threads = threads;
        }
        return cfg;
    } catch (const ConfigError &e) {
        throw ExitError(EXIT_CONFIG, e.what());
    }
}

DecayDataset prefixed(const DecayDataset &data, const std::string &prefix) {
    DecayDataset out = data;
    for (auto &s : out.series) {
        s.observable = prefix + s.observable;
    }
    return out;
}

DecayDataset merged(const DecayDataset &a, const DecayDataset &b) {
    DecayDataset out = a;
    out.series.insert(out.series.end(), b.series.begin(), b.series.end());
    return out;
}

ProbeOperator probe_for(const ExperimentConfig &cfg, const IrrepDecomposition &dec) {
    if (cfg.shadow.probe_matrix.has_value()) {
        return ProbeOperator::custom(*cfg.shadow.probe_matrix, cfg.shadow.normalization);
    }
    auto probe = parse_probe(cfg.shadow.probe, dec);
    probe.normalization = cfg.shadow.normalization;
    return probe;
}

/// Everything a simulate run produces, before it is written out.
struct SimulationOutput {
    std::optional<DecayDataset> data;
    std::optional<CorrelatedResult> correlated;
    std::optional<InterleavedResult> interleaved;
    std::vector<ShadowRecord> records;
};

SimulationOutput simulate(const ExperimentConfig &cfg, bool analyze) {
    SimulationOutput out;
    try {
        switch (cfg.rb.protocol) {
            case ProtocolKind::Standard:
                out.data = run_standard_rb(cfg.rb);
                break;
            case ProtocolKind::Simultaneous:
                out.data = run_simultaneous_rb(cfg.rb);
                break;
            case ProtocolKind::Correlated:
                if (analyze) {
                    out.correlated = run_correlated_rb(cfg.rb);
                    out.data = out.correlated->data;
                } else {
                    out.data = simulate_correlated(cfg.rb);
                }
                break;
            case ProtocolKind::Interleaved:
                if (analyze) {
                    out.interleaved = run_interleaved_rb(cfg.rb);
                    out.data = merged(prefixed(out.interleaved->reference, "reference:"),
                                      prefixed(out.interleaved->interleaved, "interleaved:"));
                } else {
                    auto [ref, inter] = simulate_interleaved(cfg.rb);
                    out.data = merged(prefixed(ref, "reference:"), prefixed(inter, "interleaved:"));
                }
                out.data->protocol = "interleaved";
                break;
            case ProtocolKind::Shadow:
                cfg.rb.validate();
                out.records = shadow_collect(cfg.rb);
                break;
        }
    } catch (const std::exception &e) {
        throw ExitError(EXIT_SIMULATION, std::string("simulation failed: ") + e.what());
    }
    return out;
}

json write_simulation(const ExperimentConfig &cfg, const SimulationOutput &sim, const std::string &out_dir) {
    json outputs = json::array();
    if (sim.data.has_value()) {
        atomic_write(join_path(out_dir, cfg.output.csv), decay_csv(*sim.data));
        outputs.push_back(cfg.output.csv);
    }
    if (cfg.rb.protocol == ProtocolKind::Shadow) {
        atomic_write(join_path(out_dir, cfg.output.records), format_records(sim.records, cfg.rb.num_qubits()));
        outputs.push_back(cfg.output.records);
    }
    json manifest{{"tool", "rbsim"},
                  {"version", RBSIM_VERSION},
                  {"protocol", protocol_name(cfg.rb.protocol)},
                  {"seed", cfg.rb.seed},
                  {"config_hash", config_hash(cfg.document)},
                  {"outputs", outputs}};
    atomic_write(join_path(out_dir, cfg.output.manifest), manifest.dump(2) + "\n");
    return manifest;
}

int cmd_simulate(const std::string &config_path, const std::string &out_dir, size_t threads) {
    auto cfg = load_config_or_exit(config_path, threads);
    auto sim = simulate(cfg, false);
    write_simulation(cfg, sim, out_dir);
    if (sim.data.has_value()) {
        std::cout << "wrote " << sim.data->series.size() << " series to " << join_path(out_dir, cfg.output.csv)
                  << "\n";
    } else {
        std::cout << "wrote " << sim.records.size() << " records to " << join_path(out_dir, cfg.output.records)
                  << "\n";
    }
    return 0;
}

FitOptions weights_for(const DecaySeries &series, bool weighted) {
    FitOptions opt;
    if (!weighted) {
        return opt;
    }
    std::vector<double> sigma;
    for (const auto &p : series.points) {
        if (p.count == 0 || !(p.variance > 0)) {
            throw ExitError(EXIT_CONFIG, "weighted fit of '" + series.observable + "' needs positive variances");
        }
        sigma.push_back(std::sqrt(p.variance / (double)p.count));
    }
    opt.sigma = sigma;
    opt.absolute_sigma = true;
    return opt;
}

/// Fits one series; std::invalid_argument (too few lengths) is reported as a failed fit.
FitResult fit_series(const DecaySeries &series, const DecayModel &model, const FitOptions &opt) {
    try {
        return fit(model, series.lengths(), series.means(), opt);
    } catch (const std::invalid_argument &e) {
        FitResult bad;
        bad.model = model;
        bad.message = e.what();
        return bad;
    }
}

bool fit_ok(const FitResult &f) {
    return f.converged && !f.rank_deficient;
}

std::string fit_diagnostic(const std::string &label, const FitResult &f) {
    std::string why = f.message.empty() ? "did not converge" : f.message;
    if (f.converged && f.rank_deficient) {
        why = "rank-deficient Jacobian (parameters not identifiable from this data)";
    }
    return "fit of '" + label + "' failed: " + why;
}

std::string file_label(const std::string &s) {
    std::string out;
    for (char c : s) {
        out.push_back(std::isalnum((unsigned char)c) ? c : '_');
    }
    return out;
}

std::string svg_name(const std::string &base, const std::string &label, bool single) {
    if (single) {
        return base;
    }
    auto p = std::filesystem::path(base);
    return (p.parent_path() / (p.stem().string() + "_" + file_label(label) + p.extension().string())).string();
}

bool is_coefficient(const std::string &observable) {
    auto name = observable.substr(observable.find(':') == std::string::npos ? 0 : observable.rfind(':') + 1);
    return observable.find("coef:") != std::string::npos || name == "z1" || name == "z2" || name == "zz";
}

int cmd_fit(const std::string &data_path, const std::string &model_name, std::string observable, bool rescale,
            size_t dim, bool weighted, const std::string &out_path, const std::string &svg_path, bool log_scale) {
    DecayDataset data;
    try {
        data = parse_decay_csv(read_text_file(data_path));
    } catch (const std::exception &e) {
        throw ExitError(EXIT_CONFIG, e.what());
    }
    DecayModel model;
    try {
        model = DecayModel::parse(model_name);
    } catch (const std::invalid_argument &e) {
        throw ExitError(EXIT_CONFIG, e.what());
    }
    if (observable.empty()) {
        observable = data.series.front().observable;
    }
    const DecaySeries *series = nullptr;
    for (const auto &s : data.series) {
        if (s.observable == observable) {
            series = &s;
        }
    }
    if (series == nullptr) {
        throw ExitError(EXIT_CONFIG, "no series named '" + observable + "' in " + data_path);
    }
    auto f = fit_series(*series, model, weights_for(*series, weighted));

    ReportBundle bundle;
    bundle.add_dataset("data", data);
    bundle.add_fit(observable, f);
    bool ok = fit_ok(f);
    if (ok && model.kind != ModelKind::MultiExp) {
        try {
            add_fidelity_quantities(bundle, "", f, dim, rescale);
        } catch (const std::invalid_argument &e) {
            throw ExitError(EXIT_CONFIG, e.what());
        }
    }
    if (!ok) {
        bundle.add_note(fit_diagnostic(observable, f));
    }
    std::string text = bundle.to_json().dump(2) + "\n";
    if (out_path.empty()) {
        std::cout << text;
    } else {
        atomic_write(out_path, text);
    }
    if (!svg_path.empty()) {
        atomic_write(svg_path, decay_svg(*series, ok ? std::optional<FitResult>(f) : std::nullopt, log_scale,
                                         observable));
    }
    if (!ok) {
        std::cerr << fit_diagnostic(observable, f) << "\n";
        return EXIT_FIT;
    }
    return 0;
}

/// Median-of-means table, power-law fit and (optionally) the closed-form model for a set of records.
struct ShadowAnalysis {
    std::vector<ShadowEstimate> estimates;
    std::optional<FitResult> fit;
    std::vector<double> theory;
};

ShadowAnalysis analyze_shadow(const std::vector<ShadowRecord> &records, const ProbeOperator &probe,
                              GroupKind kind, size_t factors, size_t initial_state, size_t batch_size,
                              size_t batches, const std::optional<ExperimentConfig> &cfg) {
    ShadowAnalysis out;
    const auto &group = cached_group(kind, factors);
    auto ref = ShadowReference::ideal(group.num_qubits, initial_state);
    out.estimates = shadow_estimate(records, probe, group, ref, batch_size, batches);
    if (out.estimates.size() >= 3) {
        std::vector<double> m, y, sigma;
        bool weighted = true;
        for (const auto &e : out.estimates) {
            m.push_back((double)e.m);
            y.push_back(e.value);
            sigma.push_back(e.stderr);
            weighted = weighted && e.stderr > 0;
        }
        FitOptions opt;
        if (weighted) {
            opt.sigma = sigma;
            opt.absolute_sigma = true;
        }
        out.fit = fit(DecayModel::power(), m, y, opt);
    }
    if (cfg.has_value()) {
        auto model = shadow_theory_model(probe, compile(cfg->rb.noise), irrep_decomposition(kind, factors),
                                         cfg->rb.spam, initial_state);
        for (const auto &e : out.estimates) {
            out.theory.push_back(model.eval(e.m));
        }
    }
    return out;
}

void add_shadow_to_bundle(ReportBundle &bundle, const ShadowAnalysis &a) {
    DecaySeries series{"k_hat", {}};
    for (const auto &e : a.estimates) {
        series.points.push_back(DecayPoint{e.m, e.value, e.stderr * e.stderr, e.records});
        bundle.add_derived("k_hat(" + std::to_string(e.m) + ")", e.value, e.stderr,
                           "k_hat(m) = median of batch means of f_A");
    }
    DecayDataset data;
    data.protocol = "shadow";
    data.series.push_back(series);
    bundle.add_dataset("shadow", data);
    for (size_t k = 0; k < a.theory.size(); k++) {
        bundle.add_derived("k_theory(" + std::to_string(a.estimates[k].m) + ")", a.theory[k], std::nullopt,
                           "k(m) = Tr[Theta Phi^(m - 1)]");
    }
    if (a.fit.has_value()) {
        bundle.add_fit("k_hat", *a.fit);
        if (fit_ok(*a.fit)) {
            bundle.add_derived("q", a.fit->param("q"), a.fit->stderr_of("q"), "k(m) = c q^(m - 1)");
        } else {
            bundle.add_note(fit_diagnostic("k_hat", *a.fit));
        }
    } else {
        bundle.add_note("fewer than three lengths; no decay fit");
    }
}

ProbeOperator probe_from_argument(const std::string &arg, const IrrepDecomposition &dec) {
    if (!std::filesystem::exists(arg)) {
        return parse_probe(arg, dec);
    }
    json doc = json::parse(read_text_file(arg));
    const json &mat = doc.is_object() ? doc.at("matrix") : doc;
    double normalization = doc.is_object() ? doc.value("normalization", 1.0) : 1.0;
    size_t rows = mat.size();
    RealMatrix a(rows, rows);
    for (size_t i = 0; i < rows; i++) {
        if (mat[i].size() != rows) {
            throw std::invalid_argument("probe matrix in '" + arg + "' is not square");
        }
        for (size_t j = 0; j < rows; j++) {
            a(i, j) = mat[i][j].get<double>();
        }
    }
    return ProbeOperator::custom(a, normalization);
}

int cmd_shadow_estimate(const std::string &records_path, const std::string &probe_arg, size_t batch_size,
                        size_t batches, std::string group_name_arg, size_t initial_state,
                        const std::string &config_path, const std::string &out_path) {
    std::optional<ExperimentConfig> cfg;
    if (!config_path.empty()) {
        cfg = load_config_or_exit(config_path, 0);
        group_name_arg = group_name(cfg->rb.effective_group().first, cfg->rb.effective_group().second);
        initial_state = cfg->rb.initial_state;
    }
    ShadowAnalysis a;
    try {
        auto [kind, factors] = parse_group_name(group_name_arg);
        auto dec = irrep_decomposition(kind, factors);
        auto probe = probe_from_argument(probe_arg, dec);
        auto records = parse_records(read_text_file(records_path));
        a = analyze_shadow(records, probe, kind, factors, initial_state, batch_size, batches, cfg);
    } catch (const std::exception &e) {
        throw ExitError(EXIT_CONFIG, e.what());
    }

    std::cout << "m\tk_hat\tstderr\trecords" << (a.theory.empty() ? "" : "\ttheory") << "\n";
    for (size_t k = 0; k < a.estimates.size(); k++) {
        const auto &e = a.estimates[k];
        std::cout << e.m << "\t" << format_double(e.value) << "\t" << format_double(e.stderr) << "\t" << e.records;
        if (!a.theory.empty()) {
            std::cout << "\t" << format_double(a.theory[k]);
        }
        std::cout << "\n";
    }
    if (a.fit.has_value() && fit_ok(*a.fit)) {
        std::cout << "fit k(m) = c q^(m - 1): q = " << format_double(a.fit->param("q")) << " +- "
                  << format_double(a.fit->stderr_of("q")) << ", c = " << format_double(a.fit->param("c")) << "\n";
    }
    if (!out_path.empty()) {
        ReportBundle bundle;
        add_shadow_to_bundle(bundle, a);
        atomic_write(out_path, bundle.to_json().dump(2) + "\n");
    }
    if (a.fit.has_value() && !fit_ok(*a.fit)) {
        std::cerr << fit_diagnostic("k_hat", *a.fit) << "\n";
        return EXIT_FIT;
    }
    return 0;
}

/// Fits, derived quantities and plots for a finished simulation. Returns the labels of failed fits.
std::vector<std::string> analyze_into(ReportBundle &bundle, const ExperimentConfig &cfg, const SimulationOutput &sim,
                                      std::map<std::string, std::pair<DecaySeries, FitResult>> &plots) {
    std::vector<std::string> failed;
    size_t d = hilbert_dim(cfg.rb.num_qubits());
    bool rescale = cfg.fit.rescale_single_qubit && d == 2;
    auto model = DecayModel::parse(cfg.fit.model);
    auto record = [&](const DecaySeries &s, const FitResult &f) {
        bundle.add_fit(s.observable, f);
        plots[s.observable] = {s, f};
        if (!fit_ok(f)) {
            failed.push_back(s.observable);
            bundle.add_note(fit_diagnostic(s.observable, f));
        }
        return fit_ok(f);
    };

    switch (cfg.rb.protocol) {
        case ProtocolKind::Standard: {
            for (const auto &s : sim.data->series) {
                auto f = fit_series(s, model, weights_for(s, cfg.fit.weighted));
                if (record(s, f) && model.kind != ModelKind::MultiExp) {
                    add_fidelity_quantities(bundle, sim.data->series.size() == 1 ? "" : s.observable + ":", f, d,
                                            rescale);
                }
            }
            break;
        }
        case ProtocolKind::Simultaneous: {
            std::map<std::string, double> rate;
            for (const auto &s : sim.data->series) {
                bool coef = is_coefficient(s.observable);
                auto f = fit_series(s, coef ? DecayModel::power() : model, weights_for(s, cfg.fit.weighted));
                if (record(s, f) && coef) {
                    rate[s.observable] = f.param("q");
                    bundle.add_derived("alpha[" + s.observable + "]", f.param("q"), f.stderr_of("q"),
                                       "<P>(m) = c alpha^(m - 1)");
                }
            }
            if (cfg.rb.experiment == 3 && rate.count("z1") && rate.count("z2") && rate.count("zz")) {
                bundle.add_derived("delta_alpha", rate["zz"] - rate["z1"] * rate["z2"], std::nullopt,
                                   "delta_alpha = alpha_W3 - alpha_W1 alpha_W2");
            }
            break;
        }
        case ProtocolKind::Correlated: {
            const auto &res = *sim.correlated;
            for (size_t k = 0; k < res.fits.size(); k++) {
                record(res.data.series[k], res.fits[k]);
            }
            for (size_t s = 1; s < res.alpha.values.size(); s++) {
                bundle.add_derived("alpha[" + res.alpha.labels[s] + "]", res.alpha.values[s], std::nullopt,
                                   "<P>(m) = c alpha^(m - 1)");
            }
            if (res.alpha.values.size() == 4) {
                bundle.add_derived("delta_alpha", res.delta_alpha, std::nullopt,
                                   "delta_alpha = alpha_W3 - alpha_W1 alpha_W2");
            }
            if (res.eps_valid) {
                for (size_t s = 1; s < res.eps.eps.size(); s++) {
                    bundle.add_derived("eps[" + res.alpha.labels[s] + "]", res.eps.eps[s], std::nullopt,
                                       "alpha_T = prod_S [1 + eps_S (R_depol(S, T) - 1)]");
                }
                if (res.eps.ambiguous_root) {
                    bundle.add_note("two completely positive weight sets fit the decays; reported the one with "
                                    "the smaller W2 weight");
                }
            } else if (!res.eps_error.empty()) {
                bundle.add_note("no weight set: " + res.eps_error);
            }
            break;
        }
        case ProtocolKind::Interleaved: {
            const auto &res = *sim.interleaved;
            DecaySeries ref = res.reference.series.front();
            DecaySeries inter = res.interleaved.series.front();
            ref.observable = "reference:" + ref.observable;
            inter.observable = "interleaved:" + inter.observable;
            bool ok = record(ref, res.reference_fit);
            ok = record(inter, res.interleaved_fit) && ok;
            if (!ok) {
                break;
            }
            if (res.reference_fit.model.kind != ModelKind::MultiExp) {
                add_fidelity_quantities(bundle, "reference:", res.reference_fit, d, rescale);
            }
            bundle.add_derived("p_target", res.p_interleaved / res.p, std::nullopt, "p_target = p_interleaved/p");
            bundle.add_derived("r_est", res.estimate.error_rate, std::nullopt,
                               "r_est = (d - 1)(1 - p_interleaved/p)/d");
            const std::string bound_tag =
                "E = min((d - 1)[(1 - p) + |p - p_interleaved/p|]/d, 2(d^2 - 1)(1 - p)/(p d^2) + 4 sqrt(1 - p) "
                "sqrt(d^2 - 1)/p)";
            bundle.add_derived("E", res.estimate.bound, std::nullopt, bound_tag);
            bundle.add_derived("E_first_branch", res.estimate.bound_direct, std::nullopt, bound_tag);
            bundle.add_derived("E_second_branch", res.estimate.bound_quadratic, std::nullopt, bound_tag);
            break;
        }
        case ProtocolKind::Shadow: {
            auto [kind, factors] = cfg.rb.effective_group();
            auto dec = irrep_decomposition(kind, factors);
            auto probe = probe_for(cfg, dec);
            // The closed-form model needs a multiplicity-free decomposition.
            std::optional<ExperimentConfig> theory_cfg;
            if (dec.multiplicity_free) {
                theory_cfg = cfg;
            }
            auto a = analyze_shadow(sim.records, probe, kind, factors, cfg.rb.initial_state, cfg.shadow.batch_size,
                                    cfg.shadow.batches, theory_cfg);
            add_shadow_to_bundle(bundle, a);
            if (a.fit.has_value()) {
                DecaySeries series{"k_hat", {}};
                for (const auto &e : a.estimates) {
                    series.points.push_back(DecayPoint{e.m, e.value, e.stderr * e.stderr, e.records});
                }
                plots["k_hat"] = {series, *a.fit};
                if (!fit_ok(*a.fit)) {
                    failed.push_back("k_hat");
                }
            }
            break;
        }
    }
    return failed;
}

int cmd_report(const std::string &config_path, const std::string &out_dir, size_t threads) {
    auto cfg = load_config_or_exit(config_path, threads);
    auto sim = simulate(cfg, true);
    write_simulation(cfg, sim, out_dir);

    ReportBundle bundle;
    bundle.set_provenance(cfg.rb.seed, config_hash(cfg.document), protocol_name(cfg.rb.protocol));
    if (sim.data.has_value()) {
        bundle.add_dataset(protocol_name(cfg.rb.protocol), *sim.data);
    }
    std::map<std::string, std::pair<DecaySeries, FitResult>> plots;
    std::vector<std::string> failed;
    try {
        failed = analyze_into(bundle, cfg, sim, plots);
    } catch (const ExitError &) {
        throw;
    } catch (const std::exception &e) {
        throw ExitError(EXIT_SIMULATION, std::string("analysis failed: ") + e.what());
    }
    atomic_write(join_path(out_dir, cfg.output.report), bundle.to_json().dump(2) + "\n");
    if (cfg.output.write_svg) {
        for (const auto &[label, entry] : plots) {
            const auto &[series, f] = entry;
            auto name = svg_name(cfg.output.svg, label, plots.size() == 1);
            atomic_write(join_path(out_dir, name),
                         decay_svg(series, fit_ok(f) ? std::optional<FitResult>(f) : std::nullopt,
                                   cfg.output.log_scale, label));
        }
    }
    for (const auto &d : bundle.derived()) {
        std::cout << d.name << " = " << format_double(d.value);
        if (d.stderr.has_value()) {
            std::cout << " +- " << format_double(*d.stderr);
        }
        std::cout << "    [" << d.formula << "]\n";
    }
    if (!failed.empty()) {
        for (const auto &label : failed) {
            std::cerr << fit_diagnostic(label, plots[label].second) << "\n";
        }
        return EXIT_FIT;
    }
    return 0;
}

int cmd_selftest(const std::string &inject) {
    SelftestInjection injection;
    try {
        injection = parse_injection(inject);
    } catch (const std::invalid_argument &e) {
        throw ExitError(EXIT_CONFIG, e.what());
    }
    bool all = true;
    for (const auto &c : run_selftest(injection)) {
        std::cout << (c.passed ? "PASS" : "FAIL") << "  " << c.name << " (" << c.detail << ")\n";
        all = all && c.passed;
    }
    return all ? 0 : 1;
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"Randomized benchmarking simulator and analysis tool"};
    app.set_version_flag("--version", std::string(RBSIM_VERSION));
    app.require_subcommand(1);

    std::string config_path, out_dir, data_path, model_name = "single_exp", observable, fit_out, svg_path;
    std::string records_path, probe_arg = "P1", group_arg = "C1", inject = "none";
    size_t threads = 0, dim = 2, batch_size = 1, batches = 1, initial_state = 0;
    bool rescale = false, weighted = false, log_scale = false;

    auto *sim = app.add_subcommand("simulate", "Run the protocol in a config and write decay data or records");
    sim->add_option("--config", config_path, "Experiment config (JSON)")->required();
    sim->add_option("--out", out_dir, "Output directory for all written files");
    sim->add_option("--threads", threads, "Worker threads (default: RBSIM_THREADS or hardware count)");

    auto *fit_cmd = app.add_subcommand("fit", "Fit a decay model to a CSV written by simulate");
    fit_cmd->add_option("--data", data_path, "Decay CSV")->required();
    fit_cmd->add_option("--model", model_name, "single_exp, direct_fidelity, multi_exp:<k> or power");
    fit_cmd->add_option("--observable", observable, "Series to fit (default: the first one)");
    fit_cmd->add_flag("--rescale-sq", rescale, "Also report the per-pulse fidelity of single-qubit Cliffords");
    fit_cmd->add_option("--dim", dim, "Hilbert-space dimension used for F_avg and r")->check(CLI::PositiveNumber);
    fit_cmd->add_flag("--weighted", weighted, "Weight points by their standard errors");
    fit_cmd->add_option("--out", fit_out, "Report JSON path (default: stdout)");
    fit_cmd->add_option("--svg", svg_path, "Decay plot path");
    fit_cmd->add_flag("--log-scale", log_scale, "Plot log10(y - B)");

    auto *report = app.add_subcommand("report", "Simulate, fit and write the full report bundle");
    report->add_option("--config", config_path, "Experiment config (JSON)")->required();
    report->add_option("--out", out_dir, "Output directory for all written files");
    report->add_option("--threads", threads, "Worker threads");

    auto *shadow = app.add_subcommand("shadow-estimate", "Median-of-means estimates from shadow records");
    shadow->add_option("--records", records_path, "Record file written by simulate")->required();
    shadow->add_option("--probe", probe_arg, "identity, P<j>, a subspace label, or a JSON file with a matrix");
    shadow->add_option("--N", batch_size, "Records per batch")->required()->check(CLI::PositiveNumber);
    shadow->add_option("--K", batches, "Number of batches")->required()->check(CLI::PositiveNumber);
    shadow->add_option("--group", group_arg, "Gate group the records were drawn from");
    shadow->add_option("--initial-state", initial_state, "Prepared basis state");
    shadow->add_option("--config", config_path, "Config whose noise gives the closed-form comparison");
    shadow->add_option("--out", fit_out, "Report JSON path");

    auto *self = app.add_subcommand("selftest", "Run the embedded consistency checks");
    self->add_option("--inject", inject, "Deliberate fault: wrong-c2-generators or tampered-rdepol");

    CLI11_PARSE(app, argc, argv);

    try {
        if (sim->parsed()) {
            return cmd_simulate(config_path, out_dir, threads);
        }
        if (fit_cmd->parsed()) {
            return cmd_fit(data_path, model_name, observable, rescale, dim, weighted, fit_out, svg_path, log_scale);
        }
        if (report->parsed()) {
            return cmd_report(config_path, out_dir, threads);
        }
        if (shadow->parsed()) {
            return cmd_shadow_estimate(records_path, probe_arg, batch_size, batches, group_arg, initial_state,
                                       config_path, fit_out);
        }
        if (self->parsed()) {
            return cmd_selftest(inject);
        }
    } catch (const ExitError &e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.code;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
