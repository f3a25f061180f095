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

#include "rbsim/report.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace rbsim {

using nlohmann::json;

std::string format_double(double value) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

namespace {

std::vector<std::string> split(const std::string &s, char sep) {
    std::vector<std::string> out;
    size_t start = 0;
    while (true) {
        size_t pos = s.find(sep, start);
        out.push_back(s.substr(start, pos == std::string::npos ? std::string::npos : pos - start));
        if (pos == std::string::npos) {
            return out;
        }
        start = pos + 1;
    }
}

std::vector<std::string> lines_of(const std::string &text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (!line.empty()) {
            out.push_back(line);
        }
    }
    return out;
}

double parse_number(const std::string &s, const std::string &where) {
    double v = 0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size() || s.empty()) {
        throw DataFormatError(where + ": '" + s + "' is not a number");
    }
    return v;
}

uint64_t parse_count(const std::string &s, const std::string &where) {
    uint64_t v = 0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size() || s.empty()) {
        throw DataFormatError(where + ": '" + s + "' is not a non-negative integer");
    }
    return v;
}

}  // namespace

std::string decay_csv(const DecayDataset &data) {
    std::string out = "observable,m,mean,variance,count\n";
    for (const auto &s : data.series) {
        if (s.observable.find_first_of(",\n") != std::string::npos) {
            throw DataFormatError("observable name '" + s.observable + "' cannot be written to CSV");
        }
        for (const auto &p : s.points) {
            out += s.observable + "," + std::to_string(p.m) + "," + format_double(p.mean) + "," +
                   format_double(p.variance) + "," + std::to_string(p.count) + "\n";
        }
    }
    return out;
}

DecayDataset parse_decay_csv(const std::string &text) {
    auto lines = lines_of(text);
    if (lines.empty() || lines[0] != "observable,m,mean,variance,count") {
        throw DataFormatError("line 1: expected header 'observable,m,mean,variance,count'");
    }
    DecayDataset data;
    for (size_t k = 1; k < lines.size(); k++) {
        std::string where = "line " + std::to_string(k + 1);
        auto f = split(lines[k], ',');
        if (f.size() != 5) {
            throw DataFormatError(where + ": expected 5 fields, got " + std::to_string(f.size()));
        }
        if (f[0].empty()) {
            throw DataFormatError(where + ": empty observable name");
        }
        DecayPoint p;
        p.m = parse_count(f[1], where);
        p.mean = parse_number(f[2], where);
        p.variance = parse_number(f[3], where);
        p.count = parse_count(f[4], where);
        auto it = std::find_if(data.series.begin(), data.series.end(),
                               [&](const DecaySeries &s) { return s.observable == f[0]; });
        if (it == data.series.end()) {
            data.series.push_back(DecaySeries{f[0], {}});
            it = data.series.end() - 1;
        }
        it->points.push_back(p);
    }
    if (data.series.empty()) {
        throw DataFormatError("no data rows");
    }
    return data;
}

std::string format_records(const std::vector<ShadowRecord> &records, size_t num_qubits) {
    std::string out;
    for (const auto &r : records) {
        out += std::to_string(r.m) + "\t";
        for (size_t k = 0; k < r.gate_ids.size(); k++) {
            if (k) {
                out += ",";
            }
            out += std::to_string(r.gate_ids[k]);
        }
        out += "\t";
        for (size_t q = 0; q < num_qubits; q++) {
            out += ((r.outcome >> (num_qubits - 1 - q)) & 1) ? '1' : '0';
        }
        out += "\n";
    }
    return out;
}

std::vector<ShadowRecord> parse_records(const std::string &text) {
    std::vector<ShadowRecord> out;
    auto lines = lines_of(text);
    for (size_t k = 0; k < lines.size(); k++) {
        std::string where = "record line " + std::to_string(k + 1);
        auto f = split(lines[k], '\t');
        if (f.size() != 3) {
            throw DataFormatError(where + ": expected 3 tab-separated fields");
        }
        ShadowRecord r;
        r.m = parse_count(f[0], where);
        for (const auto &g : split(f[1], ',')) {
            uint64_t id = parse_count(g, where);
            if (id > UINT32_MAX) {
                throw DataFormatError(where + ": gate id out of range");
            }
            r.gate_ids.push_back((uint32_t)id);
        }
        if (r.gate_ids.size() != r.m) {
            throw DataFormatError(where + ": gate count does not match m");
        }
        if (f[2].empty() || f[2].size() > 64 || f[2].find_first_not_of("01") != std::string::npos) {
            throw DataFormatError(where + ": outcome must be a bit string");
        }
        r.outcome = std::stoull(f[2], nullptr, 2);
        out.push_back(std::move(r));
    }
    return out;
}

uint64_t fnv1a64(const std::string &bytes) {
    uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string config_hash(const json &doc) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", (unsigned long long)fnv1a64(doc.dump()));
    return buf;
}

void atomic_write(const std::string &path, const std::string &content) {
    std::filesystem::path target(path);
    if (target.has_parent_path()) {
        std::filesystem::create_directories(target.parent_path());
    }
    std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw std::runtime_error("cannot write '" + tmp + "'");
        }
        out << content;
        out.flush();
        if (!out) {
            throw std::runtime_error("write to '" + tmp + "' failed");
        }
    }
    std::filesystem::rename(tmp, target);
}

std::string read_text_file(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open '" + path + "'");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

const std::vector<std::string> &formula_registry() {
    static const std::vector<std::string> tags{
        "F_seq(m) = A p^m + B",
        "F_seq(m) = A (2F - 1)^m + B",
        "F_avg = p + (1 - p)/d",
        "r = (d - 1)(1 - p)/d",
        "F_pulse = 1 - (1 - F_avg)/n_pulses",
        "<P>(m) = c alpha^(m - 1)",
        "delta_alpha = alpha_W3 - alpha_W1 alpha_W2",
        "alpha_T = prod_S [1 + eps_S (R_depol(S, T) - 1)]",
        "r_est = (d - 1)(1 - p_interleaved/p)/d",
        "E = min((d - 1)[(1 - p) + |p - p_interleaved/p|]/d, 2(d^2 - 1)(1 - p)/(p d^2) + 4 sqrt(1 - p) sqrt(d^2 - 1)/p)",
        "p_target = p_interleaved/p",
        "k_hat(m) = median of batch means of f_A",
        "k(m) = Tr[Theta Phi^(m - 1)]",
        "k(m) = c q^(m - 1)",
        "F_seq(m) = B + sum_k A_k alpha_k^m",
    };
    return tags;
}

void ReportBundle::set_provenance(uint64_t seed, const std::string &hash, const std::string &protocol) {
    provenance_ = json{{"tool", "rbsim"}, {"version", RBSIM_VERSION}, {"seed", seed}, {"config_hash", hash},
                       {"protocol", protocol}};
}

void ReportBundle::add_dataset(const std::string &label, const DecayDataset &data) {
    json series = json::object();
    for (const auto &s : data.series) {
        json rows = json::array();
        for (const auto &p : s.points) {
            rows.push_back(json{{"m", p.m}, {"mean", p.mean}, {"variance", p.variance}, {"count", p.count}});
        }
        series[s.observable] = rows;
    }
    datasets_[label] = json{{"protocol", data.protocol}, {"group", data.group}, {"series", series}};
}

void ReportBundle::add_fit(const std::string &label, const FitResult &fit) {
    fits_[label] = fit_to_json(fit);
}

void ReportBundle::add_derived(const std::string &name, double value, std::optional<double> stderr,
                               const std::string &formula) {
    const auto &reg = formula_registry();
    if (std::find(reg.begin(), reg.end(), formula) == reg.end()) {
        throw std::logic_error("derived quantity '" + name + "' uses an unregistered formula tag");
    }
    derived_.push_back(DerivedQuantity{name, value, stderr, formula});
}

void ReportBundle::add_note(const std::string &note) {
    notes_.push_back(note);
}

json ReportBundle::to_json() const {
    json derived = json::array();
    for (const auto &d : derived_) {
        json item{{"name", d.name}, {"value", d.value}, {"formula", d.formula}};
        if (d.stderr.has_value()) {
            item["stderr"] = *d.stderr;
        }
        derived.push_back(item);
    }
    return json{{"provenance", provenance_}, {"data", datasets_}, {"fits", fits_}, {"derived", derived},
                {"notes", notes_}};
}

json fit_to_json(const FitResult &fit) {
    json params = json::object();
    auto names = fit.model.param_names();
    for (size_t k = 0; k < names.size() && k < fit.params.size(); k++) {
        params[names[k]] = json{{"value", fit.params[k]}, {"stderr", k < fit.stderrs.size() ? fit.stderrs[k] : 0.0}};
    }
    json cov = json::array();
    for (Eigen::Index r = 0; r < fit.covariance.rows(); r++) {
        json row = json::array();
        for (Eigen::Index c = 0; c < fit.covariance.cols(); c++) {
            row.push_back(fit.covariance(r, c));
        }
        cov.push_back(row);
    }
    std::string formula;
    switch (fit.model.kind) {
        case ModelKind::SingleExp:
            formula = "F_seq(m) = A p^m + B";
            break;
        case ModelKind::DirectFidelity:
            formula = "F_seq(m) = A (2F - 1)^m + B";
            break;
        case ModelKind::PowerModel:
            formula = "k(m) = c q^(m - 1)";
            break;
        case ModelKind::MultiExp:
            formula = "F_seq(m) = B + sum_k A_k alpha_k^m";
            break;
    }
    return json{{"model", fit.model.name()},
                {"formula", formula},
                {"params", params},
                {"covariance", cov},
                {"sum_sq_residuals", fit.sum_sq_residuals},
                {"num_points", fit.num_points},
                {"iterations", fit.iterations},
                {"converged", fit.converged},
                {"rank_deficient", fit.rank_deficient},
                {"message", fit.message}};
}

void add_fidelity_quantities(ReportBundle &bundle, const std::string &prefix, const FitResult &fit, size_t d,
                             bool rescale_single_qubit) {
    auto rep = report_fidelity(fit, d, rescale_single_qubit);
    bundle.add_derived(prefix + "average_fidelity", rep.average_fidelity, rep.average_fidelity_stderr,
                       "F_avg = p + (1 - p)/d");
    bundle.add_derived(prefix + "error_rate", rep.error_rate, rep.error_rate_stderr, "r = (d - 1)(1 - p)/d");
    if (rep.rescaled) {
        bundle.add_derived(prefix + "pulse_fidelity", rep.pulse_fidelity, rep.pulse_fidelity_stderr,
                           "F_pulse = 1 - (1 - F_avg)/n_pulses");
    }
}

namespace {

std::optional<size_t> offset_index(const DecayModel &model) {
    switch (model.kind) {
        case ModelKind::SingleExp:
        case ModelKind::DirectFidelity:
            return 2;
        case ModelKind::MultiExp:
            return 0;
        case ModelKind::PowerModel:
            return std::nullopt;
    }
    return std::nullopt;
}

std::string escape_xml(const std::string &s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '<':
                out += "&lt;";
                break;
            case '>':
                out += "&gt;";
                break;
            case '&':
                out += "&amp;";
                break;
            case '"':
                out += "&quot;";
                break;
            default:
                out += c;
        }
    }
    return out;
}

std::string fixed(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

}  // namespace

std::string decay_svg(const DecaySeries &series, const std::optional<FitResult> &fit, bool log_scale,
                      const std::string &title) {
    const double width = 640, height = 400, left = 70, right = 20, top = 40, bottom = 50;
    double offset = 0;
    if (log_scale) {
        if (!fit.has_value() || !offset_index(fit->model).has_value()) {
            log_scale = false;
        } else {
            offset = fit->params[*offset_index(fit->model)];
        }
    }
    auto transform = [&](double y) -> std::optional<double> {
        if (!log_scale) {
            return y;
        }
        if (y - offset <= 0) {
            return std::nullopt;
        }
        return std::log10(y - offset);
    };

    double mmax = 1;
    for (const auto &p : series.points) {
        mmax = std::max(mmax, (double)p.m);
    }
    struct Sample {
        double m, y, lo, hi;
    };
    std::vector<Sample> curve;
    if (fit.has_value()) {
        std::vector<double> grad;
        for (int k = 0; k <= 200; k++) {
            double m = mmax * k / 200.0;
            if (fit->model.kind == ModelKind::PowerModel && m < 1) {
                continue;
            }
            double y = fit->model.eval(fit->params, m);
            fit->model.gradient(fit->params, m, grad);
            double var = 0;
            if ((size_t)fit->covariance.rows() == grad.size()) {
                for (size_t a = 0; a < grad.size(); a++) {
                    for (size_t b = 0; b < grad.size(); b++) {
                        var += grad[a] * fit->covariance(a, b) * grad[b];
                    }
                }
            }
            double band = 2 * std::sqrt(std::max(0.0, var));
            curve.push_back(Sample{m, y, y - band, y + band});
        }
    }

    double ylo = INFINITY, yhi = -INFINITY;
    auto extend = [&](double y) {
        if (auto t = transform(y)) {
            ylo = std::min(ylo, *t);
            yhi = std::max(yhi, *t);
        }
    };
    for (const auto &p : series.points) {
        extend(p.mean);
    }
    for (const auto &s : curve) {
        extend(s.lo);
        extend(s.hi);
    }
    if (!(ylo < yhi)) {
        ylo = std::isfinite(ylo) ? ylo - 0.5 : 0;
        yhi = ylo + 1;
    }
    double pad = 0.05 * (yhi - ylo);
    ylo -= pad;
    yhi += pad;
    auto px = [&](double m) { return left + (width - left - right) * m / mmax; };
    auto py = [&](double y) { return top + (height - top - bottom) * (yhi - y) / (yhi - ylo); };

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
        << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg << "<text x=\"" << width / 2 << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"15\">"
        << escape_xml(title) << "</text>\n";
    svg << "<line x1=\"" << left << "\" y1=\"" << height - bottom << "\" x2=\"" << width - right << "\" y2=\""
        << height - bottom << "\" stroke=\"black\"/>\n";
    svg << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\"" << height - bottom
        << "\" stroke=\"black\"/>\n";
    for (int k = 0; k <= 4; k++) {
        double y = ylo + (yhi - ylo) * k / 4;
        svg << "<text x=\"" << left - 6 << "\" y=\"" << fixed(py(y) + 4)
            << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << format_double(std::round(y * 1e4) / 1e4)
            << "</text>\n";
        double m = mmax * k / 4;
        svg << "<text x=\"" << fixed(px(m)) << "\" y=\"" << height - bottom + 16
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" << format_double(std::round(m * 10) / 10)
            << "</text>\n";
    }
    svg << "<text x=\"" << width / 2 << "\" y=\"" << height - 12
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">sequence length m</text>\n";
    svg << "<text x=\"16\" y=\"" << height / 2 << "\" transform=\"rotate(-90 16 " << height / 2
        << ")\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">"
        << escape_xml(log_scale ? "log10(" + series.observable + " - B)" : series.observable) << "</text>\n";

    if (!curve.empty()) {
        std::string upper, lower, line;
        for (const auto &s : curve) {
            auto hi = transform(s.hi), y = transform(s.y);
            if (hi) {
                upper += fixed(px(s.m)) + "," + fixed(py(*hi)) + " ";
            }
            if (y) {
                line += fixed(px(s.m)) + "," + fixed(py(*y)) + " ";
            }
        }
        for (auto it = curve.rbegin(); it != curve.rend(); ++it) {
            if (auto lo = transform(it->lo)) {
                lower += fixed(px(it->m)) + "," + fixed(py(*lo)) + " ";
            }
        }
        svg << "<polygon points=\"" << upper << lower << "\" fill=\"#9ecae1\" fill-opacity=\"0.5\" stroke=\"none\"/>\n";
        svg << "<polyline points=\"" << line << "\" fill=\"none\" stroke=\"#08519c\" stroke-width=\"1.5\"/>\n";
    }
    for (const auto &p : series.points) {
        if (auto y = transform(p.mean)) {
            svg << "<circle cx=\"" << fixed(px((double)p.m)) << "\" cy=\"" << fixed(py(*y))
                << "\" r=\"3\" fill=\"#d94801\"/>\n";
        }
    }
    svg << "</svg>\n";
    return svg.str();
}

}  // namespace rbsim
