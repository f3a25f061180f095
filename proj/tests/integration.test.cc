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

// End-to-end checks of the rbsim command-line tool.

#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "rbsim/report.h"
#include "rbsim/shadow.h"

using namespace rbsim;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct RunResult {
    int code = -1;
    std::string out;
    std::string err;
};

class Cli : public ::testing::Test {
   protected:
    void SetUp() override {
        dir = fs::temp_directory_path() /
              ("rbsim_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir);
        fs::create_directories(dir);
    }
    void TearDown() override {
        fs::remove_all(dir);
    }

    std::string path(const std::string &name) const {
        return (dir / name).string();
    }

    std::string write(const std::string &name, const std::string &content) const {
        std::ofstream(path(name), std::ios::binary) << content;
        return path(name);
    }

    RunResult run(const std::string &args) const {
        std::string cmd = std::string(RBSIM_CLI_PATH) + " " + args + " >" + path("stdout.txt") + " 2>" +
                          path("stderr.txt");
        int status = std::system(cmd.c_str());
        RunResult r;
        r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
        r.out = read_text_file(path("stdout.txt"));
        r.err = read_text_file(path("stderr.txt"));
        return r;
    }

    fs::path dir;
};

std::string config(const std::string &name) {
    return std::string(RBSIM_CONFIG_DIR) + "/" + name;
}

size_t count_lines(const std::string &text) {
    return (size_t)std::count(text.begin(), text.end(), '\n');
}

const json &derived(const json &bundle, const std::string &name) {
    for (const auto &d : bundle["derived"]) {
        if (d["name"] == name) {
            return d;
        }
    }
    throw std::runtime_error("no derived quantity " + name);
}

}  // namespace

TEST_F(Cli, standard_simulate_writes_one_row_per_length) {
    auto r = run("simulate --config " + config("standard_c1.json") + " --out " + path("a"));
    ASSERT_EQ(r.code, 0) << r.err;
    auto data = parse_decay_csv(read_text_file(path("a/decay.csv")));
    ASSERT_EQ(data.series.size(), 1u);
    ASSERT_EQ(data.series[0].points.size(), 50u);
    auto manifest = json::parse(read_text_file(path("a/manifest.json")));
    ASSERT_EQ(manifest["seed"], 2024);
    ASSERT_EQ(manifest["config_hash"].get<std::string>().size(), 16u);
}

TEST_F(Cli, same_seed_gives_identical_artifacts) {
    for (const auto *name : {"standard_c1.json", "simultaneous_toy.json", "interleaved.json", "shadow_c1.json"}) {
        ASSERT_EQ(run("report --config " + config(name) + " --out " + path("a") + " --threads 1").code, 0) << name;
        ASSERT_EQ(run("report --config " + config(name) + " --out " + path("b") + " --threads 3").code, 0) << name;
        for (const auto &entry : fs::directory_iterator(path("a"))) {
            auto other = path("b") / entry.path().filename();
            ASSERT_EQ(read_text_file(entry.path().string()), read_text_file(other.string()))
                << name << ": " << entry.path().filename();
        }
        fs::remove_all(path("a"));
        fs::remove_all(path("b"));
    }
}

TEST_F(Cli, shadow_record_count) {
    auto cfg = write("shadow.json", R"({
        "protocol": "shadow", "lengths": [1, 2, 5], "sequences": 37, "shots": 1, "seed": 4,
        "noise": {"type": "depolarizing", "p": 0.9},
        "shadow": {"probe": "P1", "batch_size": 5, "batches": 7}
    })");
    ASSERT_EQ(run("simulate --config " + cfg + " --out " + path("s")).code, 0);
    auto text = read_text_file(path("s/records.tsv"));
    ASSERT_EQ(count_lines(text), 3u * 37u);
    ASSERT_EQ(format_records(parse_records(text), 1), text);
}

TEST_F(Cli, fit_recovers_synthetic_decay_and_draws_plot) {
    std::ostringstream csv;
    csv << "observable,m,mean,variance,count\n";
    for (int m = 1; m <= 40; m += 3) {
        csv << "survival," << m << "," << format_double(0.45 * std::pow(0.975, m) + 0.52) << ",0,1\n";
    }
    auto data = write("synthetic.csv", csv.str());
    auto r = run("fit --data " + data + " --model single_exp --out " + path("fit.json") + " --svg " + path("fit.svg"));
    ASSERT_EQ(r.code, 0) << r.err;
    auto bundle = json::parse(read_text_file(path("fit.json")));
    ASSERT_NEAR(bundle["fits"]["survival"]["params"]["p"]["value"].get<double>(), 0.975, 1e-8);
    auto svg = read_text_file(path("fit.svg"));
    ASSERT_NE(svg.find("<polyline"), std::string::npos);
    ASSERT_NE(svg.find("<polygon"), std::string::npos);
}

TEST_F(Cli, rescale_divides_infidelity_by_mean_pulse_count) {
    ASSERT_EQ(run("simulate --config " + config("standard_c1.json") + " --out " + path("a")).code, 0);
    ASSERT_EQ(run("fit --data " + path("a/decay.csv") + " --rescale-sq --out " + path("f.json")).code, 0);
    auto bundle = json::parse(read_text_file(path("f.json")));
    double r = derived(bundle, "error_rate")["value"];
    double pulse = derived(bundle, "pulse_fidelity")["value"];
    ASSERT_NEAR(1 - pulse, r / 1.875, 1e-15);
    ASSERT_NEAR(r, 0.01, 1e-6);
}

TEST_F(Cli, flat_data_exits_four) {
    std::string csv = "observable,m,mean,variance,count\n";
    for (int m = 1; m <= 6; m++) {
        csv += "survival," + std::to_string(m) + ",0.5,0,1\n";
    }
    auto r = run("fit --data " + write("flat.csv", csv));
    ASSERT_EQ(r.code, 4);
    ASSERT_NE(r.err.find("fit of 'survival' failed"), std::string::npos);
}

TEST_F(Cli, input_errors_exit_two_and_simulation_errors_exit_three) {
    ASSERT_EQ(run("fit --data " + write("bad.csv", "observable,m,mean\n1,2,3\n")).code, 2);
    ASSERT_EQ(run("fit --data " + path("missing.csv")).code, 2);
    auto r = run("simulate --config " +
                 write("typo.json", R"({"protocol": "standard", "lengths": [1], "noise": {"type": "ideal"},
                                       "sequnces": 3})"));
    ASSERT_EQ(r.code, 2);
    ASSERT_NE(r.err.find("config.sequnces"), std::string::npos);
    ASSERT_EQ(run("simulate --config " + path("missing.json")).code, 2);
    auto sim = run("simulate --config " +
                   write("cnot.json", R"({"protocol": "interleaved", "lengths": [1, 2], "noise": {"type": "ideal"},
                                         "interleaved": {"target": "CNOT"}})") +
                   " --out " + path("x"));
    ASSERT_EQ(sim.code, 3) << sim.err;
}

TEST_F(Cli, interleaved_report_fields) {
    ASSERT_EQ(run("report --config " + config("interleaved.json") + " --out " + path("i")).code, 0);
    auto bundle = json::parse(read_text_file(path("i/report.json")));
    ASSERT_NEAR(derived(bundle, "r_est")["value"].get<double>(), 0.015, 1e-6);
    double e = derived(bundle, "E")["value"];
    double b1 = derived(bundle, "E_first_branch")["value"];
    double b2 = derived(bundle, "E_second_branch")["value"];
    ASSERT_EQ(e, std::min(b1, b2));
    ASSERT_EQ(bundle["provenance"]["seed"], 3);
    auto data = parse_decay_csv(read_text_file(path("i/decay.csv")));
    ASSERT_EQ(data.series[0].observable, "reference:survival");
    ASSERT_EQ(data.series[1].observable, "interleaved:survival");
}

TEST_F(Cli, shadow_estimate_tracks_the_depolarizing_rate) {
    ASSERT_EQ(run("simulate --config " + config("shadow_c1.json") + " --out " + path("s")).code, 0);
    auto r = run("shadow-estimate --records " + path("s/records.tsv") + " --probe P1 --N 200 --K 20 --config " +
                 config("shadow_c1.json") + " --out " + path("k.json"));
    ASSERT_EQ(r.code, 0) << r.err;
    auto bundle = json::parse(read_text_file(path("k.json")));
    const auto &q = derived(bundle, "q");
    ASSERT_LT(std::abs(q["value"].get<double>() - 0.95), 3 * q["stderr"].get<double>());
    ASSERT_NE(r.out.find("theory"), std::string::npos);

    ASSERT_EQ(run("shadow-estimate --records " + path("s/records.tsv") + " --probe P1 --N 400 --K 20").code, 2);
    ASSERT_EQ(run("shadow-estimate --records " + path("s/records.tsv") + " --probe P7 --N 1 --K 1").code, 2);
}

TEST_F(Cli, shadow_single_record_is_its_own_estimate) {
    auto records = write("one.tsv", "3\t5,17,2\t1\n");
    auto r = run("shadow-estimate --records " + records + " --probe P1 --N 1 --K 1 --out " + path("k.json"));
    ASSERT_EQ(r.code, 0) << r.err;
    const auto &group = cached_group(GroupKind::C1);
    auto probe = parse_probe("P1", irrep_decomposition(GroupKind::C1));
    double f = correlation_function(ShadowRecord{3, {5, 17, 2}, 1}, probe, group, ShadowReference::ideal(1, 0));
    auto bundle = json::parse(read_text_file(path("k.json")));
    ASSERT_EQ(derived(bundle, "k_hat(3)")["value"].get<double>(), f);
}

TEST_F(Cli, identity_probe_is_flat_without_noise) {
    auto cfg = write("ideal.json", R"({
        "protocol": "shadow", "lengths": [1, 2, 4, 8], "sequences": 20000, "shots": 1, "seed": 8,
        "noise": {"type": "ideal"}
    })");
    ASSERT_EQ(run("simulate --config " + cfg + " --out " + path("s")).code, 0);
    auto r = run("shadow-estimate --records " + path("s/records.tsv") + " --probe identity --N 1000 --K 20 --out " +
                 path("k.json"));
    ASSERT_EQ(r.code, 0) << r.err;
    auto bundle = json::parse(read_text_file(path("k.json")));
    // The word product is uniform over the group at every length, so each estimate targets the same constant:
    // the average squared outcome probability over the six stabilizer states, 2/3.
    for (const auto &d : bundle["derived"]) {
        if (d["formula"] == "k_hat(m) = median of batch means of f_A") {
            ASSERT_LT(std::abs(d["value"].get<double>() - 2.0 / 3.0), 5 * d["stderr"].get<double>()) << d["name"];
        }
    }
}

TEST_F(Cli, selftest_and_injected_faults) {
    auto ok = run("selftest");
    ASSERT_EQ(ok.code, 0) << ok.out;
    ASSERT_EQ(ok.out.find("FAIL"), std::string::npos);
    auto wrong = run("selftest --inject wrong-c2-generators");
    ASSERT_NE(wrong.code, 0);
    ASSERT_NE(wrong.out.find("FAIL  group orders"), std::string::npos);
    auto tampered = run("selftest --inject tampered-rdepol");
    ASSERT_NE(tampered.code, 0);
    ASSERT_NE(tampered.out.find("FAIL  fixed-subspace weight round trip"), std::string::npos);
}
