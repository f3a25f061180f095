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

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>

#include "rbsim/selftest.h"

using namespace rbsim;

TEST(Report, csv_round_trip_is_bit_exact) {
    DecayDataset data;
    data.series.push_back(DecaySeries{"survival", {{1, 0.1 + 0.2, 1e-300, 5}, {2, 2.0 / 3.0, 0, 5}}});
    data.series.push_back(DecaySeries{"coef:ZZ", {{1, -std::nextafter(0.5, 1.0), 3.25e-7, 7}}});
    std::string text = decay_csv(data);
    ASSERT_EQ(text.substr(0, 33), "observable,m,mean,variance,count\n");
    auto back = parse_decay_csv(text);
    ASSERT_EQ(back.series.size(), 2u);
    for (size_t s = 0; s < 2; s++) {
        ASSERT_EQ(back.series[s].observable, data.series[s].observable);
        for (size_t k = 0; k < data.series[s].points.size(); k++) {
            ASSERT_EQ(back.series[s].points[k].mean, data.series[s].points[k].mean);
            ASSERT_EQ(back.series[s].points[k].variance, data.series[s].points[k].variance);
            ASSERT_EQ(back.series[s].points[k].count, data.series[s].points[k].count);
        }
    }
    ASSERT_EQ(decay_csv(back), text);
}

TEST(Report, malformed_csv) {
    ASSERT_THROW(parse_decay_csv("m,mean\n1,2\n"), DataFormatError);
    ASSERT_THROW(parse_decay_csv("observable,m,mean,variance,count\nsurvival,1,0.5,0\n"), DataFormatError);
    ASSERT_THROW(parse_decay_csv("observable,m,mean,variance,count\nsurvival,1,0.5x,0,1\n"), DataFormatError);
    ASSERT_THROW(parse_decay_csv("observable,m,mean,variance,count\n"), DataFormatError);
    ASSERT_THROW(parse_decay_csv("observable,m,mean,variance,count\nsurvival,-1,0.5,0,1\n"), DataFormatError);
}

TEST(Report, records_round_trip) {
    std::vector<ShadowRecord> records{{1, {5}, 0}, {3, {0, 23, 7}, 1}, {2, {11, 11}, 1}};
    std::string text = format_records(records, 1);
    ASSERT_EQ(text, "1\t5\t0\n3\t0,23,7\t1\n2\t11,11\t1\n");
    ASSERT_EQ(parse_records(text), records);
    std::vector<ShadowRecord> two{{1, {300}, 2}};
    ASSERT_EQ(format_records(two, 2), "1\t300\t10\n");
    ASSERT_EQ(parse_records(format_records(two, 2)), two);
    ASSERT_THROW(parse_records("2\t1\t0\n"), DataFormatError);
    ASSERT_THROW(parse_records("1\t1\t2\n"), DataFormatError);
}

TEST(Report, fnv_and_hash) {
    ASSERT_EQ(fnv1a64(""), 0xcbf29ce484222325ULL);
    ASSERT_EQ(fnv1a64("a"), 0xaf63dc4c8601ec8cULL);
    auto a = nlohmann::json::parse(R"({"b": 1, "a": 2})");
    auto b = nlohmann::json::parse(R"({"a": 2, "b": 1})");
    ASSERT_EQ(config_hash(a), config_hash(b));
    ASSERT_EQ(config_hash(a).size(), 16u);
}

TEST(Report, atomic_write_replaces_file) {
    auto dir = std::filesystem::temp_directory_path() / "rbsim_report_test";
    std::filesystem::remove_all(dir);
    std::string path = (dir / "sub" / "out.txt").string();
    atomic_write(path, "first");
    atomic_write(path, "second");
    ASSERT_EQ(read_text_file(path), "second");
    ASSERT_FALSE(std::filesystem::exists(path + ".tmp"));
    std::filesystem::remove_all(dir);
}

TEST(Report, derived_quantities_need_registered_formulas) {
    ReportBundle bundle;
    ASSERT_THROW(bundle.add_derived("x", 1, std::nullopt, "x = 1"), std::logic_error);
    FitResult f;
    f.model = DecayModel::single_exp();
    f.params = {0.5, 0.98, 0.5};
    f.stderrs = {0, 0.001, 0};
    f.covariance = RealMatrix::Zero(3, 3);
    f.converged = true;
    add_fidelity_quantities(bundle, "", f, 2, true);
    bundle.add_fit("survival", f);
    auto j = bundle.to_json();
    ASSERT_EQ(j["derived"].size(), 3u);
    const auto &reg = formula_registry();
    for (const auto &d : j["derived"]) {
        ASSERT_NE(std::find(reg.begin(), reg.end(), d["formula"].get<std::string>()), reg.end());
    }
    ASSERT_NEAR(j["derived"][1]["value"].get<double>(), 0.01, 1e-15);
    ASSERT_NE(std::find(reg.begin(), reg.end(), j["fits"]["survival"]["formula"].get<std::string>()), reg.end());
}

TEST(Report, svg_has_points_curve_and_band) {
    DecaySeries s{"survival", {}};
    for (size_t m = 1; m <= 10; m++) {
        s.points.push_back(DecayPoint{m, 0.5 * std::pow(0.9, (double)m) + 0.5, 0, 1});
    }
    auto f = fit(DecayModel::single_exp(), s.lengths(), s.means());
    auto svg = decay_svg(s, f, false, "survival <C1>");
    ASSERT_NE(svg.find("<polyline"), std::string::npos);
    ASSERT_NE(svg.find("<polygon"), std::string::npos);
    ASSERT_NE(svg.find("&lt;C1&gt;"), std::string::npos);
    size_t circles = 0;
    for (size_t pos = 0; (pos = svg.find("<circle", pos)) != std::string::npos; pos++) {
        circles++;
    }
    ASSERT_EQ(circles, 10u);
    ASSERT_NE(decay_svg(s, f, true, "log").find("log10"), std::string::npos);
}

TEST(Selftest, passes_and_detects_injected_faults) {
    for (const auto &c : run_selftest()) {
        ASSERT_TRUE(c.passed) << c.name << ": " << c.detail;
    }
    auto wrong = run_selftest(SelftestInjection::WrongC2Generators);
    ASSERT_FALSE(wrong[0].passed);
    ASSERT_TRUE(wrong.back().passed);
    auto tampered = run_selftest(SelftestInjection::TamperedRdepol);
    ASSERT_TRUE(tampered[0].passed);
    ASSERT_FALSE(tampered.back().passed);
    ASSERT_THROW(parse_injection("bogus"), std::invalid_argument);
}
