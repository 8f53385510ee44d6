// SPDX-License-Identifier: Apache-2.0
//
// beamkey: beam-domain secret key generation for multi-user massive MIMO
// Copyright (C) 2026 The beamkey Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include "beamkey/serialization.hpp"

#include <catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace beamkey;
namespace fs = std::filesystem;

namespace
{
    std::string slurp(const fs::path &p)
    {
        std::ifstream in(p, std::ios::binary);
        std::ostringstream os;
        os << in.rdbuf();
        return os.str();
    }

    fs::path scratch(const std::string &name)
    {
        const fs::path dir = fs::temp_directory_path() / ("beamkey_test_" + name);
        fs::remove_all(dir);
        return dir;
    }

    ExperimentResult small_result()
    {
        ScenarioConfig c = ScenarioConfig::single_user();
        c.bs_antennas = 16;
        c.trials = 2;
        c.snr_db = {0, 10};
        c.m_e_variants = {4};
        c.workers = 1;
        return run_single_user_rate(c);
    }
}

TEST_CASE("format_double round-trips", "[serialization]")
{
    REQUIRE(format_double(0.1) == "0.10000000000000001");
    REQUIRE(format_double(2.0) == "2");
    for (double v : {1.0 / 3.0, -1e-300, 6.02e23, 0.0})
        REQUIRE(std::stod(format_double(v)) == v);
}

TEST_CASE("PathSet JSON round trip", "[serialization]")
{
    Rng rng = make_rng(61);
    const PathSet p = sample_paths(5, rng, OffGrid{});
    const PathSet back = path_set_from_json(path_set_to_json(p));
    REQUIRE(back.size() == 5);
    for (std::size_t i = 0; i < 5; ++i)
    {
        REQUIRE(back.paths()[i].gain == p.paths()[i].gain);
        REQUIRE(back.paths()[i].aoa == p.paths()[i].aoa);
        REQUIRE(back.paths()[i].aod == p.paths()[i].aod);
        REQUIRE(back.paths()[i].power == p.paths()[i].power);
    }
    REQUIRE_THROWS_AS(path_set_from_json(nlohmann::json::object()), std::invalid_argument);
    REQUIRE_THROWS_AS(path_set_from_json(nlohmann::json::parse(R"({"paths":[{"gain":[1],"aoa":0,"aod":0,"power":1}]})")),
                      std::invalid_argument);
    REQUIRE_THROWS_AS(path_set_from_json(nlohmann::json::parse(R"({"paths":[{"gain":[1,0],"aod":0,"power":1}]})")),
                      std::invalid_argument);
}

TEST_CASE("allocation JSON lists beams and gains", "[serialization]")
{
    Rng rng = make_rng(62);
    const ArrayGeometry bs{16}, ut{4};
    const std::vector<BeamCovariances> covs{
        beam_covariances(sample_paths(3, rng, OffGrid{}), bs, ut, AnalyticCovariance{}),
        beam_covariances(sample_paths(3, rng, OffGrid{}), bs, ut, AnalyticCovariance{})};
    const std::vector<CMatrix> a_ut{sampling_matrix(ut), sampling_matrix(ut)};
    const auto alloc = allocate_beams(covs, 3, 2, sampling_matrix(bs), a_ut);
    const auto doc = allocation_to_json(alloc, covs);
    REQUIRE(doc.at("users").size() == 2);
    const auto &u = doc.at("users")[1];
    REQUIRE(u.at("bs_beams").get<std::vector<std::size_t>>() == alloc.users[1].bs_beams);
    REQUIRE(u.at("ut_beams").get<std::vector<std::size_t>>() == alloc.users[1].ut_beams);
    const auto gains = u.at("bs_gains").get<std::vector<double>>();
    REQUIRE(gains.size() == 3);
    REQUIRE(gains[0] == covs[1].r_bs(alloc.users[1].bs_beams[0], alloc.users[1].bs_beams[0]).real());
    REQUIRE_THROWS_AS(allocation_to_json(alloc, std::span(covs).first(1)), std::invalid_argument);
}

TEST_CASE("curve CSV layout", "[serialization]")
{
    const ExperimentResult r = small_result();
    const auto files = result_to_csv(r);
    REQUIRE(files.size() == 1);
    REQUIRE(files[0].first == "single_user_rate_curves.csv");
    std::istringstream in(files[0].second);
    std::string line;
    std::getline(in, line);
    REQUIRE(line == "curve,snr_db,noise_power,overhead,sum_rate_bits,unit_rate_bits,max_residual,rate_user0_bits");
    std::size_t rows = 0;
    while (std::getline(in, line))
    {
        ++rows;
        REQUIRE(std::count(line.begin(), line.end(), ',') == 7);
    }
    REQUIRE(rows == 2 * 2);
}

TEST_CASE("other tables", "[serialization]")
{
    const auto overhead = result_to_csv(run_overhead_comparison(ScenarioConfig::multi_user()));
    REQUIRE(overhead.size() == 1);
    REQUIRE(overhead[0].first == "overhead.csv");
    REQUIRE(overhead[0].second.rfind("bs_antennas,users,traditional,reused\n64,0,64,10\n", 0) == 0);

    ScenarioConfig c = ScenarioConfig::multi_user();
    c.trials = 1;
    const auto gains = result_to_csv(run_beam_gain_profile(c));
    std::vector<std::string> names;
    for (const auto &[name, text] : gains)
        names.push_back(name);
    REQUIRE(names == std::vector<std::string>{"beam_gains_profile.csv", "beam_gains_capture.csv",
                                              "beam_gains_attenuation.csv"});
    REQUIRE(gains[1].second.rfind("trial,user,top_me_fraction,support,peak_beam\n", 0) == 0);
}

TEST_CASE("result JSON embeds config, version and hash", "[serialization]")
{
    const ExperimentResult r = small_result();
    const auto doc = result_to_json(r);
    REQUIRE(doc.at("tool") == "beamkey");
    REQUIRE(doc.at("version") == version());
    REQUIRE(doc.at("config") == to_json(r.config));
    REQUIRE(doc.at("config_hash") == config_hash(r.config));
    REQUIRE(doc.at("curves").size() == 4);
    REQUIRE(doc.at("curves")[0].at("curve") == "perfect");
}

TEST_CASE("write_result is byte reproducible", "[serialization]")
{
    const fs::path a = scratch("a"), b = scratch("b");
    const auto written_a = write_result(small_result(), a);
    const auto written_b = write_result(small_result(), b);
    REQUIRE(written_a.size() == 2);
    REQUIRE(written_a[0].filename() == "single_user_rate_curves.csv");
    REQUIRE(written_a[1].filename() == "single_user_rate_meta.json");
    for (std::size_t i = 0; i < written_a.size(); ++i)
        REQUIRE(slurp(written_a[i]) == slurp(written_b[i]));

    const auto meta = nlohmann::json::parse(slurp(written_a[1]));
    REQUIRE(meta.at("files").size() == 1);
    REQUIRE(meta.at("units") == "bits per probing round");

    ExperimentResult j = small_result();
    j.config.format = OutputFormat::json;
    const fs::path c = scratch("c");
    const auto written_c = write_result(j, c);
    REQUIRE(written_c.size() == 1);
    REQUIRE(written_c[0].filename() == "single_user_rate.json");
    REQUIRE(nlohmann::json::parse(slurp(written_c[0])).at("curves").size() == 4);
    fs::remove_all(a);
    fs::remove_all(b);
    fs::remove_all(c);
}

TEST_CASE("validation report JSON", "[serialization]")
{
    ValidationReport report;
    report.properties.push_back({"x", PropertyStatus::pass, 1e-13, 1e-12, "ok"});
    report.properties.push_back({"y", PropertyStatus::skipped, std::numeric_limits<double>::infinity(), 0.0, "none"});
    const auto doc = report_to_json(report);
    REQUIRE(doc.at("passed") == true);
    REQUIRE(doc.at("properties")[0].at("status") == "PASS");
    REQUIRE(doc.at("properties")[1].at("status") == "SKIP");
    REQUIRE(doc.at("properties")[1].at("measured") == "inf");
}
