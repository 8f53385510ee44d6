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

#include "beamkey/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace beamkey
{
    std::string_view to_string(AngleMode mode)
    {
        return mode == AngleMode::on_grid ? "on_grid" : "off_grid";
    }

    std::string_view to_string(OutputFormat format)
    {
        return format == OutputFormat::csv ? "csv" : "json";
    }

    AngleMode parse_angle_mode(std::string_view text)
    {
        if (text == "on_grid")
            return AngleMode::on_grid;
        if (text == "off_grid")
            return AngleMode::off_grid;
        throw ConfigError("angle_mode must be on_grid or off_grid, got '" + std::string(text) + "'");
    }

    OutputFormat parse_output_format(std::string_view text)
    {
        if (text == "csv")
            return OutputFormat::csv;
        if (text == "json")
            return OutputFormat::json;
        throw ConfigError("format must be csv or json, got '" + std::string(text) + "'");
    }

    ScenarioConfig ScenarioConfig::multi_user()
    {
        return {};
    }

    ScenarioConfig ScenarioConfig::single_user()
    {
        ScenarioConfig c;
        c.users = 1;
        return c;
    }

    std::size_t ScenarioConfig::ut_antennas_of(std::size_t user) const
    {
        if (ut_antennas.size() == 1)
            return ut_antennas.front();
        return ut_antennas.at(user);
    }

    std::vector<std::size_t> ScenarioConfig::ut_antenna_list() const
    {
        std::vector<std::size_t> out(users);
        for (std::size_t k = 0; k < users; ++k)
            out[k] = ut_antennas_of(k);
        return out;
    }

    void ScenarioConfig::validate() const
    {
        auto fail = [](const std::string &what) { throw ConfigError("invalid config: " + what); };

        if (bs_antennas == 0)
            fail("bs_antennas (M) must be positive");
        if (users == 0)
            fail("users (K) must be positive");
        if (ut_antennas.empty())
            fail("ut_antennas (N_k) must not be empty");
        if (ut_antennas.size() != 1 && ut_antennas.size() != users)
            fail("ut_antennas must hold one value or one value per user");
        for (auto n : ut_antennas)
            if (n == 0)
                fail("ut_antennas (N_k) must be positive");
        if (paths == 0)
            fail("paths (N_P) must be positive");
        if (m_e == 0 || n_e == 0)
            fail("m_e and n_e must be positive");
        if (trials == 0)
            fail("trials must be at least 1");
        if (snr_db.empty())
            fail("snr_db grid must not be empty");
        for (double s : snr_db)
            if (!std::isfinite(s))
                fail("snr_db entries must be finite");

        const auto n_min = *std::min_element(ut_antennas.begin(), ut_antennas.end());
        if (n_e > n_min)
            fail("N_e = " + std::to_string(n_e) + " exceeds min N_k = " + std::to_string(n_min));
        if (users * m_e > bs_antennas)
            fail("K * M_e = " + std::to_string(users * m_e) + " exceeds M = " + std::to_string(bs_antennas));
        for (auto v : m_e_variants)
        {
            if (v == 0)
                fail("m_e_variants entries must be positive");
            if (users * v > bs_antennas)
                fail("K * M_e variant = " + std::to_string(users * v) + " exceeds M = " + std::to_string(bs_antennas));
        }
        for (auto m : overhead_bs_antennas)
            if (m == 0)
                fail("overhead_bs_antennas entries must be positive");
        if (angle_mode == AngleMode::on_grid)
        {
            const auto limit = std::min(bs_antennas, n_min);
            if (paths > limit)
                fail("on_grid angles need N_P <= min(M, N_k) = " + std::to_string(limit));
        }
    }

    AngleGrid ScenarioConfig::angle_grid() const
    {
        if (angle_mode == AngleMode::on_grid)
        {
            const auto n_min = *std::min_element(ut_antennas.begin(), ut_antennas.end());
            return OnGrid{bs_antennas, n_min};
        }
        return OffGrid{};
    }

    double noise_power_from_snr_db(double snr_db)
    {
        return std::pow(10.0, -snr_db / 10.0);
    }

    nlohmann::json to_json(const ScenarioConfig &c)
    {
        return {
            {"bs_antennas", c.bs_antennas},
            {"users", c.users},
            {"ut_antennas", c.ut_antennas},
            {"paths", c.paths},
            {"m_e", c.m_e},
            {"n_e", c.n_e},
            {"m_e_variants", c.m_e_variants},
            {"overhead_bs_antennas", c.overhead_bs_antennas},
            {"snr_db", c.snr_db},
            {"pilot_mode", std::string(to_string(c.pilot_mode))},
            {"angle_mode", std::string(to_string(c.angle_mode))},
            {"trials", c.trials},
            {"seed", c.seed},
            {"out_dir", c.out_dir},
            {"format", std::string(to_string(c.format))},
            {"workers", c.workers},
        };
    }

    namespace
    {
        /// Non-negative integer field; rejects negative, fractional and
        /// non-numeric values instead of letting them wrap.
        std::size_t count_of(const std::string &key, const nlohmann::json &value)
        {
            if (!value.is_number_integer() || value.get<std::int64_t>() < 0)
                throw ConfigError("config key '" + key + "' must be a non-negative integer");
            return value.get<std::size_t>();
        }

        std::vector<std::size_t> counts_of(const std::string &key, const nlohmann::json &value)
        {
            if (!value.is_array())
                throw ConfigError("config key '" + key + "' must be an array of non-negative integers");
            std::vector<std::size_t> out;
            for (const auto &v : value)
                out.push_back(count_of(key, v));
            return out;
        }
    }

    ScenarioConfig apply_json(ScenarioConfig c, const nlohmann::json &doc)
    {
        if (!doc.is_object())
            throw ConfigError("config document must be a JSON object");
        try
        {
            for (const auto &[key, value] : doc.items())
            {
                if (key == "bs_antennas")
                    c.bs_antennas = count_of(key, value);
                else if (key == "users")
                    c.users = count_of(key, value);
                else if (key == "ut_antennas")
                    c.ut_antennas = value.is_array() ? counts_of(key, value)
                                                     : std::vector<std::size_t>{count_of(key, value)};
                else if (key == "paths")
                    c.paths = count_of(key, value);
                else if (key == "m_e")
                    c.m_e = count_of(key, value);
                else if (key == "n_e")
                    c.n_e = count_of(key, value);
                else if (key == "m_e_variants")
                    c.m_e_variants = counts_of(key, value);
                else if (key == "overhead_bs_antennas")
                    c.overhead_bs_antennas = counts_of(key, value);
                else if (key == "snr_db")
                    c.snr_db = value.get<std::vector<double>>();
                else if (key == "pilot_mode")
                    c.pilot_mode = parse_pilot_mode(value.get<std::string>());
                else if (key == "angle_mode")
                    c.angle_mode = parse_angle_mode(value.get<std::string>());
                else if (key == "trials")
                    c.trials = count_of(key, value);
                else if (key == "seed")
                    {
                    if (!value.is_number_integer() || (!value.is_number_unsigned() && value.get<std::int64_t>() < 0))
                        throw ConfigError("config key 'seed' must be a non-negative integer");
                    c.seed = value.get<std::uint64_t>();
                }
                else if (key == "out_dir")
                    c.out_dir = value.get<std::string>();
                else if (key == "format")
                    c.format = parse_output_format(value.get<std::string>());
                else if (key == "workers")
                    c.workers = count_of(key, value);
                else
                    throw ConfigError("unknown config key '" + key + "'");
            }
        }
        catch (const nlohmann::json::exception &e)
        {
            throw ConfigError(std::string("config value has the wrong type: ") + e.what());
        }
        catch (const ConfigError &)
        {
            throw;
        }
        catch (const std::invalid_argument &e)
        {
            throw ConfigError(e.what());
        }
        return c;
    }

    std::string config_hash(const ScenarioConfig &config)
    {
        // Only fields that influence the numbers take part.
        ScenarioConfig normalized = config;
        normalized.out_dir.clear();
        normalized.format = OutputFormat::csv;
        normalized.workers = 0;
        const std::string text = to_json(normalized).dump();
        std::uint64_t h = 0xcbf29ce484222325ULL;
        for (unsigned char ch : text)
        {
            h ^= ch;
            h *= 0x100000001b3ULL;
        }
        char buf[17];
        std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
        return buf;
    }
}
