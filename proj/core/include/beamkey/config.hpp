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

#pragma once

#include "beamkey/channel_model.hpp"
#include "beamkey/probing.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace beamkey
{
    /// Invalid scenario configuration. The message names the violated rule.
    class ConfigError : public std::invalid_argument
    {
    public:
        using std::invalid_argument::invalid_argument;
    };

    enum class AngleMode
    {
        on_grid,
        off_grid
    };

    enum class OutputFormat
    {
        csv,
        json
    };

    std::string_view to_string(AngleMode mode);
    std::string_view to_string(OutputFormat format);
    AngleMode parse_angle_mode(std::string_view text);
    OutputFormat parse_output_format(std::string_view text);

    /// Simulation knobs. Defaults are the reference multi-user setup: M = 128,
    /// K = 6, N_k = 4, N_P = 6, M_e = 6, N_e = 4, half-wavelength ULAs.
    struct ScenarioConfig
    {
        std::size_t bs_antennas = 128;              // M
        std::size_t users = 6;                      // K
        std::vector<std::size_t> ut_antennas = {4}; // one entry for all users, or one per user
        std::size_t paths = 6;                      // N_P
        std::size_t m_e = 6;
        std::size_t n_e = 4;
        std::vector<std::size_t> m_e_variants = {6, 4};
        std::vector<std::size_t> overhead_bs_antennas = {64, 128, 256};
        std::vector<double> snr_db = {-10, -5, 0, 5, 10, 15, 20, 25, 30};
        PilotMode pilot_mode = PilotMode::reused;
        AngleMode angle_mode = AngleMode::off_grid;
        std::size_t trials = 100;
        std::uint64_t seed = 1;
        std::string out_dir = "results";
        OutputFormat format = OutputFormat::csv;
        std::size_t workers = 0; // 0: hardware concurrency

        static ScenarioConfig multi_user();
        static ScenarioConfig single_user();

        /// N_k of user k.
        std::size_t ut_antennas_of(std::size_t user) const;
        std::vector<std::size_t> ut_antenna_list() const;

        /// Throws ConfigError naming the first violated invariant.
        void validate() const;

        AngleGrid angle_grid() const;
    };

    /// SNR in dB to noise power for unit total path power: 10^(-snr/10).
    double noise_power_from_snr_db(double snr_db);

    nlohmann::json to_json(const ScenarioConfig &config);

    /// Overlay the fields present in `doc` onto `base`. Unknown keys are
    /// rejected with ConfigError.
    ScenarioConfig apply_json(ScenarioConfig base, const nlohmann::json &doc);

    /// FNV-1a 64 of the canonical JSON form, as 16 hex digits.
    std::string config_hash(const ScenarioConfig &config);
}
