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

#include "beamkey/experiments.hpp"
#include "beamkey/validation.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace beamkey
{
    /// {"paths": [{"gain": [re, im], "aoa": rad, "aod": rad, "power": p}, ...]}
    nlohmann::json path_set_to_json(const PathSet &paths);
    PathSet path_set_from_json(const nlohmann::json &doc);

    /// {"users": [{"bs_beams": [...], "ut_beams": [...], "bs_gains": [...],
    /// "ut_gains": [...]}]}; gains are the covariance diagonals at the
    /// allocated beams, in allocation order.
    nlohmann::json allocation_to_json(const BeamAllocation &allocation, std::span<const BeamCovariances> covariances);

    nlohmann::json report_to_json(const ValidationReport &report);

    /// Full result as one JSON document: tool, version, config, config
    /// hash and every table.
    nlohmann::json result_to_json(const ExperimentResult &result);

    /// CSV text of each table of a result, keyed by file name. Tables with
    /// no rows are omitted. Numbers use %.17g.
    std::vector<std::pair<std::string, std::string>> result_to_csv(const ExperimentResult &result);

    /// Writes the result under `dir` in config.format: CSV tables plus
    /// <experiment>_meta.json, or a single <experiment>.json. Creates `dir`.
    /// Returns the written paths.
    std::vector<std::filesystem::path> write_result(const ExperimentResult &result, const std::filesystem::path &dir);

    /// printf("%.17g")
    std::string format_double(double value);
}
