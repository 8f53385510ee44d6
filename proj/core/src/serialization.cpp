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

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace beamkey
{
    namespace
    {
        std::string file_stem(const std::string &experiment)
        {
            std::string out = experiment;
            for (auto &c : out)
                if (c == '-')
                    c = '_';
            return out;
        }

        std::size_t max_users(const std::vector<CurvePoint> &points)
        {
            std::size_t n = 0;
            for (const auto &p : points)
                n = std::max(n, p.user_rates.size());
            return n;
        }

        nlohmann::json curve_point_json(const CurvePoint &p)
        {
            return {{"curve", p.curve},         {"snr_db", p.snr_db},       {"noise_power", p.noise_power},
                    {"user_rates", p.user_rates}, {"sum_rate", p.sum_rate},  {"unit_rate", p.unit_rate},
                    {"overhead", p.overhead},   {"max_residual", p.max_residual}};
        }

        void write_file(const std::filesystem::path &path, const std::string &text)
        {
            std::ofstream os(path, std::ios::binary);
            if (!os)
                throw std::runtime_error("cannot open " + path.string() + " for writing");
            os << text;
            if (!os)
                throw std::runtime_error("failed writing " + path.string());
        }

        nlohmann::json metadata(const ExperimentResult &result)
        {
            return {{"tool", "beamkey"},
                    {"version", version()},
                    {"experiment", result.experiment},
                    {"units", "bits per probing round"},
                    {"config", to_json(result.config)},
                    {"config_hash", config_hash(result.config)},
                    {"jittered", result.jittered}};
        }
    }

    std::string format_double(double value)
    {
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.17g", value);
        return buf;
    }

    nlohmann::json path_set_to_json(const PathSet &paths)
    {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto &p : paths.paths())
            arr.push_back({{"gain", {p.gain.real(), p.gain.imag()}}, {"aoa", p.aoa}, {"aod", p.aod}, {"power", p.power}});
        return {{"paths", arr}};
    }

    PathSet path_set_from_json(const nlohmann::json &doc)
    {
        try
        {
            std::vector<Path> paths;
            for (const auto &item : doc.at("paths"))
            {
                const auto &g = item.at("gain");
                if (!g.is_array() || g.size() != 2)
                    throw std::invalid_argument("path gain must be [re, im]");
                Path p;
                p.gain = {g[0].get<double>(), g[1].get<double>()};
                p.aoa = item.at("aoa").get<double>();
                p.aod = item.at("aod").get<double>();
                p.power = item.at("power").get<double>();
                paths.push_back(p);
            }
            return PathSet(std::move(paths));
        }
        catch (const nlohmann::json::exception &e)
        {
            throw std::invalid_argument(std::string("malformed PathSet JSON: ") + e.what());
        }
    }

    nlohmann::json allocation_to_json(const BeamAllocation &allocation, std::span<const BeamCovariances> covariances)
    {
        if (covariances.size() != allocation.user_count())
            throw std::invalid_argument("allocation_to_json: covariance and allocation user counts differ");
        nlohmann::json users = nlohmann::json::array();
        for (std::size_t k = 0; k < allocation.user_count(); ++k)
        {
            const auto &u = allocation.users[k];
            std::vector<double> bs_gains, ut_gains;
            for (auto b : u.bs_beams)
                bs_gains.push_back(covariances[k].r_bs(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(b)).real());
            for (auto b : u.ut_beams)
                ut_gains.push_back(covariances[k].r_ut(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(b)).real());
            users.push_back({{"bs_beams", u.bs_beams}, {"ut_beams", u.ut_beams}, {"bs_gains", bs_gains}, {"ut_gains", ut_gains}});
        }
        return {{"users", users}};
    }

    nlohmann::json report_to_json(const ValidationReport &report)
    {
        nlohmann::json props = nlohmann::json::array();
        for (const auto &p : report.properties)
            props.push_back({{"name", p.name},
                             {"status", std::string(to_string(p.status))},
                             {"measured", std::isfinite(p.measured) ? nlohmann::json(p.measured) : nlohmann::json("inf")},
                             {"tolerance", p.tolerance},
                             {"detail", p.detail}});
        return {{"tool", "beamkey"}, {"version", version()}, {"passed", report.passed()}, {"properties", props}};
    }

    nlohmann::json result_to_json(const ExperimentResult &result)
    {
        nlohmann::json doc = metadata(result);
        if (!result.curves.empty())
        {
            nlohmann::json arr = nlohmann::json::array();
            for (const auto &p : result.curves)
                arr.push_back(curve_point_json(p));
            doc["curves"] = arr;
        }
        if (!result.beam_gains.empty())
        {
            nlohmann::json arr = nlohmann::json::array();
            for (const auto &r : result.beam_gains)
                arr.push_back({{"user", r.user}, {"beam", r.beam}, {"gain", r.gain}});
            doc["beam_gains"] = arr;
        }
        if (!result.captures.empty())
        {
            nlohmann::json arr = nlohmann::json::array();
            for (const auto &r : result.captures)
                arr.push_back({{"trial", r.trial}, {"user", r.user}, {"fraction", r.fraction},
                               {"support", r.support}, {"peak_beam", r.peak_beam}});
            doc["captures"] = arr;
        }
        if (!result.attenuations.empty())
        {
            nlohmann::json arr = nlohmann::json::array();
            for (const auto &r : result.attenuations)
                arr.push_back({{"trial", r.trial}, {"user", r.user}, {"neighbor", r.neighbor},
                               {"attenuation_db", r.attenuation_db}});
            doc["attenuations"] = arr;
            doc["median_attenuation_db"] = median_attenuation_db(result);
        }
        if (!result.overheads.empty())
        {
            nlohmann::json arr = nlohmann::json::array();
            for (const auto &r : result.overheads)
                arr.push_back({{"bs_antennas", r.bs_antennas}, {"users", r.users},
                               {"traditional", r.traditional}, {"reused", r.reused}});
            doc["overheads"] = arr;
        }
        return doc;
    }

    std::vector<std::pair<std::string, std::string>> result_to_csv(const ExperimentResult &result)
    {
        const std::string stem = file_stem(result.experiment);
        std::vector<std::pair<std::string, std::string>> out;
        const auto d = format_double;

        if (!result.curves.empty())
        {
            std::ostringstream os;
            const auto users = max_users(result.curves);
            os << "curve,snr_db,noise_power,overhead,sum_rate_bits,unit_rate_bits,max_residual";
            for (std::size_t k = 0; k < users; ++k)
                os << ",rate_user" << k << "_bits";
            os << '\n';
            for (const auto &p : result.curves)
            {
                os << p.curve << ',' << d(p.snr_db) << ',' << d(p.noise_power) << ',' << p.overhead << ','
                   << d(p.sum_rate) << ',' << d(p.unit_rate) << ',' << d(p.max_residual);
                for (std::size_t k = 0; k < users; ++k)
                    os << ',' << (k < p.user_rates.size() ? d(p.user_rates[k]) : "");
                os << '\n';
            }
            out.emplace_back(stem + "_curves.csv", os.str());
        }
        if (!result.beam_gains.empty())
        {
            std::ostringstream os;
            os << "user,beam,gain\n";
            for (const auto &r : result.beam_gains)
                os << r.user << ',' << r.beam << ',' << d(r.gain) << '\n';
            out.emplace_back(stem + "_profile.csv", os.str());
        }
        if (!result.captures.empty())
        {
            std::ostringstream os;
            os << "trial,user,top_me_fraction,support,peak_beam\n";
            for (const auto &r : result.captures)
                os << r.trial << ',' << r.user << ',' << d(r.fraction) << ',' << r.support << ',' << r.peak_beam << '\n';
            out.emplace_back(stem + "_capture.csv", os.str());
        }
        if (!result.attenuations.empty())
        {
            std::ostringstream os;
            os << "trial,user,neighbor,attenuation_db\n";
            for (const auto &r : result.attenuations)
                os << r.trial << ',' << r.user << ',' << r.neighbor << ',' << d(r.attenuation_db) << '\n';
            out.emplace_back(stem + "_attenuation.csv", os.str());
        }
        if (!result.overheads.empty())
        {
            std::ostringstream os;
            os << "bs_antennas,users,traditional,reused\n";
            for (const auto &r : result.overheads)
                os << r.bs_antennas << ',' << r.users << ',' << r.traditional << ',' << r.reused << '\n';
            out.emplace_back(stem + ".csv", os.str());
        }
        return out;
    }

    std::vector<std::filesystem::path> write_result(const ExperimentResult &result, const std::filesystem::path &dir)
    {
        // Render everything before touching the file system.
        std::vector<std::pair<std::string, std::string>> files;
        const std::string stem = file_stem(result.experiment);
        if (result.config.format == OutputFormat::json)
        {
            files.emplace_back(stem + ".json", result_to_json(result).dump(2) + "\n");
        }
        else
        {
            files = result_to_csv(result);
            nlohmann::json meta = metadata(result);
            nlohmann::json names = nlohmann::json::array();
            for (const auto &f : files)
                names.push_back(f.first);
            meta["files"] = names;
            if (!result.attenuations.empty())
                meta["median_attenuation_db"] = median_attenuation_db(result);
            files.emplace_back(stem + "_meta.json", meta.dump(2) + "\n");
        }

        std::filesystem::create_directories(dir);
        std::vector<std::filesystem::path> written;
        for (const auto &[name, text] : files)
        {
            const auto path = dir / name;
            write_file(path, text);
            written.push_back(path);
        }
        return written;
    }
}
