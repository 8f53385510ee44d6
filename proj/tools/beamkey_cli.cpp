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

// beamkey command-line tool: runs the rate, beam-gain and overhead
// experiments and the validation suite.
//
// Exit codes: 0 success, 1 invalid configuration, 2 validation failure,
// 3 numerical failure.

#include "beamkey/experiments.hpp"
#include "beamkey/serialization.hpp"
#include "beamkey/validation.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <functional>
#include <iostream>
#include <optional>

namespace
{
    using namespace beamkey;

    enum ExitCode
    {
        ok = 0,
        invalid_config = 1,
        validation_failure = 2,
        numerical_failure = 3
    };

    /// Values given on the command line; unset ones keep the config value.
    struct Overrides
    {
        std::string config_path;
        std::optional<std::uint64_t> seed;
        std::optional<std::size_t> trials, bs_antennas, users, paths, m_e, n_e, workers;
        std::vector<std::size_t> ut_antennas, m_e_variants, overhead_bs_antennas;
        std::vector<double> snr_db;
        std::optional<std::string> out, format, pilot_mode, angle_mode;
    };

    void add_common(CLI::App &cmd, Overrides &o)
    {
        cmd.add_option("--config", o.config_path, "JSON scenario file");
        cmd.add_option("--seed", o.seed, "master seed (u64)");
        cmd.add_option("--trials", o.trials, "Monte Carlo trials");
        cmd.add_option("--snr-db", o.snr_db, "SNR grid in dB, comma separated")->delimiter(',');
        cmd.add_option("--out", o.out, "output directory");
        cmd.add_option("--format", o.format, "csv or json");
    }

    void add_scenario(CLI::App &cmd, Overrides &o)
    {
        add_common(cmd, o);
        cmd.add_option("--bs-antennas", o.bs_antennas, "M");
        cmd.add_option("--users", o.users, "K");
        cmd.add_option("--ut-antennas", o.ut_antennas, "N_k, one value or one per user")->delimiter(',');
        cmd.add_option("--paths", o.paths, "N_P");
        cmd.add_option("--m-e", o.m_e, "M_e");
        cmd.add_option("--n-e", o.n_e, "N_e");
        cmd.add_option("--m-e-variants", o.m_e_variants, "M_e values swept by the rate experiments")->delimiter(',');
        cmd.add_option("--overhead-bs-antennas", o.overhead_bs_antennas, "M values of the overhead table")
            ->delimiter(',');
        cmd.add_option("--pilot-mode", o.pilot_mode, "reused, orthogonal or orthogonal_reduced");
        cmd.add_option("--angle-mode", o.angle_mode, "on_grid or off_grid");
        cmd.add_option("--workers", o.workers, "worker threads (0: all cores)");
    }

    nlohmann::json read_config_file(const std::string &path)
    {
        std::ifstream in(path);
        if (!in)
            throw ConfigError("cannot read config file '" + path + "'");
        try
        {
            return nlohmann::json::parse(in);
        }
        catch (const nlohmann::json::parse_error &e)
        {
            throw ConfigError("config file '" + path + "' is not valid JSON: " + e.what());
        }
    }

    std::uint64_t non_negative(const std::string &key, const nlohmann::json &value)
    {
        if (!value.is_number_integer() || (!value.is_number_unsigned() && value.get<std::int64_t>() < 0))
            throw ConfigError("validate config key '" + key + "' must be a non-negative integer");
        return value.get<std::uint64_t>();
    }

    ScenarioConfig resolve(ScenarioConfig c, const Overrides &o)
    {
        if (!o.config_path.empty())
            c = apply_json(c, read_config_file(o.config_path));
        if (o.seed)
            c.seed = *o.seed;
        if (o.trials)
            c.trials = *o.trials;
        if (!o.snr_db.empty())
            c.snr_db = o.snr_db;
        if (o.out)
            c.out_dir = *o.out;
        if (o.format)
            c.format = parse_output_format(*o.format);
        if (o.bs_antennas)
            c.bs_antennas = *o.bs_antennas;
        if (o.users)
            c.users = *o.users;
        if (!o.ut_antennas.empty())
            c.ut_antennas = o.ut_antennas;
        if (o.paths)
            c.paths = *o.paths;
        if (o.m_e)
            c.m_e = *o.m_e;
        if (o.n_e)
            c.n_e = *o.n_e;
        if (!o.m_e_variants.empty())
            c.m_e_variants = o.m_e_variants;
        if (!o.overhead_bs_antennas.empty())
            c.overhead_bs_antennas = o.overhead_bs_antennas;
        if (o.pilot_mode)
        {
            try
            {
                c.pilot_mode = parse_pilot_mode(*o.pilot_mode);
            }
            catch (const std::invalid_argument &e)
            {
                throw ConfigError(e.what());
            }
        }
        if (o.angle_mode)
            c.angle_mode = parse_angle_mode(*o.angle_mode);
        if (o.workers)
            c.workers = *o.workers;
        c.validate();
        return c;
    }

    int run_experiment(const ScenarioConfig &defaults, const Overrides &o,
                       const std::function<ExperimentResult(const ScenarioConfig &)> &experiment)
    {
        const ScenarioConfig config = resolve(defaults, o);
        const ExperimentResult result = experiment(config);
        for (const auto &path : write_result(result, config.out_dir))
            std::cout << path.string() << '\n';
        return ok;
    }
}

int main(int argc, char **argv)
{
    CLI::App app{"beamkey: beam-domain secret key generation experiments"};
    app.set_version_flag("--version", beamkey::version());
    app.require_subcommand(1);

    Overrides single, gains, overhead, multi;
    auto *single_cmd = app.add_subcommand("single-user-rate", "secret key rate of one user versus SNR");
    add_scenario(*single_cmd, single);
    auto *gains_cmd = app.add_subcommand("beam-gains", "per-user beam gain profile and adjacent-user attenuation");
    add_scenario(*gains_cmd, gains);
    auto *overhead_cmd = app.add_subcommand("overhead", "pilot overhead of traditional and reused probing");
    add_scenario(*overhead_cmd, overhead);
    auto *multi_cmd = app.add_subcommand("multiuser-unit-rate", "unit secret key rate versus SNR");
    add_scenario(*multi_cmd, multi);

    ValidationOptions vopts;
    std::optional<std::string> report_out;
    std::string report_format = "csv";
    std::vector<double> validate_snr;
    auto *validate_cmd = app.add_subcommand("validate", "run the property suite");
    std::string validate_config;
    auto *v_seed = validate_cmd->add_option("--seed", vopts.seed, "master seed (u64)");
    auto *v_instances =
        validate_cmd->add_option("--trials,--instances", vopts.instances, "random instances for the rate properties");
    auto *v_noise = validate_cmd->add_option("--noise-power", vopts.noise_powers, "noise powers for the rate properties")
                        ->delimiter(',');
    validate_cmd->add_option("--snr-db", validate_snr, "alternative to --noise-power, in dB")->delimiter(',');
    auto *v_rounds = validate_cmd->add_option("--rounds", vopts.covariance_rounds, "Monte Carlo probing rounds");
    validate_cmd->add_flag("--corrupt-sampling-matrix", vopts.corrupt_sampling_matrix,
                           "fault injection: perturb the sampling matrix in the unitarity check");
    validate_cmd->add_option("--out", report_out, "directory for validation_report.json");
    validate_cmd->add_option("--format", report_format, "csv or json (the report file is always JSON)");
    validate_cmd->add_option("--config", validate_config,
                             "JSON with optional seed, instances, noise_powers, rounds; flags take precedence");

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError &e)
    {
        const int code = app.exit(e);
        return code == 0 ? ok : invalid_config;
    }

    try
    {
        if (*single_cmd)
            return run_experiment(ScenarioConfig::single_user(), single, run_single_user_rate);
        if (*gains_cmd)
            return run_experiment(ScenarioConfig::multi_user(), gains, run_beam_gain_profile);
        if (*overhead_cmd)
            return run_experiment(ScenarioConfig::multi_user(), overhead, run_overhead_comparison);
        if (*multi_cmd)
            return run_experiment(ScenarioConfig::multi_user(), multi, run_multiuser_unit_rate);
        if (*validate_cmd)
        {
            parse_output_format(report_format);
            if (!validate_config.empty())
            {
                const auto doc = read_config_file(validate_config);
                if (!doc.is_object())
                    throw ConfigError("config document must be a JSON object");
                try
                {
                    for (const auto &[key, value] : doc.items())
                    {
                        if (key == "seed")
                        {
                            if (v_seed->count() == 0)
                                vopts.seed = non_negative(key, value);
                        }
                        else if (key == "instances")
                        {
                            if (v_instances->count() == 0)
                                vopts.instances = non_negative(key, value);
                        }
                        else if (key == "noise_powers")
                        {
                            if (v_noise->count() == 0)
                                vopts.noise_powers = value.get<std::vector<double>>();
                        }
                        else if (key == "rounds")
                        {
                            if (v_rounds->count() == 0)
                                vopts.covariance_rounds = non_negative(key, value);
                        }
                        else
                            throw ConfigError("unknown validate config key '" + key + "'");
                    }
                }
                catch (const nlohmann::json::exception &e)
                {
                    throw ConfigError(std::string("config value has the wrong type: ") + e.what());
                }
            }
            if (vopts.instances == 0)
                throw ConfigError("invalid config: instances must be at least 1");
            if (vopts.covariance_rounds == 0)
                throw ConfigError("invalid config: rounds must be at least 1");
            if (!validate_snr.empty())
            {
                vopts.noise_powers.clear();
                for (double s : validate_snr)
                    vopts.noise_powers.push_back(noise_power_from_snr_db(s));
            }
            for (double s2 : vopts.noise_powers)
                if (!(s2 >= 0.0) || !std::isfinite(s2))
                    throw ConfigError("invalid config: noise powers must be finite and nonnegative");
            const ValidationReport report = run_validation_suite(vopts);
            write_report(std::cout, report);
            if (report_out)
            {
                std::filesystem::create_directories(*report_out);
                std::ofstream os(std::filesystem::path(*report_out) / "validation_report.json");
                os << report_to_json(report).dump(2) << '\n';
            }
            return report.passed() ? ok : validation_failure;
        }
    }
    catch (const ConfigError &e)
    {
        std::cerr << "beamkey: " << e.what() << '\n';
        return invalid_config;
    }
    catch (const NumericalError &e)
    {
        std::cerr << "beamkey: numerical failure: " << e.what() << '\n';
        return numerical_failure;
    }
    catch (const std::invalid_argument &e)
    {
        std::cerr << "beamkey: invalid input: " << e.what() << '\n';
        return invalid_config;
    }
    catch (const std::exception &e)
    {
        std::cerr << "beamkey: " << e.what() << '\n';
        return invalid_config;
    }
    return ok;
}
