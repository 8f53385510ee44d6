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

#include "beamkey/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numeric>
#include <set>
#include <thread>

namespace beamkey
{
    namespace
    {
        /// Channel statistics of one trial, shared by every curve.
        struct TrialScene
        {
            std::vector<BeamCovariances> covariances;
        };

        struct Arrays
        {
            CMatrix a_bs;
            std::vector<CMatrix> a_ut;
        };

        Arrays make_arrays(const ScenarioConfig &config)
        {
            Arrays a;
            a.a_bs = sampling_matrix(ArrayGeometry{config.bs_antennas});
            for (std::size_t k = 0; k < config.users; ++k)
                a.a_ut.push_back(sampling_matrix(ArrayGeometry{config.ut_antennas_of(k)}));
            return a;
        }

        /// Path draws of trial t: one PathSet per user, drawn in user order
        /// from the trial's own stream.
        TrialScene draw_scene(const ScenarioConfig &config, std::size_t trial)
        {
            Rng rng = make_rng(derive_seed(config.seed, streams::paths, trial));
            const AngleGrid grid = config.angle_grid();
            const ArrayGeometry bs{config.bs_antennas};
            TrialScene scene;
            for (std::size_t k = 0; k < config.users; ++k)
            {
                const PathSet paths = sample_paths(config.paths, rng, grid);
                scene.covariances.push_back(
                    beam_covariances(paths, bs, ArrayGeometry{config.ut_antennas_of(k)}, AnalyticCovariance{}));
            }
            return scene;
        }

        std::vector<double> noise_grid(const ScenarioConfig &config)
        {
            std::vector<double> out;
            for (double snr : config.snr_db)
                out.push_back(noise_power_from_snr_db(snr));
            return out;
        }

        void require_users(const ScenarioConfig &config, bool single, const char *experiment)
        {
            if (single && config.users != 1)
                throw ConfigError(std::string("invalid config: ") + experiment + " requires K = 1");
            if (!single && config.users < 2)
                throw ConfigError(std::string("invalid config: ") + experiment + " requires K >= 2");
        }

        /// Per-user rates of one allocation at every noise power, [snr][user].
        std::vector<std::vector<double>> user_rates(std::span<const BeamCovariances> covs,
                                                    BeamAllocation allocation, const PilotSet &pilots,
                                                    std::span<const double> noise_powers, bool &jittered)
        {
            const RateInputs in =
                make_rate_inputs(covs, std::move(allocation), pilots, 1.0, RootKind::low_rank_factor);
            std::vector<std::vector<double>> out(noise_powers.size(), std::vector<double>(in.user_count()));
            for (std::size_t k = 0; k < in.user_count(); ++k)
            {
                const auto rates = secret_key_rate_sweep(in, k, noise_powers);
                for (std::size_t i = 0; i < rates.size(); ++i)
                {
                    out[i][k] = rates[i].bits;
                    jittered = jittered || rates[i].jittered;
                }
            }
            return out;
        }

        /// Largest (P~_k^T (x) C~_k'^H) Lambda_k' over ordered pairs k != k'.
        double max_residual(std::span<const BeamCovariances> covs, const BeamAllocation &allocation)
        {
            double worst = 0.0;
            for (std::size_t k = 0; k < allocation.user_count(); ++k)
                for (std::size_t j = 0; j < allocation.user_count(); ++j)
                    if (j != k)
                        worst = std::max(worst, neutralization_residual_factored(
                                                    allocation.users[k].precoder_beam,
                                                    allocation.users[j].combiner_beam, covs[j].lambda_factor));
            return worst;
        }

        /// One curve of one trial: per-user rates at every SNR point.
        struct CurveTrial
        {
            std::vector<std::vector<double>> rates; // [snr][user]
            double residual = 0.0;
        };

        struct CurveSpec
        {
            std::string name;
            std::size_t overhead = 0;
        };

        /// Average trials in index order so the result does not depend on
        /// the worker schedule.
        std::vector<CurvePoint> reduce_curve(const CurveSpec &spec, const ScenarioConfig &config,
                                             const std::vector<CurveTrial> &trials)
        {
            const double n = static_cast<double>(trials.size());
            std::vector<CurvePoint> out;
            for (std::size_t i = 0; i < config.snr_db.size(); ++i)
            {
                CurvePoint p;
                p.curve = spec.name;
                p.snr_db = config.snr_db[i];
                p.noise_power = noise_power_from_snr_db(p.snr_db);
                p.overhead = spec.overhead;
                p.user_rates.assign(trials.front().rates[i].size(), 0.0);
                for (const auto &t : trials)
                {
                    for (std::size_t k = 0; k < p.user_rates.size(); ++k)
                        p.user_rates[k] += t.rates[i][k];
                    p.max_residual += t.residual;
                }
                for (auto &r : p.user_rates)
                    r /= n;
                p.max_residual /= n;
                p.sum_rate = std::accumulate(p.user_rates.begin(), p.user_rates.end(), 0.0);
                p.unit_rate = unit_skr(p.sum_rate, p.overhead);
                for (double r : p.user_rates)
                    if (!std::isfinite(r))
                        throw NumericalError("experiment produced a non-finite rate");
                out.push_back(std::move(p));
            }
            return out;
        }

        double median(std::vector<double> v)
        {
            if (v.empty())
                return 0.0;
            std::sort(v.begin(), v.end());
            const auto n = v.size();
            return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
        }
    }

    namespace curves
    {
        std::string designed(std::size_t m_e) { return "designed_me" + std::to_string(m_e); }
        std::string reused(std::size_t m_e) { return "reused_me" + std::to_string(m_e); }
    }

    std::vector<CurvePoint> ExperimentResult::curve(const std::string &name) const
    {
        std::vector<CurvePoint> out;
        for (const auto &p : curves)
            if (p.curve == name)
                out.push_back(p);
        return out;
    }

    double median_attenuation_db(const ExperimentResult &result)
    {
        std::vector<double> v;
        for (const auto &a : result.attenuations)
            v.push_back(a.attenuation_db);
        return median(v);
    }

    void parallel_for(std::size_t count, std::size_t workers, const std::function<void(std::size_t)> &fn)
    {
        if (workers == 0)
            workers = std::max(1u, std::thread::hardware_concurrency());
        workers = std::min(workers, count);
        if (workers <= 1)
        {
            for (std::size_t i = 0; i < count; ++i)
                fn(i);
            return;
        }

        std::atomic<std::size_t> next{0};
        std::atomic<bool> stop{false};
        std::exception_ptr first;
        std::mutex mutex;
        auto body = [&] {
            while (!stop.load())
            {
                const std::size_t i = next.fetch_add(1);
                if (i >= count)
                    return;
                try
                {
                    fn(i);
                }
                catch (...)
                {
                    std::lock_guard lock(mutex);
                    if (!first)
                        first = std::current_exception();
                    stop = true;
                }
            }
        };
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < workers; ++w)
            pool.emplace_back(body);
        for (auto &t : pool)
            t.join();
        if (first)
            std::rethrow_exception(first);
    }

    std::vector<std::vector<double>> single_user_trial_rates(const BeamCovariances &covariance,
                                                             const ScenarioConfig &config)
    {
        const Arrays arrays = make_arrays(config);
        const std::vector<BeamCovariances> covs{covariance};
        const auto noise = noise_grid(config);
        const auto ut = config.ut_antenna_list();
        bool jittered = false;

        std::vector<std::vector<double>> out;
        auto flatten = [&](const std::vector<std::vector<double>> &rates) {
            std::vector<double> row;
            for (const auto &r : rates)
                row.push_back(r.front());
            out.push_back(std::move(row));
        };

        const PilotSet full = make_pilots(PilotMode::orthogonal, config.bs_antennas, ut.front(), config.bs_antennas, ut);
        flatten(user_rates(covs, full_dimension_allocation(arrays.a_bs, arrays.a_ut), full, noise, jittered));
        for (auto m : config.m_e_variants)
        {
            const PilotSet pilots = make_pilots(PilotMode::reused, m, config.n_e, config.bs_antennas, ut);
            flatten(user_rates(covs, allocate_beams(covs, m, config.n_e, arrays.a_bs, arrays.a_ut), pilots, noise,
                               jittered));
        }
        return out;
    }

    ExperimentResult run_single_user_rate(const ScenarioConfig &config)
    {
        config.validate();
        require_users(config, true, "single-user-rate");

        std::vector<std::vector<std::vector<double>>> per_trial(config.trials);
        parallel_for(config.trials, config.workers, [&](std::size_t t) {
            const TrialScene scene = draw_scene(config, t);
            per_trial[t] = single_user_trial_rates(scene.covariances.front(), config);
        });

        ExperimentResult result;
        result.experiment = "single-user-rate";
        result.config = config;
        const auto ut = config.ut_antenna_list();

        std::vector<CurveSpec> specs;
        specs.push_back({curves::perfect, pilot_overhead(PilotMode::orthogonal, config.bs_antennas, ut, 0, 0)});
        for (auto m : config.m_e_variants)
            specs.push_back({curves::designed(m), pilot_overhead(PilotMode::reused, config.bs_antennas, ut, m, config.n_e)});

        for (std::size_t c = 0; c < specs.size(); ++c)
        {
            std::vector<CurveTrial> trials(config.trials);
            for (std::size_t t = 0; t < config.trials; ++t)
                for (double r : per_trial[t][c])
                    trials[t].rates.push_back({r});
            for (auto &p : reduce_curve(specs[c], config, trials))
                result.curves.push_back(std::move(p));
        }
        return result;
    }

    ExperimentResult run_beam_gain_profile(const ScenarioConfig &config)
    {
        config.validate();

        struct TrialOut
        {
            std::vector<RVector> diagonals;
            std::vector<CaptureRow> captures;
            std::vector<AttenuationRow> attenuations;
        };
        std::vector<TrialOut> per_trial(config.trials);

        parallel_for(config.trials, config.workers, [&](std::size_t t) {
            const TrialScene scene = draw_scene(config, t);
            TrialOut &out = per_trial[t];
            std::vector<std::size_t> peaks;
            for (std::size_t k = 0; k < config.users; ++k)
            {
                const RVector d = scene.covariances[k].r_bs.diagonal().real().cwiseMax(0.0);
                const BeamSet ranked = rank_beams(d);
                const double total = d.sum();
                double top = 0.0;
                for (std::size_t i = 0; i < std::min(config.m_e, ranked.size()); ++i)
                    top += d(static_cast<Eigen::Index>(ranked[i]));
                CaptureRow row;
                row.trial = t;
                row.user = k;
                row.fraction = total > 0.0 ? top / total : 0.0;
                row.support = static_cast<std::size_t>((d.array() > 1e-10 * total).count());
                row.peak_beam = ranked.front();
                out.captures.push_back(row);
                peaks.push_back(ranked.front());
                out.diagonals.push_back(d);
            }

            // Users ordered by their strongest beam; neighbours in this order
            // hold adjacent beam blocks after allocation.
            std::vector<std::size_t> order(config.users);
            std::iota(order.begin(), order.end(), std::size_t{0});
            std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return peaks[a] < peaks[b]; });
            auto attenuation = [&](std::size_t user, std::size_t neighbor) {
                const RVector &d = out.diagonals[user];
                const double peak = d(static_cast<Eigen::Index>(peaks[user]));
                const double at = std::max(d(static_cast<Eigen::Index>(peaks[neighbor])), 1e-30 * peak);
                AttenuationRow row;
                row.trial = t;
                row.user = user;
                row.neighbor = neighbor;
                row.attenuation_db = peak > 0.0 ? 10.0 * std::log10(peak / at) : 0.0;
                out.attenuations.push_back(row);
            };
            for (std::size_t i = 0; i + 1 < order.size(); ++i)
            {
                attenuation(order[i], order[i + 1]);
                attenuation(order[i + 1], order[i]);
            }
        });

        ExperimentResult result;
        result.experiment = "beam-gains";
        result.config = config;
        for (std::size_t k = 0; k < config.users; ++k)
        {
            const RVector &d = per_trial.front().diagonals[k];
            for (Eigen::Index m = 0; m < d.size(); ++m)
                result.beam_gains.push_back({k, static_cast<std::size_t>(m), d(m)});
        }
        for (auto &t : per_trial)
        {
            result.captures.insert(result.captures.end(), t.captures.begin(), t.captures.end());
            result.attenuations.insert(result.attenuations.end(), t.attenuations.begin(), t.attenuations.end());
        }
        return result;
    }

    ExperimentResult run_overhead_comparison(const ScenarioConfig &config)
    {
        config.validate();
        std::set<std::size_t> antennas(config.overhead_bs_antennas.begin(), config.overhead_bs_antennas.end());
        antennas.insert(config.bs_antennas);

        ExperimentResult result;
        result.experiment = "overhead";
        result.config = config;
        const auto all_ut = config.ut_antenna_list();
        for (auto m : antennas)
            for (std::size_t k = 0; k <= config.users; ++k)
            {
                const std::span<const std::size_t> ut(all_ut.data(), k);
                OverheadRow row;
                row.bs_antennas = m;
                row.users = k;
                row.traditional = pilot_overhead(PilotMode::orthogonal, m, ut, config.m_e, config.n_e);
                row.reused = pilot_overhead(PilotMode::reused, m, ut, config.m_e, config.n_e);
                result.overheads.push_back(row);
            }
        return result;
    }

    ExperimentResult run_multiuser_unit_rate(const ScenarioConfig &config)
    {
        config.validate();
        require_users(config, false, "multiuser-unit-rate");

        const Arrays arrays = make_arrays(config);
        const auto noise = noise_grid(config);
        const auto ut = config.ut_antenna_list();

        std::vector<CurveSpec> specs;
        for (auto m : config.m_e_variants)
            specs.push_back({curves::reused(m), pilot_overhead(PilotMode::reused, config.bs_antennas, ut, m, config.n_e)});
        specs.push_back({curves::orthogonal, pilot_overhead(PilotMode::orthogonal, config.bs_antennas, ut, 0, 0)});
        specs.push_back({"orthogonal_reduced_me" + std::to_string(config.m_e),
                         pilot_overhead(PilotMode::orthogonal_reduced, config.bs_antennas, ut, config.m_e, config.n_e)});

        std::vector<std::vector<CurveTrial>> per_curve(specs.size(), std::vector<CurveTrial>(config.trials));
        std::vector<char> jitter(config.trials, 0);

        parallel_for(config.trials, config.workers, [&](std::size_t t) {
            const TrialScene scene = draw_scene(config, t);
            const auto &covs = scene.covariances;
            bool jittered = false;
            std::size_t c = 0;
            for (auto m : config.m_e_variants)
            {
                BeamAllocation alloc = allocate_beams(covs, m, config.n_e, arrays.a_bs, arrays.a_ut);
                per_curve[c][t].residual = max_residual(covs, alloc);
                const PilotSet pilots = make_pilots(PilotMode::reused, m, config.n_e, config.bs_antennas, ut);
                per_curve[c][t].rates = user_rates(covs, std::move(alloc), pilots, noise, jittered);
                ++c;
            }
            {
                const PilotSet pilots = make_pilots(PilotMode::orthogonal, 0, 0, config.bs_antennas, ut);
                per_curve[c][t].rates = user_rates(covs, full_dimension_allocation(arrays.a_bs, arrays.a_ut), pilots,
                                                   noise, jittered);
                ++c;
            }
            {
                BeamAllocation alloc = allocate_beams(covs, config.m_e, config.n_e, arrays.a_bs, arrays.a_ut);
                per_curve[c][t].residual = max_residual(covs, alloc);
                const PilotSet pilots =
                    make_pilots(PilotMode::orthogonal_reduced, config.m_e, config.n_e, config.bs_antennas, ut);
                per_curve[c][t].rates = user_rates(covs, std::move(alloc), pilots, noise, jittered);
            }
            jitter[t] = jittered;
        });

        ExperimentResult result;
        result.experiment = "multiuser-unit-rate";
        result.config = config;
        for (std::size_t c = 0; c < specs.size(); ++c)
            for (auto &p : reduce_curve(specs[c], config, per_curve[c]))
                result.curves.push_back(std::move(p));
        result.jittered = std::any_of(jitter.begin(), jitter.end(), [](char j) { return j != 0; });
        return result;
    }
}
