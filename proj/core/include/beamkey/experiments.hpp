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

#include "beamkey/config.hpp"
#include "beamkey/key_rate.hpp"

#include <functional>
#include <string>
#include <vector>

namespace beamkey
{
    /// One point of a rate curve, averaged over trials. Rates are bits per
    /// probing round.
    struct CurvePoint
    {
        std::string curve;
        double snr_db = 0.0;
        double noise_power = 0.0;
        std::vector<double> user_rates;
        double sum_rate = 0.0;
        double unit_rate = 0.0;
        std::size_t overhead = 0;
        double max_residual = 0.0; // mean over trials of the largest cross-user neutralization residual
    };

    struct BeamGainRow
    {
        std::size_t user = 0;
        std::size_t beam = 0;
        double gain = 0.0; // [R~_BS,k]_{m,m}
    };

    struct CaptureRow
    {
        std::size_t trial = 0;
        std::size_t user = 0;
        double fraction = 0.0;    // share of trace(R~_BS,k) in the user's top M_e beams
        std::size_t support = 0;  // beams with gain above 1e-10 * trace
        std::size_t peak_beam = 0;
    };

    struct AttenuationRow
    {
        std::size_t trial = 0;
        std::size_t user = 0;
        std::size_t neighbor = 0;
        double attenuation_db = 0.0; // own peak gain over own gain at the neighbor's peak beam
    };

    struct OverheadRow
    {
        std::size_t bs_antennas = 0;
        std::size_t users = 0;
        std::size_t traditional = 0; // T_TA
        std::size_t reused = 0;      // T_PA
    };

    struct ExperimentResult
    {
        std::string experiment;
        ScenarioConfig config;
        std::vector<CurvePoint> curves;
        std::vector<BeamGainRow> beam_gains;
        std::vector<CaptureRow> captures;
        std::vector<AttenuationRow> attenuations;
        std::vector<OverheadRow> overheads;
        bool jittered = false;

        /// Points of one curve, in SNR order.
        std::vector<CurvePoint> curve(const std::string &name) const;
    };

    /// Curve labels used by the rate experiments.
    namespace curves
    {
        inline constexpr const char *perfect = "perfect";
        inline constexpr const char *orthogonal = "orthogonal";
        std::string designed(std::size_t m_e);
        std::string reused(std::size_t m_e);
    }

    /// Single-user rate versus SNR for perfect CSI (M_e = M, N_e = N_k) and
    /// for each designed M_e in config.m_e_variants. Requires K = 1.
    ExperimentResult run_single_user_rate(const ScenarioConfig &config);

    /// Per-user diag(R~_BS,k) profile (first trial), top-M_e capture per user
    /// and the attenuation between users with adjacent beam blocks.
    ExperimentResult run_beam_gain_profile(const ScenarioConfig &config);

    /// Median of all attenuation rows, 0 when there are none.
    double median_attenuation_db(const ExperimentResult &result);

    /// T_TA and T_PA for K = 0..config.users and every M in
    /// config.overhead_bs_antennas (plus config.bs_antennas).
    ExperimentResult run_overhead_comparison(const ScenarioConfig &config);

    /// Unit secret key rate versus SNR for reused pilots at each M_e in
    /// config.m_e_variants and for the full-dimension orthogonal baseline.
    /// Requires K >= 2.
    ExperimentResult run_multiuser_unit_rate(const ScenarioConfig &config);

    /// Rates of one single-user trial for every curve and SNR point,
    /// indexed [curve][snr]. Curve order: perfect, then m_e_variants.
    std::vector<std::vector<double>> single_user_trial_rates(const BeamCovariances &covariance,
                                                             const ScenarioConfig &config);

    /// Run fn(i) for i in [0, count) on `workers` threads (0: hardware
    /// concurrency). fn must only touch per-index state. The first exception
    /// is rethrown after all workers stop.
    void parallel_for(std::size_t count, std::size_t workers, const std::function<void(std::size_t)> &fn);
}
