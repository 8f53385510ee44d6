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

#include "beamkey/beam_allocation.hpp"

#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

namespace beamkey
{
    /// reused: every user sends the same pilots, T_D = M_e, T_U = N_e.
    /// orthogonal: full-dimension probing; one broadcast downlink pilot of
    ///   length M and user-orthogonal uplink pilots, T_D = M, T_U = sum N_k.
    /// orthogonal_reduced: reduced-dimension pilots made mutually orthogonal,
    ///   T_D = K M_e, T_U = K N_e.
    enum class PilotMode
    {
        reused,
        orthogonal,
        orthogonal_reduced
    };

    std::string_view to_string(PilotMode mode);
    PilotMode parse_pilot_mode(std::string_view text);

    /// True when user k's estimate sees the pilots of other users.
    inline bool pilots_interfere(PilotMode mode) { return mode == PilotMode::reused; }

    struct PilotSet
    {
        PilotMode mode = PilotMode::reused;
        std::vector<CMatrix> downlink; // per user, rows x T_D, row-orthonormal
        std::vector<CMatrix> uplink;   // per user, rows x T_U, row-orthonormal
        std::size_t t_d = 0;
        std::size_t t_u = 0;
    };

    /// Pilots are rows of identity matrices. In orthogonal mode the downlink
    /// rows are M (full dimension) and the uplink rows are N_k per user;
    /// m_e and n_e are ignored there.
    PilotSet make_pilots(PilotMode mode, std::size_t m_e, std::size_t n_e, std::size_t bs_antennas,
                         std::span<const std::size_t> ut_antennas);

    /// Z_k^DL = C_k^H H_k X_k (S_k^DL)^H + C_k^H N_k (S_k^DL)^H with
    /// X_k = sum_k' P_k' S_k'^DL. In orthogonal mode the BS broadcasts one
    /// full-dimension pilot, so X_k = P_k S_k^DL.
    std::vector<CMatrix> downlink_probe(std::span<const CMatrix> channels, const BeamAllocation &allocation,
                                        const PilotSet &pilots, double noise_power, Rng &rng);

    /// Z_k^UL = P_k^T (sum_k' H_k'^T C_k'^* S_k'^UL + N) (S_k^UL)^H, one shared
    /// receiver noise matrix N at the BS.
    std::vector<CMatrix> uplink_probe(std::span<const CMatrix> channels, const BeamAllocation &allocation,
                                      const PilotSet &pilots, double noise_power, Rng &rng);

    struct ProbingObservation
    {
        CVector z_dl; // vec(Z^DL)
        CVector z_ul; // vec((Z^UL)^T)
        double noise_power = 0.0;
    };

    ProbingObservation vectorize_observations(const CMatrix &z_dl, const CMatrix &z_ul, double noise_power);

    /// (M N_k) / (m_e n_e)
    double dimension_reduction_factor(std::size_t bs_antennas, std::size_t ut_antennas, std::size_t m_e,
                                      std::size_t n_e);

    /// One row per element: user, index, re(z_dl), im(z_dl), re(z_ul), im(z_ul).
    void write_observations_csv(std::ostream &os, std::span<const ProbingObservation> observations);
}
