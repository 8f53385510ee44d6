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
#include "beamkey/linalg.hpp"
#include "beamkey/probing.hpp"

#include <span>
#include <vector>

namespace beamkey
{
    /// How Lambda_k^{1/2} is realized inside the V matrices.
    ///
    /// hermitian_sqrt: the Hermitian PSD square root (MN x MN).
    /// low_rank_factor: B_k^H from an analytic covariance, where
    ///   Lambda_k = B_k B_k^H. Any root R with R^H R = Lambda_k yields the
    ///   same covariances and the same rate; this one has N_P rows.
    enum class RootKind
    {
        hermitian_sqrt,
        low_rank_factor
    };

    struct RateInputs
    {
        std::vector<CMatrix> lambda;      // Lambda_k, MN_k x MN_k
        std::vector<CMatrix> lambda_root; // R_k with R_k^H R_k = Lambda_k
        BeamAllocation allocation;        // P~_k, C~_k, P_k, C_k
        PilotMode pilot_mode = PilotMode::reused;
        double noise_power = 1.0;
        std::size_t t_d = 0;
        std::size_t t_u = 0;

        std::size_t user_count() const { return lambda.size(); }
    };

    RateInputs make_rate_inputs(std::span<const BeamCovariances> covariances, BeamAllocation allocation,
                                const PilotSet &pilots, double noise_power,
                                RootKind root = RootKind::hermitian_sqrt);

    struct VMatrices
    {
        CMatrix own;                // V_k = R_k (sum_k' P~_k'^T (x) C~_k^H)^H
        std::vector<CMatrix> cross; // cross[k'] = V_kk' = R_k' (P~_k^T (x) C~_k'^H)^H
    };

    /// The sum over k' in V_k runs over every user under reused pilots and
    /// over k alone otherwise.
    VMatrices build_v_matrices(const RateInputs &inputs, std::size_t user);

    struct ObservationCovariances
    {
        CMatrix r_dl;    // V_k^H V_k + s2 (I_{M_e} (x) C_k^H C_k)
        CMatrix r_ul;    // sum_k' V_kk'^H V_kk' + s2 (P_k^T P_k^* (x) I_{N_e})
        CMatrix r_cross; // V_k^H V_kk
        CMatrix joint;   // [[r_dl, r_cross], [r_cross^H, r_ul]]
    };

    ObservationCovariances assemble_observation_covariances(const RateInputs &inputs, std::size_t user);

    struct KeyRate
    {
        double bits = 0.0;
        bool jittered = false;
    };

    /// Closed-form rate of one user:
    /// -log2 det(I - V_kk R_ul^{-1} V_kk^H V_k R_dl^{-1} V_k^H).
    /// Throws std::invalid_argument for negative noise power and
    /// NumericalError("singular noise-free rate") when the noise power is 0
    /// and an inner covariance is singular.
    KeyRate secret_key_rate(const RateInputs &inputs, std::size_t user);

    /// log2 det(R_dl) + log2 det(R_ul) - log2 det(joint) for jointly Gaussian
    /// observations. Throws std::invalid_argument on singular diagonal blocks
    /// and NumericalError when the value falls below -1e-9.
    KeyRate gaussian_mi_oracle(const ObservationCovariances &cov);

    /// secret_key_rate of one user at several noise powers; the V matrices
    /// are built once.
    std::vector<KeyRate> secret_key_rate_sweep(const RateInputs &inputs, std::size_t user,
                                               std::span<const double> noise_powers);

    /// Sum of secret_key_rate over all users.
    KeyRate sum_secret_key_rate(const RateInputs &inputs);

    /// traditional (PilotMode::orthogonal): M + sum N_k.
    /// reused: m_e + n_e.
    /// orthogonal_reduced: K (m_e + n_e).
    std::size_t pilot_overhead(PilotMode mode, std::size_t bs_antennas, std::span<const std::size_t> ut_antennas,
                               std::size_t m_e, std::size_t n_e);

    double unit_skr(double sum_rate_bits, std::size_t overhead);

    /// || (P~_k^T (x) C~_k'^H) B B^H ||_F for Lambda_k' = B B^H, without
    /// forming Lambda_k'.
    double neutralization_residual_factored(const CMatrix &precoder_beam_k, const CMatrix &combiner_beam_other,
                                            const CMatrix &lambda_factor_other);
}
