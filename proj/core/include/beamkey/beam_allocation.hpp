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

#include <cstddef>
#include <span>
#include <vector>

namespace beamkey
{
    /// Beam indices, strongest first.
    using BeamSet = std::vector<std::size_t>;

    /// Indices sorted by descending value, ties broken by ascending index.
    BeamSet rank_beams(std::span<const double> diagonal);
    BeamSet rank_beams(const RVector &diagonal);

    /// Strategy for resolving BS beam conflicts between users.
    class BsAllocationPolicy
    {
    public:
        virtual ~BsAllocationPolicy() = default;

        /// rankings[k] is user k's full beam ranking. Must return pairwise
        /// disjoint sets of m_e beams each.
        virtual std::vector<BeamSet> allocate(std::span<const BeamSet> rankings, std::size_t m_e) const = 0;
    };

    /// One beam per user per round in fixed user order; each user claims its
    /// best beam not yet taken.
    class GreedyRoundRobin final : public BsAllocationPolicy
    {
    public:
        std::vector<BeamSet> allocate(std::span<const BeamSet> rankings, std::size_t m_e) const override;
    };

    /// Disjoint BS beam sets of size m_e from each user's diag(R~_BS).
    /// Throws std::invalid_argument when K * m_e > M or the diagonals are
    /// inconsistent.
    std::vector<BeamSet> allocate_bs_beams(std::span<const RVector> diagonals, std::size_t m_e,
                                           const BsAllocationPolicy &policy = GreedyRoundRobin{});

    /// The n_e strongest receive beams of one user.
    BeamSet allocate_ut_beams(const RVector &diagonal, std::size_t n_e);

    struct UserBeams
    {
        BeamSet bs_beams;
        BeamSet ut_beams;
        CMatrix precoder_beam; // P~_k = [e_m], M x M_e
        CMatrix combiner_beam; // C~_k = [e_n], N_k x N_e
        CMatrix precoder;      // P_k = A_BS P~_k
        CMatrix combiner;      // C_k = A_UT,k C~_k
    };

    struct BeamAllocation
    {
        std::vector<UserBeams> users;

        std::size_t user_count() const { return users.size(); }
    };

    /// Selection matrix with columns e_i for i in indices (in order).
    CMatrix selection_matrix(std::size_t dimension, const BeamSet &indices);

    BeamAllocation build_matrices(std::span<const BeamSet> bs_sets, std::span<const BeamSet> ut_sets,
                                  const CMatrix &a_bs, std::span<const CMatrix> a_ut);

    /// || (P~_k^T (x) C~_k'^H) Lambda_k' ||_F
    double neutralization_residual(const CMatrix &precoder_beam_k, const CMatrix &combiner_beam_other,
                                   const CMatrix &lambda_other);

    /// Full beam allocation from per-user covariances: rank, allocate disjoint
    /// BS beams, pick UT beams, build P_k and C_k.
    BeamAllocation allocate_beams(std::span<const BeamCovariances> covariances, std::size_t m_e, std::size_t n_e,
                                  const CMatrix &a_bs, std::span<const CMatrix> a_ut,
                                  const BsAllocationPolicy &policy = GreedyRoundRobin{});

    /// Every user gets the full sampling matrices (M_e = M, N_e = N_k).
    BeamAllocation full_dimension_allocation(const CMatrix &a_bs, std::span<const CMatrix> a_ut);
}
