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

#include "beamkey/beam_allocation.hpp"
#include "beamkey/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace beamkey
{
    BeamSet rank_beams(std::span<const double> diagonal)
    {
        BeamSet order(diagonal.size());
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return diagonal[a] > diagonal[b]; });
        return order;
    }

    BeamSet rank_beams(const RVector &diagonal)
    {
        return rank_beams(std::span<const double>(diagonal.data(), static_cast<std::size_t>(diagonal.size())));
    }

    std::vector<BeamSet> GreedyRoundRobin::allocate(std::span<const BeamSet> rankings, std::size_t m_e) const
    {
        std::vector<BeamSet> sets(rankings.size());
        if (rankings.empty())
            return sets;

        const std::size_t m = rankings.front().size();
        std::vector<bool> taken(m, false);
        std::vector<std::size_t> cursor(rankings.size(), 0);

        for (std::size_t round = 0; round < m_e; ++round)
        {
            for (std::size_t k = 0; k < rankings.size(); ++k)
            {
                const auto &rank = rankings[k];
                auto &c = cursor[k];
                while (c < rank.size() && taken[rank[c]])
                    ++c;
                if (c == rank.size())
                    throw std::logic_error("GreedyRoundRobin: ran out of beams");
                taken[rank[c]] = true;
                sets[k].push_back(rank[c]);
                ++c;
            }
        }
        return sets;
    }

    std::vector<BeamSet> allocate_bs_beams(std::span<const RVector> diagonals, std::size_t m_e,
                                           const BsAllocationPolicy &policy)
    {
        if (diagonals.empty())
            return {};
        const auto m = static_cast<std::size_t>(diagonals.front().size());
        for (const auto &d : diagonals)
        {
            if (static_cast<std::size_t>(d.size()) != m)
                throw std::invalid_argument("allocate_bs_beams: diagonals have different lengths");
            if (!d.allFinite() || (d.array() < 0.0).any())
                throw std::invalid_argument("allocate_bs_beams: diagonal entries must be finite and nonnegative");
        }
        if (diagonals.size() * m_e > m)
            throw std::invalid_argument("allocate_bs_beams: K * M_e = " + std::to_string(diagonals.size() * m_e) +
                                        " exceeds M = " + std::to_string(m) + "; non-overlapping beams impossible");

        std::vector<BeamSet> rankings;
        rankings.reserve(diagonals.size());
        for (const auto &d : diagonals)
            rankings.push_back(rank_beams(d));
        return policy.allocate(rankings, m_e);
    }

    BeamSet allocate_ut_beams(const RVector &diagonal, std::size_t n_e)
    {
        if (n_e > static_cast<std::size_t>(diagonal.size()))
            throw std::invalid_argument("allocate_ut_beams: N_e exceeds the number of UT antennas");
        if (!diagonal.allFinite() || (diagonal.array() < 0.0).any())
            throw std::invalid_argument("allocate_ut_beams: diagonal entries must be finite and nonnegative");
        BeamSet order = rank_beams(diagonal);
        order.resize(n_e);
        return order;
    }

    CMatrix selection_matrix(std::size_t dimension, const BeamSet &indices)
    {
        CMatrix s = CMatrix::Zero(static_cast<Eigen::Index>(dimension), static_cast<Eigen::Index>(indices.size()));
        for (std::size_t c = 0; c < indices.size(); ++c)
        {
            if (indices[c] >= dimension)
                throw std::invalid_argument("selection_matrix: index out of range");
            s(static_cast<Eigen::Index>(indices[c]), static_cast<Eigen::Index>(c)) = 1.0;
        }
        return s;
    }

    BeamAllocation build_matrices(std::span<const BeamSet> bs_sets, std::span<const BeamSet> ut_sets,
                                  const CMatrix &a_bs, std::span<const CMatrix> a_ut)
    {
        if (bs_sets.size() != ut_sets.size() || bs_sets.size() != a_ut.size())
            throw std::invalid_argument("build_matrices: per-user inputs have different lengths");

        const auto m = static_cast<std::size_t>(a_bs.rows());
        BeamAllocation out;
        out.users.resize(bs_sets.size());
        for (std::size_t k = 0; k < bs_sets.size(); ++k)
        {
            auto &u = out.users[k];
            u.bs_beams = bs_sets[k];
            u.ut_beams = ut_sets[k];
            u.precoder_beam = selection_matrix(m, u.bs_beams);
            u.combiner_beam = selection_matrix(static_cast<std::size_t>(a_ut[k].rows()), u.ut_beams);
            u.precoder = a_bs * u.precoder_beam;
            u.combiner = a_ut[k] * u.combiner_beam;
        }
        return out;
    }

    double neutralization_residual(const CMatrix &precoder_beam_k, const CMatrix &combiner_beam_other,
                                   const CMatrix &lambda_other)
    {
        const CMatrix g = linalg::kron(precoder_beam_k.transpose(), combiner_beam_other.adjoint());
        if (g.cols() != lambda_other.rows())
            throw std::invalid_argument("neutralization_residual: dimension mismatch");
        return (g * lambda_other).norm();
    }

    BeamAllocation allocate_beams(std::span<const BeamCovariances> covariances, std::size_t m_e, std::size_t n_e,
                                  const CMatrix &a_bs, std::span<const CMatrix> a_ut,
                                  const BsAllocationPolicy &policy)
    {
        std::vector<RVector> bs_diag;
        std::vector<BeamSet> ut_sets;
        bs_diag.reserve(covariances.size());
        ut_sets.reserve(covariances.size());
        for (const auto &c : covariances)
        {
            // Diagonals of Hermitian PSD estimates are real and nonnegative up to rounding.
            bs_diag.push_back(c.r_bs.diagonal().real().cwiseMax(0.0));
            ut_sets.push_back(allocate_ut_beams(c.r_ut.diagonal().real().cwiseMax(0.0), n_e));
        }
        const auto bs_sets = allocate_bs_beams(bs_diag, m_e, policy);
        return build_matrices(bs_sets, ut_sets, a_bs, a_ut);
    }

    BeamAllocation full_dimension_allocation(const CMatrix &a_bs, std::span<const CMatrix> a_ut)
    {
        std::vector<BeamSet> bs_sets, ut_sets;
        for (const auto &a : a_ut)
        {
            BeamSet bs(static_cast<std::size_t>(a_bs.rows()));
            std::iota(bs.begin(), bs.end(), std::size_t{0});
            BeamSet ut(static_cast<std::size_t>(a.rows()));
            std::iota(ut.begin(), ut.end(), std::size_t{0});
            bs_sets.push_back(std::move(bs));
            ut_sets.push_back(std::move(ut));
        }
        return build_matrices(bs_sets, ut_sets, a_bs, a_ut);
    }
}
