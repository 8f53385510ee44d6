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

#include "beamkey/probing.hpp"
#include "beamkey/linalg.hpp"

#include <cmath>
#include <numeric>
#include <ostream>
#include <string>

namespace beamkey
{
    std::string_view to_string(PilotMode mode)
    {
        switch (mode)
        {
        case PilotMode::reused:
            return "reused";
        case PilotMode::orthogonal:
            return "orthogonal";
        case PilotMode::orthogonal_reduced:
            return "orthogonal_reduced";
        }
        return "unknown";
    }

    PilotMode parse_pilot_mode(std::string_view text)
    {
        if (text == "reused")
            return PilotMode::reused;
        if (text == "orthogonal")
            return PilotMode::orthogonal;
        if (text == "orthogonal_reduced")
            return PilotMode::orthogonal_reduced;
        throw std::invalid_argument("unknown pilot mode '" + std::string(text) + "'");
    }

    namespace
    {
        CMatrix identity_rows(std::size_t first, std::size_t count, std::size_t length)
        {
            return CMatrix::Identity(static_cast<Eigen::Index>(length), static_cast<Eigen::Index>(length))
                .middleRows(static_cast<Eigen::Index>(first), static_cast<Eigen::Index>(count));
        }

        void check_probe_inputs(std::span<const CMatrix> channels, const BeamAllocation &allocation,
                                const PilotSet &pilots, double noise_power)
        {
            if (!(noise_power >= 0.0) || !std::isfinite(noise_power))
                throw std::invalid_argument("probe: noise power must be finite and nonnegative");
            const auto k = channels.size();
            if (allocation.user_count() != k || pilots.downlink.size() != k || pilots.uplink.size() != k)
                throw std::invalid_argument("probe: channels, allocation and pilots disagree on the number of users");
            for (std::size_t i = 0; i < k; ++i)
            {
                const auto &u = allocation.users[i];
                if (channels[i].rows() != u.combiner.rows() || channels[i].cols() != u.precoder.rows())
                    throw std::invalid_argument("probe: channel dimensions do not match P_k / C_k");
                if (pilots.downlink[i].rows() != u.precoder.cols() || pilots.uplink[i].rows() != u.combiner.cols())
                    throw std::invalid_argument("probe: pilot rows do not match the effective channel size");
            }
        }
    }

    PilotSet make_pilots(PilotMode mode, std::size_t m_e, std::size_t n_e, std::size_t bs_antennas,
                         std::span<const std::size_t> ut_antennas)
    {
        const std::size_t k = ut_antennas.size();
        if (k == 0)
            throw std::invalid_argument("make_pilots: no users");
        if (bs_antennas == 0)
            throw std::invalid_argument("make_pilots: M must be positive");
        for (auto n : ut_antennas)
            if (n == 0)
                throw std::invalid_argument("make_pilots: N_k must be positive");

        PilotSet out;
        out.mode = mode;
        switch (mode)
        {
        case PilotMode::reused:
            if (m_e == 0 || n_e == 0)
                throw std::invalid_argument("make_pilots: M_e and N_e must be positive");
            if (m_e > bs_antennas)
                throw std::invalid_argument("make_pilots: M_e exceeds M");
            out.t_d = m_e;
            out.t_u = n_e;
            out.downlink.assign(k, identity_rows(0, m_e, m_e));
            out.uplink.assign(k, identity_rows(0, n_e, n_e));
            break;
        case PilotMode::orthogonal:
        {
            out.t_d = bs_antennas;
            out.t_u = std::accumulate(ut_antennas.begin(), ut_antennas.end(), std::size_t{0});
            out.downlink.assign(k, identity_rows(0, bs_antennas, bs_antennas));
            std::size_t offset = 0;
            for (auto n : ut_antennas)
            {
                out.uplink.push_back(identity_rows(offset, n, out.t_u));
                offset += n;
            }
            break;
        }
        case PilotMode::orthogonal_reduced:
            if (m_e == 0 || n_e == 0)
                throw std::invalid_argument("make_pilots: M_e and N_e must be positive");
            out.t_d = k * m_e;
            out.t_u = k * n_e;
            for (std::size_t i = 0; i < k; ++i)
            {
                out.downlink.push_back(identity_rows(i * m_e, m_e, out.t_d));
                out.uplink.push_back(identity_rows(i * n_e, n_e, out.t_u));
            }
            break;
        }
        return out;
    }

    std::vector<CMatrix> downlink_probe(std::span<const CMatrix> channels, const BeamAllocation &allocation,
                                        const PilotSet &pilots, double noise_power, Rng &rng)
    {
        check_probe_inputs(channels, allocation, pilots, noise_power);
        const auto k_users = channels.size();

        CMatrix shared;
        if (pilots.mode != PilotMode::orthogonal)
        {
            shared = CMatrix::Zero(allocation.users.front().precoder.rows(),
                                   static_cast<Eigen::Index>(pilots.t_d));
            for (std::size_t k = 0; k < k_users; ++k)
                shared.noalias() += allocation.users[k].precoder * pilots.downlink[k];
        }

        std::vector<CMatrix> out;
        out.reserve(k_users);
        for (std::size_t k = 0; k < k_users; ++k)
        {
            const auto &u = allocation.users[k];
            const CMatrix &s = pilots.downlink[k];
            const CMatrix transmitted = pilots.mode == PilotMode::orthogonal ? CMatrix(u.precoder * s) : shared;
            CMatrix received = channels[k] * transmitted;
            received += complex_gaussian_matrix(rng, received.rows(), received.cols(), noise_power);
            out.push_back(u.combiner.adjoint() * received * s.adjoint());
        }
        return out;
    }

    std::vector<CMatrix> uplink_probe(std::span<const CMatrix> channels, const BeamAllocation &allocation,
                                      const PilotSet &pilots, double noise_power, Rng &rng)
    {
        check_probe_inputs(channels, allocation, pilots, noise_power);
        const auto k_users = channels.size();

        CMatrix received = CMatrix::Zero(channels.front().cols(), static_cast<Eigen::Index>(pilots.t_u));
        for (std::size_t k = 0; k < k_users; ++k)
            received.noalias() += channels[k].transpose() * allocation.users[k].combiner.conjugate() * pilots.uplink[k];
        received += complex_gaussian_matrix(rng, received.rows(), received.cols(), noise_power);

        std::vector<CMatrix> out;
        out.reserve(k_users);
        for (std::size_t k = 0; k < k_users; ++k)
            out.push_back(allocation.users[k].precoder.transpose() * received * pilots.uplink[k].adjoint());
        return out;
    }

    ProbingObservation vectorize_observations(const CMatrix &z_dl, const CMatrix &z_ul, double noise_power)
    {
        if (z_ul.rows() != z_dl.cols() || z_ul.cols() != z_dl.rows())
            throw std::invalid_argument("vectorize_observations: Z^UL must have the transposed shape of Z^DL");
        if (!z_dl.allFinite() || !z_ul.allFinite())
            throw std::invalid_argument("vectorize_observations: observations must be finite");
        return {linalg::vec(z_dl), linalg::vec(z_ul.transpose()), noise_power};
    }

    double dimension_reduction_factor(std::size_t bs_antennas, std::size_t ut_antennas, std::size_t m_e,
                                      std::size_t n_e)
    {
        if (bs_antennas == 0 || ut_antennas == 0 || m_e == 0 || n_e == 0)
            throw std::invalid_argument("dimension_reduction_factor: all dimensions must be positive");
        return static_cast<double>(bs_antennas * ut_antennas) / static_cast<double>(m_e * n_e);
    }

    void write_observations_csv(std::ostream &os, std::span<const ProbingObservation> observations)
    {
        os << "user,index,re_z_dl,im_z_dl,re_z_ul,im_z_ul\n";
        const auto old_precision = os.precision(17);
        for (std::size_t k = 0; k < observations.size(); ++k)
        {
            const auto &o = observations[k];
            for (Eigen::Index i = 0; i < o.z_dl.size(); ++i)
                os << k << ',' << i << ',' << o.z_dl(i).real() << ',' << o.z_dl(i).imag() << ','
                   << o.z_ul(i).real() << ',' << o.z_ul(i).imag() << '\n';
        }
        os.precision(old_precision);
    }
}
