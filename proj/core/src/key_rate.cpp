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

#include "beamkey/key_rate.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

namespace beamkey
{
    namespace
    {
        constexpr double negative_rate_flag = -1e-9;

        bool is_identity(const CMatrix &a)
        {
            if (a.rows() != a.cols())
                return false;
            return (a - CMatrix::Identity(a.rows(), a.cols())).cwiseAbs().maxCoeff() <= 1e-12;
        }

        /// Cholesky that also refuses numerically singular pivots.
        bool factor_hpd(const CMatrix &s, Eigen::LLT<CMatrix> &llt)
        {
            llt.compute(s);
            if (llt.info() != Eigen::Success)
                return false;
            const RVector d = llt.matrixLLT().diagonal().real();
            if (!(d.array() > 0.0).all() || !d.allFinite())
                return false;
            const double ratio = d.minCoeff() / d.maxCoeff();
            return ratio * ratio > 1e-14;
        }

        struct Solved
        {
            CMatrix x;
            bool jittered = false;
        };

        /// (W^H W + s2 noise)^{-1} rhs.
        Solved solve_regularized(const CMatrix &w, const CMatrix &noise, double s2, const CMatrix &rhs)
        {
            Eigen::LLT<CMatrix> llt;
            if (s2 > 0.0 && w.rows() < w.cols() && is_identity(noise))
            {
                // Push-through form: (s2 I + W^H W)^{-1} = (I - W^H (s2 I + W W^H)^{-1} W) / s2
                CMatrix small = w * w.adjoint();
                small.diagonal().array() += s2;
                if (factor_hpd(small, llt))
                    return {(rhs - w.adjoint() * llt.solve(w * rhs)) / s2, false};
            }

            CMatrix r = w.adjoint() * w;
            r += s2 * noise;
            r = 0.5 * (r + r.adjoint()).eval();
            if (factor_hpd(r, llt))
                return {llt.solve(rhs), false};
            if (s2 == 0.0)
                throw NumericalError("singular noise-free rate: observation covariance is rank deficient");
            r.diagonal().array() += 1e-12 * std::abs(r.trace().real());
            if (factor_hpd(r, llt))
                return {llt.solve(rhs), true};
            throw NumericalError("secret_key_rate: observation covariance factorization failed");
        }

        std::vector<std::size_t> coupled_users(const RateInputs &inputs, std::size_t user)
        {
            if (!pilots_interfere(inputs.pilot_mode))
                return {user};
            std::vector<std::size_t> all(inputs.user_count());
            std::iota(all.begin(), all.end(), std::size_t{0});
            return all;
        }

        CMatrix downlink_noise_block(const UserBeams &u)
        {
            const auto m_e = u.precoder.cols();
            return linalg::kron(CMatrix::Identity(m_e, m_e), u.combiner.adjoint() * u.combiner);
        }

        CMatrix uplink_noise_block(const UserBeams &u)
        {
            const auto n_e = u.combiner.cols();
            return linalg::kron(u.precoder.transpose() * u.precoder.conjugate(), CMatrix::Identity(n_e, n_e));
        }

        void check_user(const RateInputs &inputs, std::size_t user)
        {
            if (user >= inputs.user_count())
                throw std::invalid_argument("key rate: user index out of range");
            if (inputs.allocation.user_count() != inputs.user_count() ||
                inputs.lambda_root.size() != inputs.user_count())
                throw std::invalid_argument("key rate: per-user inputs have different lengths");
            if (!(inputs.noise_power >= 0.0) || !std::isfinite(inputs.noise_power))
                throw std::invalid_argument("key rate: noise power must be finite and nonnegative");
        }

        double to_bits(double nats) { return nats / std::numbers::ln2; }
    }

    RateInputs make_rate_inputs(std::span<const BeamCovariances> covariances, BeamAllocation allocation,
                                const PilotSet &pilots, double noise_power, RootKind root)
    {
        if (covariances.size() != allocation.user_count())
            throw std::invalid_argument("make_rate_inputs: covariance and allocation user counts differ");

        RateInputs in;
        in.allocation = std::move(allocation);
        in.pilot_mode = pilots.mode;
        in.noise_power = noise_power;
        in.t_d = pilots.t_d;
        in.t_u = pilots.t_u;
        for (const auto &c : covariances)
        {
            in.lambda.push_back(c.lambda_full);
            if (root == RootKind::low_rank_factor)
            {
                if (!c.analytic || c.lambda_factor.size() == 0)
                    throw std::invalid_argument("make_rate_inputs: low-rank roots need analytic covariances");
                in.lambda_root.push_back(c.lambda_factor.adjoint());
            }
            else
            {
                in.lambda_root.push_back(linalg::psd_sqrt(c.lambda_full));
            }
        }
        return in;
    }

    VMatrices build_v_matrices(const RateInputs &inputs, std::size_t user)
    {
        check_user(inputs, user);
        const auto &users = inputs.allocation.users;
        const auto &me = users[user];

        const auto m = me.precoder_beam.rows();
        CMatrix precoder_sum = CMatrix::Zero(m, me.precoder_beam.cols());
        for (auto k : coupled_users(inputs, user))
        {
            if (users[k].precoder_beam.rows() != m || users[k].precoder_beam.cols() != me.precoder_beam.cols())
                throw std::invalid_argument("build_v_matrices: reused pilots need equal M_e for all users");
            precoder_sum += users[k].precoder_beam;
        }

        VMatrices v;
        // (Q^T (x) C~^H)^H = Q^* (x) C~
        const CMatrix own_map = linalg::kron(precoder_sum.conjugate(), me.combiner_beam);
        if (inputs.lambda_root[user].cols() != own_map.rows())
            throw std::invalid_argument("build_v_matrices: Lambda_k does not match M N_k");
        v.own = inputs.lambda_root[user] * own_map;

        v.cross.resize(inputs.user_count());
        for (std::size_t k = 0; k < inputs.user_count(); ++k)
        {
            const CMatrix map = linalg::kron(me.precoder_beam.conjugate(), users[k].combiner_beam);
            if (inputs.lambda_root[k].cols() != map.rows())
                throw std::invalid_argument("build_v_matrices: Lambda_k' does not match M N_k'");
            v.cross[k] = inputs.lambda_root[k] * map;
        }
        return v;
    }

    ObservationCovariances assemble_observation_covariances(const RateInputs &inputs, std::size_t user)
    {
        const VMatrices v = build_v_matrices(inputs, user);
        const auto &me = inputs.allocation.users[user];
        const double s2 = inputs.noise_power;

        ObservationCovariances cov;
        cov.r_dl = v.own.adjoint() * v.own + s2 * downlink_noise_block(me);
        cov.r_ul = s2 * uplink_noise_block(me);
        for (auto k : coupled_users(inputs, user))
        {
            if (v.cross[k].cols() != cov.r_ul.cols())
                throw std::invalid_argument("assemble_observation_covariances: reused pilots need equal N_e");
            cov.r_ul.noalias() += v.cross[k].adjoint() * v.cross[k];
        }
        cov.r_cross = v.own.adjoint() * v.cross[user];

        const auto n_dl = cov.r_dl.rows();
        const auto n_ul = cov.r_ul.rows();
        cov.joint.resize(n_dl + n_ul, n_dl + n_ul);
        cov.joint.topLeftCorner(n_dl, n_dl) = cov.r_dl;
        cov.joint.topRightCorner(n_dl, n_ul) = cov.r_cross;
        cov.joint.bottomLeftCorner(n_ul, n_dl) = cov.r_cross.adjoint();
        cov.joint.bottomRightCorner(n_ul, n_ul) = cov.r_ul;
        return cov;
    }

    namespace
    {
        /// Noise-independent pieces of one user's closed-form rate.
        struct UserTerms
        {
            CMatrix own;     // V_k
            CMatrix v_kk;    // V_kk
            CMatrix stacked; // V_kk' for every coupled k', stacked by rows
            CMatrix dl_noise;
            CMatrix ul_noise;
        };

        UserTerms user_terms(const RateInputs &inputs, std::size_t user)
        {
            check_user(inputs, user);
            const VMatrices v = build_v_matrices(inputs, user);
            const auto &me = inputs.allocation.users[user];

            UserTerms t;
            const auto coupled = coupled_users(inputs, user);
            Eigen::Index rows = 0;
            for (auto k : coupled)
                rows += v.cross[k].rows();
            t.stacked.resize(rows, v.cross[user].cols());
            Eigen::Index offset = 0;
            for (auto k : coupled)
            {
                if (v.cross[k].cols() != t.stacked.cols())
                    throw std::invalid_argument("secret_key_rate: reused pilots need equal N_e");
                t.stacked.middleRows(offset, v.cross[k].rows()) = v.cross[k];
                offset += v.cross[k].rows();
            }
            t.own = v.own;
            t.v_kk = v.cross[user];
            t.dl_noise = downlink_noise_block(me);
            t.ul_noise = uplink_noise_block(me);
            return t;
        }

        KeyRate rate_from_terms(const UserTerms &t, double s2)
        {
            if (!(s2 >= 0.0) || !std::isfinite(s2))
                throw std::invalid_argument("secret_key_rate: noise power must be finite and nonnegative");

            const Solved ul = solve_regularized(t.stacked, t.ul_noise, s2, t.v_kk.adjoint());
            const Solved dl = solve_regularized(t.own, t.dl_noise, s2, t.own.adjoint());

            const CMatrix a = t.v_kk * ul.x;
            const CMatrix b = t.own * dl.x;
            const CMatrix m = CMatrix::Identity(a.rows(), a.rows()) - a * b;

            const double bits = -to_bits(linalg::log_abs_det(m));
            if (!std::isfinite(bits))
                throw NumericalError("secret_key_rate: non-finite rate");
            if (bits < negative_rate_flag)
                throw NumericalError("secret_key_rate: negative mutual information " + std::to_string(bits));
            return {std::max(bits, 0.0), ul.jittered || dl.jittered};
        }
    }

    KeyRate secret_key_rate(const RateInputs &inputs, std::size_t user)
    {
        return rate_from_terms(user_terms(inputs, user), inputs.noise_power);
    }

    std::vector<KeyRate> secret_key_rate_sweep(const RateInputs &inputs, std::size_t user,
                                               std::span<const double> noise_powers)
    {
        const UserTerms t = user_terms(inputs, user);
        std::vector<KeyRate> out;
        out.reserve(noise_powers.size());
        for (double s2 : noise_powers)
            out.push_back(rate_from_terms(t, s2));
        return out;
    }

    KeyRate gaussian_mi_oracle(const ObservationCovariances &cov)
    {
        if (cov.joint.rows() != cov.r_dl.rows() + cov.r_ul.rows())
            throw std::invalid_argument("gaussian_mi_oracle: joint matrix does not match its blocks");

        linalg::LogDet dl, ul;
        try
        {
            dl = linalg::logdet_hpd(cov.r_dl, false);
            ul = linalg::logdet_hpd(cov.r_ul, false);
        }
        catch (const NumericalError &)
        {
            throw std::invalid_argument("gaussian_mi_oracle: singular diagonal block");
        }
        const linalg::LogDet joint = linalg::logdet_hpd(cov.joint, true);

        const double bits = to_bits(dl.value + ul.value - joint.value);
        if (!std::isfinite(bits))
            throw NumericalError("gaussian_mi_oracle: non-finite mutual information");
        if (bits < negative_rate_flag)
            throw NumericalError("gaussian_mi_oracle: negative mutual information " + std::to_string(bits));
        return {std::max(bits, 0.0), joint.jittered};
    }

    KeyRate sum_secret_key_rate(const RateInputs &inputs)
    {
        KeyRate total;
        for (std::size_t k = 0; k < inputs.user_count(); ++k)
        {
            const KeyRate r = secret_key_rate(inputs, k);
            total.bits += r.bits;
            total.jittered = total.jittered || r.jittered;
        }
        return total;
    }

    std::size_t pilot_overhead(PilotMode mode, std::size_t bs_antennas, std::span<const std::size_t> ut_antennas,
                               std::size_t m_e, std::size_t n_e)
    {
        switch (mode)
        {
        case PilotMode::orthogonal:
            return bs_antennas + std::accumulate(ut_antennas.begin(), ut_antennas.end(), std::size_t{0});
        case PilotMode::reused:
            return m_e + n_e;
        case PilotMode::orthogonal_reduced:
            return ut_antennas.size() * (m_e + n_e);
        }
        return 0;
    }

    double unit_skr(double sum_rate_bits, std::size_t overhead)
    {
        if (overhead == 0)
            throw std::invalid_argument("unit_skr: pilot overhead must be at least 1");
        return sum_rate_bits / static_cast<double>(overhead);
    }

    double neutralization_residual_factored(const CMatrix &precoder_beam_k, const CMatrix &combiner_beam_other,
                                            const CMatrix &lambda_factor_other)
    {
        const CMatrix g = linalg::kron(precoder_beam_k.transpose(), combiner_beam_other.adjoint());
        if (g.cols() != lambda_factor_other.rows())
            throw std::invalid_argument("neutralization_residual_factored: dimension mismatch");
        // ||G B B^H||_F^2 = tr(X (B^H B) X^H), X = G B
        const CMatrix x = g * lambda_factor_other;
        const CMatrix gram = lambda_factor_other.adjoint() * lambda_factor_other;
        const double sq = (x * gram * x.adjoint()).trace().real();
        return std::sqrt(std::max(sq, 0.0));
    }
}
