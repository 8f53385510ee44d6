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

#include "beamkey/channel_model.hpp"
#include "beamkey/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <numbers>
#include <numeric>

namespace beamkey
{
    namespace
    {
        constexpr double half_pi = 0.5 * std::numbers::pi;

        bool angle_in_range(double angle)
        {
            return std::isfinite(angle) && angle >= -half_pi && angle < half_pi;
        }

        void require_half_wavelength(const ArrayGeometry &g, const char *what)
        {
            if (!g.half_wavelength())
                throw std::invalid_argument(std::string(what) +
                                            ": beam-domain operations require d/lambda = 0.5 (unitary sampling matrix)");
        }
    }

    void ArrayGeometry::validate() const
    {
        if (antenna_count == 0)
            throw std::invalid_argument("ArrayGeometry: antenna_count must be at least 1");
        if (!(spacing_ratio > 0.0) || !std::isfinite(spacing_ratio))
            throw std::invalid_argument("ArrayGeometry: spacing_ratio must be positive and finite");
    }

    PathSet::PathSet(std::vector<Path> paths) : paths_(std::move(paths))
    {
        if (paths_.empty())
            throw std::invalid_argument("PathSet: at least one path is required");
        double total = 0.0;
        for (const auto &p : paths_)
        {
            if (!angle_in_range(p.aoa) || !angle_in_range(p.aod))
                throw std::invalid_argument("PathSet: angles must lie in [-pi/2, pi/2)");
            if (!std::isfinite(p.power) || p.power < 0.0)
                throw std::invalid_argument("PathSet: path powers must be finite and nonnegative");
            if (!std::isfinite(p.gain.real()) || !std::isfinite(p.gain.imag()))
                throw std::invalid_argument("PathSet: path gains must be finite");
            total += p.power;
        }
        if (!(total > 0.0))
            throw std::invalid_argument("PathSet: total path power must be positive");
    }

    double PathSet::total_power() const
    {
        return std::accumulate(paths_.begin(), paths_.end(), 0.0,
                               [](double acc, const Path &p) { return acc + p.power; });
    }

    PathSet PathSet::with_fresh_gains(Rng &rng) const
    {
        std::vector<Path> out = paths_;
        for (auto &p : out)
            p.gain = complex_gaussian(rng, p.power);
        return PathSet(std::move(out));
    }

    CVector steering_vector(const ArrayGeometry &geometry, double angle)
    {
        geometry.validate();
        if (!std::isfinite(angle))
            throw std::invalid_argument("steering_vector: angle must be finite");
        if (std::abs(angle) > half_pi)
            throw std::invalid_argument("steering_vector: angle outside [-pi/2, pi/2]");

        const auto n = static_cast<Eigen::Index>(geometry.antenna_count);
        const double psi = 2.0 * std::numbers::pi * geometry.spacing_ratio * std::sin(angle);
        const double scale = 1.0 / std::sqrt(static_cast<double>(n));
        CVector a(n);
        for (Eigen::Index q = 0; q < n; ++q)
            a(q) = scale * std::polar(1.0, -psi * static_cast<double>(q));
        return a;
    }

    double grid_angle(std::size_t m, std::size_t n)
    {
        const double s = 2.0 * static_cast<double>(m) / static_cast<double>(n) - 1.0;
        return std::asin(std::clamp(s, -1.0, 1.0));
    }

    CMatrix sampling_matrix(const ArrayGeometry &geometry)
    {
        geometry.validate();
        if (!geometry.half_wavelength())
            std::cerr << "warning: sampling_matrix with d/lambda = " << geometry.spacing_ratio
                      << " is not unitary\n";

        const auto n = geometry.antenna_count;
        CMatrix a(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
        for (std::size_t m = 0; m < n; ++m)
            a.col(static_cast<Eigen::Index>(m)) = steering_vector(geometry, grid_angle(m, n));
        return a;
    }

    PathSet sample_paths(std::size_t n_paths, Rng &rng, const AngleGrid &grid, std::span<const double> power_profile)
    {
        if (n_paths == 0)
            throw std::invalid_argument("sample_paths: n_paths must be at least 1");

        std::vector<double> powers(n_paths, 1.0 / static_cast<double>(n_paths));
        if (!power_profile.empty())
        {
            if (power_profile.size() != n_paths)
                throw std::invalid_argument("sample_paths: power profile length differs from n_paths");
            double sum = 0.0;
            for (double p : power_profile)
            {
                if (!std::isfinite(p) || p < 0.0)
                    throw std::invalid_argument("sample_paths: power profile entries must be finite and nonnegative");
                sum += p;
            }
            if (std::abs(sum - 1.0) > 1e-9)
                throw std::invalid_argument("sample_paths: power profile must sum to 1");
            powers.assign(power_profile.begin(), power_profile.end());
        }

        std::vector<double> aod(n_paths), aoa(n_paths);
        if (const auto *on = std::get_if<OnGrid>(&grid))
        {
            if (on->bs_antennas == 0 || on->ut_antennas == 0)
                throw std::invalid_argument("sample_paths: on-grid array sizes must be positive");
            if (n_paths > std::min(on->bs_antennas, on->ut_antennas))
                throw std::invalid_argument("sample_paths: on-grid sampling needs n_paths <= min(M, N_k)");

            // Partial Fisher-Yates: first n_paths entries become a uniform draw without replacement.
            auto pick = [&](std::size_t n)
            {
                std::vector<std::size_t> idx(n);
                std::iota(idx.begin(), idx.end(), std::size_t{0});
                for (std::size_t i = 0; i < n_paths; ++i)
                {
                    std::uniform_int_distribution<std::size_t> dist(i, n - 1);
                    std::swap(idx[i], idx[dist(rng)]);
                }
                idx.resize(n_paths);
                return idx;
            };
            const auto bs_idx = pick(on->bs_antennas);
            const auto ut_idx = pick(on->ut_antennas);
            for (std::size_t p = 0; p < n_paths; ++p)
            {
                aod[p] = grid_angle(bs_idx[p], on->bs_antennas);
                aoa[p] = grid_angle(ut_idx[p], on->ut_antennas);
            }
        }
        else
        {
            std::uniform_real_distribution<double> sine(-1.0, 1.0);
            for (std::size_t p = 0; p < n_paths; ++p)
            {
                aod[p] = std::asin(sine(rng));
                aoa[p] = std::asin(sine(rng));
            }
        }

        std::vector<Path> paths(n_paths);
        for (std::size_t p = 0; p < n_paths; ++p)
        {
            paths[p].aod = aod[p];
            paths[p].aoa = aoa[p];
            paths[p].power = powers[p];
            paths[p].gain = complex_gaussian(rng, powers[p]);
        }
        return PathSet(std::move(paths));
    }

    CMatrix synthesize_channel(const PathSet &paths, const ArrayGeometry &bs, const ArrayGeometry &ut)
    {
        bs.validate();
        ut.validate();
        CMatrix h = CMatrix::Zero(static_cast<Eigen::Index>(ut.antenna_count),
                                  static_cast<Eigen::Index>(bs.antenna_count));
        for (const auto &p : paths.paths())
        {
            if (p.gain == cplx{})
                continue;
            h.noalias() += p.gain * steering_vector(ut, p.aoa) * steering_vector(bs, p.aod).adjoint();
        }
        return h;
    }

    BeamDomainChannel to_beam_domain(const CMatrix &h, const CMatrix &a_ut, const CMatrix &a_bs)
    {
        if (a_ut.rows() != a_ut.cols() || a_bs.rows() != a_bs.cols())
            throw std::invalid_argument("to_beam_domain: sampling matrices must be square");
        if (h.rows() != a_ut.rows() || h.cols() != a_bs.rows())
            throw std::invalid_argument("to_beam_domain: channel is not N_k x M for the given sampling matrices");
        if (linalg::unitarity_error(a_ut) > 1e-10 || linalg::unitarity_error(a_bs) > 1e-10)
            throw std::invalid_argument("to_beam_domain: sampling matrices must be unitary");

        return {a_ut.adjoint() * h * a_bs, a_ut, a_bs};
    }

    PathBeamImage path_beam_image(const Path &path, const CMatrix &a_bs, const CMatrix &a_ut,
                                  const ArrayGeometry &bs, const ArrayGeometry &ut)
    {
        return {a_ut.adjoint() * steering_vector(ut, path.aoa), a_bs.adjoint() * steering_vector(bs, path.aod)};
    }

    BeamCovariances beam_covariances(const PathSet &paths, const ArrayGeometry &bs, const ArrayGeometry &ut,
                                     const CovarianceMode &mode)
    {
        bs.validate();
        ut.validate();
        require_half_wavelength(bs, "beam_covariances");
        require_half_wavelength(ut, "beam_covariances");

        const CMatrix a_bs = sampling_matrix(bs);
        const CMatrix a_ut = sampling_matrix(ut);
        const auto m = a_bs.rows();
        const auto n = a_ut.rows();
        const auto np = static_cast<Eigen::Index>(paths.size());

        std::vector<PathBeamImage> images;
        images.reserve(paths.size());
        for (const auto &p : paths.paths())
            images.push_back(path_beam_image(p, a_bs, a_ut, bs, ut));

        BeamCovariances out;
        out.r_bs = CMatrix::Zero(m, m);
        out.r_ut = CMatrix::Zero(n, n);
        out.lambda_full = CMatrix::Zero(m * n, m * n);

        if (std::holds_alternative<AnalyticCovariance>(mode))
        {
            out.analytic = true;
            out.lambda_factor.resize(m * n, np);
            for (Eigen::Index p = 0; p < np; ++p)
            {
                const auto &img = images[static_cast<std::size_t>(p)];
                const double power = paths.paths()[static_cast<std::size_t>(p)].power;
                out.r_bs.noalias() += power * img.w * img.w.adjoint();
                out.r_ut.noalias() += power * img.u * img.u.adjoint();
                // vec(u w^H) = w^* (x) u
                out.lambda_factor.col(p) = std::sqrt(power) * linalg::kron(img.w.conjugate(), img.u);
            }
            out.lambda_full.noalias() = out.lambda_factor * out.lambda_factor.adjoint();
            return out;
        }

        const auto &mc = std::get<MonteCarloCovariance>(mode);
        if (mc.samples == 0)
            throw std::invalid_argument("beam_covariances: Monte Carlo mode needs at least one sample");
        out.analytic = false;
        out.sample_count = mc.samples;

        CMatrix beam(n, m);
        for (std::size_t s = 0; s < mc.samples; ++s)
        {
            Rng rng = make_rng(derive_seed(mc.seed, streams::monte_carlo, s));
            beam.setZero();
            for (std::size_t p = 0; p < paths.size(); ++p)
            {
                const cplx gain = complex_gaussian(rng, paths.paths()[p].power);
                beam.noalias() += gain * images[p].u * images[p].w.adjoint();
            }
            out.r_bs.noalias() += beam.adjoint() * beam;
            out.r_ut.noalias() += beam * beam.adjoint();
            const CVector v = linalg::vec(beam);
            out.lambda_full.selfadjointView<Eigen::Lower>().rankUpdate(v);
        }
        out.lambda_full = out.lambda_full.selfadjointView<Eigen::Lower>();
        const double inv = 1.0 / static_cast<double>(mc.samples);
        out.r_bs *= inv;
        out.r_ut *= inv;
        out.lambda_full *= inv;
        return out;
    }
}
