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

#include "beamkey/common.hpp"

#include <cstddef>
#include <span>
#include <variant>
#include <vector>

namespace beamkey
{
    /// Uniform linear array. Beam-domain operations need spacing_ratio = 0.5,
    /// the only spacing for which the sampling matrix is unitary.
    struct ArrayGeometry
    {
        std::size_t antenna_count = 1;
        double spacing_ratio = 0.5; // d / lambda

        void validate() const;
        bool half_wavelength() const { return spacing_ratio == 0.5; }
    };

    struct Path
    {
        cplx gain;         // complex path gain
        double aoa = 0.0;  // radians, receive side (UT)
        double aod = 0.0;  // radians, transmit side (BS)
        double power = 0;  // E|gain|^2
    };

    /// Multipath parameterization of one BS-UT link.
    ///
    /// Angles lie in [-pi/2, pi/2). The closed lower end is the grid point
    /// sin = -1 of the sampling matrix, which on-grid sampling can hit.
    class PathSet
    {
    public:
        PathSet() = default;
        explicit PathSet(std::vector<Path> paths);

        const std::vector<Path> &paths() const { return paths_; }
        std::size_t size() const { return paths_.size(); }
        double total_power() const;

        /// Same angles and powers, gains replaced by fresh CN(0, power) draws.
        PathSet with_fresh_gains(Rng &rng) const;

    private:
        std::vector<Path> paths_;
    };

    struct OffGrid
    {
    };

    /// Draw angles from the sampling grids of a BS array with bs_antennas
    /// elements and a UT array with ut_antennas elements.
    struct OnGrid
    {
        std::size_t bs_antennas = 0;
        std::size_t ut_antennas = 0;
    };

    using AngleGrid = std::variant<OffGrid, OnGrid>;

    /// (1/sqrt(n)) [1, e^{-j psi}, ..., e^{-j(n-1) psi}], psi = 2 pi (d/lambda) sin(angle).
    CVector steering_vector(const ArrayGeometry &geometry, double angle);

    /// Grid angle of beam m for an n-element array: sin = 2m/n - 1.
    double grid_angle(std::size_t m, std::size_t n);

    /// n x n matrix whose column m is steering_vector(arcsin(2m/n - 1)).
    /// Unitary only at half-wavelength spacing; other spacings print a warning.
    CMatrix sampling_matrix(const ArrayGeometry &geometry);

    /// Random multipath draw. Off-grid angles are uniform in the sine domain;
    /// on-grid angles are distinct grid points of both arrays. An empty
    /// power_profile means equal powers 1/n_paths.
    PathSet sample_paths(std::size_t n_paths, Rng &rng, const AngleGrid &grid,
                         std::span<const double> power_profile = {});

    /// H = sum_p gain_p a_UT(aoa_p) a_BS(aod_p)^H, an N_k x M matrix.
    CMatrix synthesize_channel(const PathSet &paths, const ArrayGeometry &bs, const ArrayGeometry &ut);

    struct BeamDomainChannel
    {
        CMatrix matrix; // A_UT^H H A_BS
        CMatrix a_ut;
        CMatrix a_bs;
    };

    /// Throws std::invalid_argument on dimension mismatch or a non-unitary
    /// sampling matrix (max |A^H A - I| > 1e-10).
    BeamDomainChannel to_beam_domain(const CMatrix &h, const CMatrix &a_ut, const CMatrix &a_bs);

    struct AnalyticCovariance
    {
    };

    struct MonteCarloCovariance
    {
        std::size_t samples = 0;
        std::uint64_t seed = 0;
    };

    using CovarianceMode = std::variant<AnalyticCovariance, MonteCarloCovariance>;

    struct BeamCovariances
    {
        CMatrix r_bs;        // M x M,  E{H~^H H~}
        CMatrix r_ut;        // N x N,  E{H~ H~^H}
        CMatrix lambda_full; // MN x MN, E{vec(H~) vec(H~)^H}
        /// Analytic mode only: MN x N_P matrix B with lambda_full = B B^H,
        /// column p = sigma_p (w_p^* (x) u_p). Empty for Monte Carlo estimates.
        CMatrix lambda_factor;
        bool analytic = true;
        std::size_t sample_count = 0;
    };

    BeamCovariances beam_covariances(const PathSet &paths, const ArrayGeometry &bs, const ArrayGeometry &ut,
                                     const CovarianceMode &mode);

    /// Beam-domain images of one path: u = A_UT^H a_UT(aoa), w = A_BS^H a_BS(aod).
    struct PathBeamImage
    {
        CVector u;
        CVector w;
    };

    PathBeamImage path_beam_image(const Path &path, const CMatrix &a_bs, const CMatrix &a_ut,
                                  const ArrayGeometry &bs, const ArrayGeometry &ut);
}
