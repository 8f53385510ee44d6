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

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace beamkey
{
    using cplx = std::complex<double>;
    using CMatrix = Eigen::MatrixXcd;
    using CVector = Eigen::VectorXcd;
    using RVector = Eigen::VectorXd;

    /// Random engine used everywhere. Streams are derived from a 64-bit master
    /// seed with derive_seed() so results do not depend on evaluation order.
    using Rng = std::mt19937_64;

    std::string version();

    /// Raised when a computation cannot produce a trustworthy number
    /// (failed factorization without recovery, negative mutual information).
    class NumericalError : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };

    /// SplitMix64 finalizer over (master, stream, index).
    std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream, std::uint64_t index = 0);

    inline Rng make_rng(std::uint64_t seed) { return Rng(seed); }

    /// Circularly-symmetric complex Gaussian sample with E|x|^2 = variance.
    cplx complex_gaussian(Rng &rng, double variance);

    /// rows x cols matrix of i.i.d. CN(0, variance) entries, drawn column-major.
    CMatrix complex_gaussian_matrix(Rng &rng, Eigen::Index rows, Eigen::Index cols, double variance);

    // Stream identifiers for derive_seed().
    namespace streams
    {
        inline constexpr std::uint64_t paths = 0x70617468;
        inline constexpr std::uint64_t gains = 0x6761696e;
        inline constexpr std::uint64_t noise = 0x6e6f6973;
        inline constexpr std::uint64_t monte_carlo = 0x6d6f6e74;
        inline constexpr std::uint64_t validation = 0x76616c69;
    }
}
