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

#include "beamkey/common.hpp"

#include <cmath>

namespace beamkey
{
    std::string version()
    {
#ifdef BEAMKEY_VERSION
        return BEAMKEY_VERSION;
#else
        return "unknown";
#endif
    }

    std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream, std::uint64_t index)
    {
        auto mix = [](std::uint64_t z)
        {
            z += 0x9e3779b97f4a7c15ULL;
            z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
            z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
            return z ^ (z >> 31);
        };
        return mix(mix(mix(master) ^ stream) ^ index);
    }

    cplx complex_gaussian(Rng &rng, double variance)
    {
        if (variance <= 0.0)
            return {0.0, 0.0};
        // Real and imaginary parts each carry half the power.
        std::normal_distribution<double> normal(0.0, std::sqrt(0.5 * variance));
        const double re = normal(rng);
        const double im = normal(rng);
        return {re, im};
    }

    CMatrix complex_gaussian_matrix(Rng &rng, Eigen::Index rows, Eigen::Index cols, double variance)
    {
        CMatrix out(rows, cols);
        if (variance == 0.0)
        {
            out.setZero();
            return out;
        }
        for (Eigen::Index c = 0; c < cols; ++c)
            for (Eigen::Index r = 0; r < rows; ++r)
                out(r, c) = complex_gaussian(rng, variance);
        return out;
    }
}
