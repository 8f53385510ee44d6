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

// Scene builders shared by the rate and experiment tests.

#include "beamkey/key_rate.hpp"

#include <vector>

namespace beamkey::testing
{
    struct Scene
    {
        std::size_t m = 0;
        std::vector<std::size_t> ut;
        std::vector<PathSet> paths;
        std::vector<BeamCovariances> covs;
        CMatrix a_bs;
        std::vector<CMatrix> a_ut;
    };

    inline Scene make_scene(std::size_t m, std::size_t n, std::vector<PathSet> paths)
    {
        Scene s;
        s.m = m;
        s.paths = std::move(paths);
        s.a_bs = sampling_matrix(ArrayGeometry{m});
        for (const auto &p : s.paths)
        {
            s.ut.push_back(n);
            s.a_ut.push_back(sampling_matrix(ArrayGeometry{n}));
            s.covs.push_back(beam_covariances(p, ArrayGeometry{m}, ArrayGeometry{n}, AnalyticCovariance{}));
        }
        return s;
    }

    inline Scene random_scene(Rng &rng, std::size_t m, std::size_t n, std::size_t k, std::size_t n_paths)
    {
        std::vector<PathSet> paths;
        for (std::size_t i = 0; i < k; ++i)
            paths.push_back(sample_paths(n_paths, rng, OffGrid{}));
        return make_scene(m, n, std::move(paths));
    }

    /// On-grid paths; user u owns BS beams u*n_paths .. u*n_paths + n_paths - 1.
    inline Scene disjoint_scene(Rng &rng, std::size_t m, std::size_t n, std::size_t k, std::size_t n_paths)
    {
        std::vector<PathSet> paths;
        for (std::size_t u = 0; u < k; ++u)
        {
            std::vector<Path> ps;
            for (std::size_t p = 0; p < n_paths; ++p)
            {
                Path path;
                path.power = 1.0 / static_cast<double>(n_paths);
                path.gain = complex_gaussian(rng, path.power);
                path.aod = grid_angle(u * n_paths + p, m);
                path.aoa = grid_angle(p % n, n);
                ps.push_back(path);
            }
            paths.emplace_back(ps);
        }
        return make_scene(m, n, std::move(paths));
    }

    /// Rate inputs of a scene for one pilot mode. Orthogonal mode uses the
    /// full-dimension allocation.
    inline RateInputs scene_inputs(const Scene &s, PilotMode mode, std::size_t m_e, std::size_t n_e, double s2,
                                   RootKind root = RootKind::hermitian_sqrt)
    {
        BeamAllocation alloc = mode == PilotMode::orthogonal ? full_dimension_allocation(s.a_bs, s.a_ut)
                                                             : allocate_beams(s.covs, m_e, n_e, s.a_bs, s.a_ut);
        const PilotSet pilots = make_pilots(mode, m_e, n_e, s.m, s.ut);
        return make_rate_inputs(s.covs, std::move(alloc), pilots, s2, root);
    }
}
