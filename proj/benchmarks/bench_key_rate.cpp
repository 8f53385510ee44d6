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

#include <benchmark/benchmark.h>

namespace
{
    using namespace beamkey;

    struct Setup
    {
        std::vector<BeamCovariances> covs;
        CMatrix a_bs;
        std::vector<CMatrix> a_ut;
        std::vector<std::size_t> ut;
    };

    Setup make_setup(std::size_t m, std::size_t k, std::size_t n, std::size_t n_paths)
    {
        Setup s;
        Rng rng = make_rng(derive_seed(7, streams::paths));
        s.a_bs = sampling_matrix(ArrayGeometry{m});
        for (std::size_t u = 0; u < k; ++u)
        {
            const PathSet paths = sample_paths(n_paths, rng, OffGrid{});
            s.covs.push_back(beam_covariances(paths, ArrayGeometry{m}, ArrayGeometry{n}, AnalyticCovariance{}));
            s.a_ut.push_back(sampling_matrix(ArrayGeometry{n}));
            s.ut.push_back(n);
        }
        return s;
    }

    void BM_SamplingMatrix(benchmark::State &state)
    {
        const auto m = static_cast<std::size_t>(state.range(0));
        for (auto _ : state)
            benchmark::DoNotOptimize(sampling_matrix(ArrayGeometry{m}));
    }
    BENCHMARK(BM_SamplingMatrix)->Arg(64)->Arg(128)->Arg(256);

    void BM_AnalyticCovariance(benchmark::State &state)
    {
        const auto m = static_cast<std::size_t>(state.range(0));
        Rng rng = make_rng(1);
        const PathSet paths = sample_paths(6, rng, OffGrid{});
        for (auto _ : state)
            benchmark::DoNotOptimize(beam_covariances(paths, ArrayGeometry{m}, ArrayGeometry{4}, AnalyticCovariance{}));
    }
    BENCHMARK(BM_AnalyticCovariance)->Arg(32)->Arg(128);

    void BM_AllocateBeams(benchmark::State &state)
    {
        const Setup s = make_setup(128, 6, 4, 6);
        for (auto _ : state)
            benchmark::DoNotOptimize(allocate_beams(s.covs, 6, 4, s.a_bs, s.a_ut));
    }
    BENCHMARK(BM_AllocateBeams);

    /// Sum rate of the reference multi-user setup; arg 0 selects the
    /// Lambda root (0: Hermitian square root, 1: low-rank factor).
    void BM_SumRateReused(benchmark::State &state)
    {
        const Setup s = make_setup(128, 6, 4, 6);
        const auto pilots = make_pilots(PilotMode::reused, 6, 4, 128, s.ut);
        const RootKind root = state.range(0) == 0 ? RootKind::hermitian_sqrt : RootKind::low_rank_factor;
        const RateInputs in = make_rate_inputs(s.covs, allocate_beams(s.covs, 6, 4, s.a_bs, s.a_ut), pilots, 0.1, root);
        for (auto _ : state)
            benchmark::DoNotOptimize(sum_secret_key_rate(in));
    }
    BENCHMARK(BM_SumRateReused)->Arg(1)->Arg(0)->Unit(benchmark::kMillisecond);

    void BM_SingleUserPerfectCsi(benchmark::State &state)
    {
        const Setup s = make_setup(128, 1, 4, 6);
        const auto pilots = make_pilots(PilotMode::orthogonal, 128, 4, 128, s.ut);
        const RateInputs in = make_rate_inputs(s.covs, full_dimension_allocation(s.a_bs, s.a_ut), pilots, 0.1,
                                               RootKind::low_rank_factor);
        for (auto _ : state)
            benchmark::DoNotOptimize(secret_key_rate(in, 0));
    }
    BENCHMARK(BM_SingleUserPerfectCsi)->Unit(benchmark::kMillisecond);

    void BM_GaussianOracle(benchmark::State &state)
    {
        const Setup s = make_setup(16, 3, 2, 3);
        const auto pilots = make_pilots(PilotMode::reused, 4, 2, 16, s.ut);
        const RateInputs in = make_rate_inputs(s.covs, allocate_beams(s.covs, 4, 2, s.a_bs, s.a_ut), pilots, 0.1);
        const auto cov = assemble_observation_covariances(in, 0);
        for (auto _ : state)
            benchmark::DoNotOptimize(gaussian_mi_oracle(cov));
    }
    BENCHMARK(BM_GaussianOracle);
}

BENCHMARK_MAIN();
