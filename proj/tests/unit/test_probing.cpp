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

#include <catch_amalgamated.hpp>

#include <numeric>
#include <sstream>

using namespace beamkey;

namespace
{
    struct Scene
    {
        std::size_t m = 0;
        std::vector<std::size_t> ut;
        std::vector<PathSet> paths;
        std::vector<BeamCovariances> covs;
        std::vector<CMatrix> channels;
        CMatrix a_bs;
        std::vector<CMatrix> a_ut;
    };

    Scene make_scene(std::size_t m, std::size_t n, std::vector<PathSet> paths)
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
            s.channels.push_back(synthesize_channel(p, ArrayGeometry{m}, ArrayGeometry{n}));
        }
        return s;
    }

    Scene random_scene(Rng &rng, std::size_t m, std::size_t n, std::size_t k, std::size_t n_paths)
    {
        std::vector<PathSet> paths;
        for (std::size_t i = 0; i < k; ++i)
            paths.push_back(sample_paths(n_paths, rng, OffGrid{}));
        return make_scene(m, n, std::move(paths));
    }

    /// Users 0..k-1 with on-grid paths on disjoint BS beams.
    Scene disjoint_scene(Rng &rng, std::size_t m, std::size_t n, std::size_t k, std::size_t n_paths)
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

    CMatrix effective(const CMatrix &h, const UserBeams &u) { return u.combiner.adjoint() * h * u.precoder; }
}

TEST_CASE("make_pilots examples", "[probing]")
{
    const std::vector<std::size_t> ut(6, 4);
    const PilotSet reused = make_pilots(PilotMode::reused, 6, 4, 128, ut);
    REQUIRE(reused.t_d == 6);
    REQUIRE(reused.t_u == 4);
    for (std::size_t k = 1; k < 6; ++k)
    {
        REQUIRE(reused.downlink[k] == reused.downlink[0]);
        REQUIRE(reused.uplink[k] == reused.uplink[0]);
    }

    const PilotSet orth = make_pilots(PilotMode::orthogonal, 6, 4, 128, ut);
    REQUIRE(orth.t_d == 128);
    REQUIRE(orth.t_u == 24);
    for (std::size_t k = 0; k < 6; ++k)
        for (std::size_t j = 0; j < 6; ++j)
            if (j != k)
                REQUIRE((orth.uplink[j] * orth.uplink[k].adjoint()).isZero(0.0));

    const PilotSet reduced = make_pilots(PilotMode::orthogonal_reduced, 6, 4, 128, ut);
    REQUIRE(reduced.t_d == 36);
    REQUIRE(reduced.t_u == 24);
    for (std::size_t k = 0; k < 6; ++k)
        for (std::size_t j = 0; j < 6; ++j)
            if (j != k)
            {
                REQUIRE((reduced.downlink[j] * reduced.downlink[k].adjoint()).isZero(0.0));
                REQUIRE((reduced.uplink[j] * reduced.uplink[k].adjoint()).isZero(0.0));
            }

    for (const PilotSet *p : {&reused, &orth, &reduced})
        for (std::size_t k = 0; k < 6; ++k)
        {
            const auto &d = p->downlink[k];
            const auto &u = p->uplink[k];
            REQUIRE((d * d.adjoint() - CMatrix::Identity(d.rows(), d.rows())).cwiseAbs().maxCoeff() <= 1e-12);
            REQUIRE((u * u.adjoint() - CMatrix::Identity(u.rows(), u.rows())).cwiseAbs().maxCoeff() <= 1e-12);
        }
}

TEST_CASE("make_pilots rejects infeasible dimensions", "[probing]")
{
    const std::vector<std::size_t> ut{4};
    REQUIRE_THROWS_AS(make_pilots(PilotMode::reused, 0, 4, 8, ut), std::invalid_argument);
    REQUIRE_THROWS_AS(make_pilots(PilotMode::reused, 9, 4, 8, ut), std::invalid_argument);
    REQUIRE_THROWS_AS(make_pilots(PilotMode::reused, 2, 2, 8, std::vector<std::size_t>{}), std::invalid_argument);
    REQUIRE(parse_pilot_mode("orthogonal_reduced") == PilotMode::orthogonal_reduced);
    REQUIRE(to_string(PilotMode::reused) == "reused");
    REQUIRE_THROWS_AS(parse_pilot_mode("shared"), std::invalid_argument);
}

TEST_CASE("noiseless single-user probing is reciprocal", "[probing]")
{
    Rng rng = make_rng(31);
    for (int t = 0; t < 20; ++t)
    {
        const Scene s = random_scene(rng, 16, 4, 1, 3);
        const auto alloc = allocate_beams(s.covs, 5, 3, s.a_bs, s.a_ut);
        const auto pilots = make_pilots(PilotMode::reused, 5, 3, 16, s.ut);
        const auto dl = downlink_probe(s.channels, alloc, pilots, 0.0, rng);
        const auto ul = uplink_probe(s.channels, alloc, pilots, 0.0, rng);
        const CMatrix expected = effective(s.channels[0], alloc.users[0]);
        REQUIRE((dl[0] - expected).norm() < 1e-13);
        REQUIRE((ul[0] - expected.transpose()).norm() < 1e-13);
        const auto obs = vectorize_observations(dl[0], ul[0], 0.0);
        REQUIRE((obs.z_dl - obs.z_ul).norm() <= 1e-10 * obs.z_dl.norm());
    }
}

TEST_CASE("reused pilots with disjoint on-grid beams neutralize interference", "[probing]")
{
    Rng rng = make_rng(32);
    for (int t = 0; t < 20; ++t)
    {
        const Scene s = disjoint_scene(rng, 16, 4, 2 + t % 2, 2);
        const auto alloc = allocate_beams(s.covs, 2, 2, s.a_bs, s.a_ut);
        const auto pilots = make_pilots(PilotMode::reused, 2, 2, 16, s.ut);
        const auto dl = downlink_probe(s.channels, alloc, pilots, 0.0, rng);
        const auto ul = uplink_probe(s.channels, alloc, pilots, 0.0, rng);
        for (std::size_t k = 0; k < s.channels.size(); ++k)
        {
            const CMatrix expected = effective(s.channels[k], alloc.users[k]);
            REQUIRE((dl[k] - expected).norm() < 1e-10);
            REQUIRE((ul[k] - expected.transpose()).norm() < 1e-10);
        }
    }
}

TEST_CASE("reused pilots with overlapping beams do interfere", "[probing]")
{
    Rng rng = make_rng(33);
    const Scene s = random_scene(rng, 8, 2, 2, 3);
    const auto alloc = allocate_beams(s.covs, 3, 2, s.a_bs, s.a_ut);
    const auto pilots = make_pilots(PilotMode::reused, 3, 2, 8, s.ut);
    const auto ul = uplink_probe(s.channels, alloc, pilots, 0.0, rng);
    REQUIRE((ul[0] - effective(s.channels[0], alloc.users[0]).transpose()).norm() > 1e-6);
}

TEST_CASE("orthogonal pilots remove cross terms for any allocation", "[probing]")
{
    Rng rng = make_rng(34);
    for (int t = 0; t < 20; ++t)
    {
        const std::size_t k = 2 + t % 3;
        const Scene s = random_scene(rng, 8, 2, k, 3);
        for (PilotMode mode : {PilotMode::orthogonal, PilotMode::orthogonal_reduced})
        {
            const auto alloc = mode == PilotMode::orthogonal ? full_dimension_allocation(s.a_bs, s.a_ut)
                                                             : allocate_beams(s.covs, 2, 2, s.a_bs, s.a_ut);
            const auto pilots = make_pilots(mode, 2, 2, 8, s.ut);
            const auto dl = downlink_probe(s.channels, alloc, pilots, 0.0, rng);
            const auto ul = uplink_probe(s.channels, alloc, pilots, 0.0, rng);
            for (std::size_t u = 0; u < k; ++u)
            {
                const CMatrix expected = effective(s.channels[u], alloc.users[u]);
                REQUIRE((dl[u] - expected).cwiseAbs().maxCoeff() < 1e-12);
                REQUIRE((ul[u] - expected.transpose()).cwiseAbs().maxCoeff() < 1e-12);
            }
        }
    }
}

TEST_CASE("noise energy is sigma^2 M_e N_e and scales linearly", "[probing]")
{
    const std::size_t m = 8, n = 4, m_e = 3, n_e = 2;
    const Scene s = make_scene(m, n, {PathSet({Path{0.0, 0.1, 0.2, 1.0}})}); // zero gain: pure noise
    std::vector<BeamCovariances> covs = s.covs;
    const auto alloc = allocate_beams(covs, m_e, n_e, s.a_bs, s.a_ut);
    const auto pilots = make_pilots(PilotMode::reused, m_e, n_e, m, s.ut);
    Rng rng = make_rng(35);

    std::vector<double> energy;
    for (double s2 : {0.1, 0.2, 0.4})
    {
        double dl = 0.0, ul = 0.0;
        const int trials = 10000;
        for (int t = 0; t < trials; ++t)
        {
            dl += downlink_probe(s.channels, alloc, pilots, s2, rng)[0].squaredNorm();
            ul += uplink_probe(s.channels, alloc, pilots, s2, rng)[0].squaredNorm();
        }
        dl /= trials;
        ul /= trials;
        REQUIRE(dl == Catch::Approx(s2 * m_e * n_e).epsilon(0.02));
        REQUIRE(ul == Catch::Approx(s2 * m_e * n_e).epsilon(0.02));
        energy.push_back(dl);
    }
    // Slope check: doubling sigma^2 doubles the error energy.
    REQUIRE(energy[1] / energy[0] == Catch::Approx(2.0).epsilon(0.05));
    REQUIRE(energy[2] / energy[1] == Catch::Approx(2.0).epsilon(0.05));
}

TEST_CASE("LS estimates are unbiased", "[probing]")
{
    Rng rng = make_rng(36);
    const Scene s = random_scene(rng, 8, 2, 2, 2);
    const auto alloc = allocate_beams(s.covs, 3, 2, s.a_bs, s.a_ut);
    const auto pilots = make_pilots(PilotMode::reused, 3, 2, 8, s.ut);
    const double s2 = 0.5;
    const int trials = 4000;
    CMatrix mean = CMatrix::Zero(2, 3);
    for (int t = 0; t < trials; ++t)
        mean += downlink_probe(s.channels, alloc, pilots, s2, rng)[0];
    mean /= static_cast<double>(trials);

    // E[Z_0] = C_0^H H_0 (sum_k P_k S_k) S_0^H
    CMatrix transmit = CMatrix::Zero(8, 3);
    for (std::size_t k = 0; k < 2; ++k)
        transmit += alloc.users[k].precoder * pilots.downlink[k];
    const CMatrix truth = alloc.users[0].combiner.adjoint() * s.channels[0] * transmit * pilots.downlink[0].adjoint();
    const double se = std::sqrt(s2 / 2.0 / trials); // per real component
    REQUIRE((mean - truth).real().cwiseAbs().maxCoeff() < 4.0 * se);
    REQUIRE((mean - truth).imag().cwiseAbs().maxCoeff() < 4.0 * se);
}

TEST_CASE("noisy observations are partially correlated", "[probing]")
{
    Rng rng = make_rng(37);
    const Scene s = random_scene(rng, 8, 2, 1, 2);
    const auto alloc = allocate_beams(s.covs, 2, 2, s.a_bs, s.a_ut);
    const auto pilots = make_pilots(PilotMode::reused, 2, 2, 8, s.ut);
    const double s2 = 0.1;
    cplx cross = 0.0;
    double p_dl = 0.0, p_ul = 0.0;
    for (int t = 0; t < 5000; ++t)
    {
        const std::vector<CMatrix> ch{synthesize_channel(s.paths[0].with_fresh_gains(rng), ArrayGeometry{8}, ArrayGeometry{2})};
        const auto obs = vectorize_observations(downlink_probe(ch, alloc, pilots, s2, rng)[0],
                                                uplink_probe(ch, alloc, pilots, s2, rng)[0], s2);
        cross += obs.z_dl(0) * std::conj(obs.z_ul(0));
        p_dl += std::norm(obs.z_dl(0));
        p_ul += std::norm(obs.z_ul(0));
    }
    const double rho = std::abs(cross) / std::sqrt(p_dl * p_ul);
    REQUIRE(rho > 0.0);
    REQUIRE(rho < 1.0);
}

TEST_CASE("vectorize_observations shapes", "[probing]")
{
    CMatrix z(2, 3);
    z << 1, 2, 3, 4, 5, 6;
    const auto obs = vectorize_observations(z, z.transpose(), 0.0);
    REQUIRE(obs.z_dl.size() == 6);
    REQUIRE(obs.z_ul.size() == 6);
    REQUIRE(obs.z_dl == obs.z_ul);
    REQUIRE(obs.z_dl(1) == cplx(4.0));
    REQUIRE_THROWS_AS(vectorize_observations(z, z, 0.0), std::invalid_argument);
}

TEST_CASE("dimension_reduction_factor examples", "[probing]")
{
    REQUIRE(dimension_reduction_factor(128, 4, 6, 4) == Catch::Approx(512.0 / 24.0));
    REQUIRE(dimension_reduction_factor(16, 4, 16, 4) == 1.0);
    REQUIRE(dimension_reduction_factor(128, 4, 4, 4) == 32.0);
    REQUIRE_THROWS_AS(dimension_reduction_factor(0, 4, 4, 4), std::invalid_argument);
}

TEST_CASE("observation CSV layout", "[probing]")
{
    CMatrix z(1, 2);
    z << cplx(1, -1), cplx(0.5, 2);
    const std::vector<ProbingObservation> obs{vectorize_observations(z, z.transpose(), 0.0)};
    std::ostringstream os;
    write_observations_csv(os, obs);
    REQUIRE(os.str() == "user,index,re_z_dl,im_z_dl,re_z_ul,im_z_ul\n0,0,1,-1,1,-1\n0,1,0.5,2,0.5,2\n");
}

TEST_CASE("probing rejects inconsistent inputs", "[probing]")
{
    Rng rng = make_rng(38);
    const Scene s = random_scene(rng, 8, 2, 1, 2);
    const auto alloc = allocate_beams(s.covs, 2, 2, s.a_bs, s.a_ut);
    const auto pilots = make_pilots(PilotMode::reused, 3, 2, 8, s.ut);
    REQUIRE_THROWS_AS(downlink_probe(s.channels, alloc, pilots, 0.0, rng), std::invalid_argument);
    const auto ok = make_pilots(PilotMode::reused, 2, 2, 8, s.ut);
    REQUIRE_THROWS_AS(uplink_probe(s.channels, alloc, ok, -1.0, rng), std::invalid_argument);
}
