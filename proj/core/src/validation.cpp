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

#include "beamkey/validation.hpp"

#include "beamkey/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>

namespace beamkey
{
    namespace
    {
        PropertyResult verdict(std::string name, double measured, double tolerance, std::string detail = {})
        {
            PropertyResult r;
            r.name = std::move(name);
            r.measured = measured;
            r.tolerance = tolerance;
            r.status = measured <= tolerance ? PropertyStatus::pass : PropertyStatus::fail;
            r.detail = std::move(detail);
            return r;
        }

        PropertyResult failure(std::string name, double tolerance, const std::exception &e)
        {
            PropertyResult r;
            r.name = std::move(name);
            r.status = PropertyStatus::fail;
            r.measured = std::numeric_limits<double>::infinity();
            r.tolerance = tolerance;
            r.detail = std::string("exception: ") + e.what();
            return r;
        }

        std::size_t uniform_index(Rng &rng, std::size_t lo, std::size_t hi)
        {
            return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
        }

        /// K users with their own paths and beam-domain statistics.
        struct Scene
        {
            std::size_t bs_antennas = 0;
            std::vector<std::size_t> ut_antennas;
            std::vector<PathSet> paths;
            std::vector<BeamCovariances> covs;
            CMatrix a_bs;
            std::vector<CMatrix> a_ut;

            std::vector<CMatrix> channels() const
            {
                std::vector<CMatrix> out;
                for (std::size_t k = 0; k < paths.size(); ++k)
                    out.push_back(synthesize_channel(paths[k], ArrayGeometry{bs_antennas}, ArrayGeometry{ut_antennas[k]}));
                return out;
            }
        };

        Scene make_scene(std::size_t m, std::vector<std::size_t> n, std::vector<PathSet> paths)
        {
            Scene s;
            s.bs_antennas = m;
            s.ut_antennas = std::move(n);
            s.paths = std::move(paths);
            s.a_bs = sampling_matrix(ArrayGeometry{m});
            for (std::size_t k = 0; k < s.paths.size(); ++k)
            {
                s.a_ut.push_back(sampling_matrix(ArrayGeometry{s.ut_antennas[k]}));
                s.covs.push_back(beam_covariances(s.paths[k], ArrayGeometry{m}, ArrayGeometry{s.ut_antennas[k]},
                                                  AnalyticCovariance{}));
            }
            return s;
        }

        Scene random_scene(Rng &rng, std::size_t m, std::size_t k, std::size_t n, std::size_t n_paths,
                           const AngleGrid &grid = OffGrid{})
        {
            std::vector<PathSet> paths;
            for (std::size_t i = 0; i < k; ++i)
                paths.push_back(sample_paths(n_paths, rng, grid));
            return make_scene(m, std::vector<std::size_t>(k, n), std::move(paths));
        }

        /// On-grid users whose BS beam supports are pairwise disjoint.
        Scene disjoint_on_grid_scene(Rng &rng, std::size_t m, std::size_t k, std::size_t n, std::size_t n_paths)
        {
            std::vector<std::size_t> bs_beams(m);
            std::iota(bs_beams.begin(), bs_beams.end(), std::size_t{0});
            std::shuffle(bs_beams.begin(), bs_beams.end(), rng);
            std::vector<PathSet> paths;
            for (std::size_t u = 0; u < k; ++u)
            {
                std::vector<std::size_t> ut_beams(n);
                std::iota(ut_beams.begin(), ut_beams.end(), std::size_t{0});
                std::shuffle(ut_beams.begin(), ut_beams.end(), rng);
                std::vector<Path> ps;
                for (std::size_t p = 0; p < n_paths; ++p)
                {
                    Path path;
                    path.power = 1.0 / static_cast<double>(n_paths);
                    path.gain = complex_gaussian(rng, path.power);
                    path.aod = grid_angle(bs_beams[u * n_paths + p], m);
                    path.aoa = grid_angle(ut_beams[p], n);
                    ps.push_back(path);
                }
                paths.emplace_back(std::move(ps));
            }
            return make_scene(m, std::vector<std::size_t>(k, n), std::move(paths));
        }

        double relative_gap(const CVector &a, const CVector &b)
        {
            return (a - b).norm() / std::max(b.norm(), 1e-300);
        }

        /// Appendix-A covariances assembled straight from Lambda and the
        /// beam selections, without the V-matrix factorization.
        ObservationCovariances brute_force_covariances(std::span<const BeamCovariances> covs,
                                                       const BeamAllocation &alloc, PilotMode mode, double s2,
                                                       std::size_t user)
        {
            const auto &me = alloc.users[user];
            std::vector<std::size_t> coupled;
            for (std::size_t k = 0; k < alloc.user_count(); ++k)
                if (pilots_interfere(mode) || k == user)
                    coupled.push_back(k);

            CMatrix q = CMatrix::Zero(me.precoder_beam.rows(), me.precoder_beam.cols());
            for (auto k : coupled)
                q += alloc.users[k].precoder_beam;
            const CMatrix g_dl = linalg::kron(q.transpose(), me.combiner_beam.adjoint());
            const auto m_e = me.precoder.cols();
            const auto n_e = me.combiner.cols();

            ObservationCovariances c;
            c.r_dl = g_dl * covs[user].lambda_full * g_dl.adjoint() +
                     s2 * linalg::kron(CMatrix::Identity(m_e, m_e), me.combiner.adjoint() * me.combiner);
            c.r_ul = s2 * linalg::kron(me.precoder.transpose() * me.precoder.conjugate(), CMatrix::Identity(n_e, n_e));
            for (auto k : coupled)
            {
                const CMatrix g = linalg::kron(me.precoder_beam.transpose(), alloc.users[k].combiner_beam.adjoint());
                c.r_ul += g * covs[k].lambda_full * g.adjoint();
            }
            const CMatrix g_own = linalg::kron(me.precoder_beam.transpose(), me.combiner_beam.adjoint());
            c.r_cross = g_dl * covs[user].lambda_full * g_own.adjoint();

            const auto a = c.r_dl.rows();
            const auto b = c.r_ul.rows();
            c.joint.resize(a + b, a + b);
            c.joint << c.r_dl, c.r_cross, c.r_cross.adjoint(), c.r_ul;
            return c;
        }

        struct ProbeSetup
        {
            BeamAllocation alloc;
            PilotSet pilots;
        };

        ProbeSetup probe_setup(const Scene &s, PilotMode mode, std::size_t m_e, std::size_t n_e)
        {
            ProbeSetup p;
            p.alloc = mode == PilotMode::orthogonal ? full_dimension_allocation(s.a_bs, s.a_ut)
                                                    : allocate_beams(s.covs, m_e, n_e, s.a_bs, s.a_ut);
            p.pilots = make_pilots(mode, m_e, n_e, s.bs_antennas, s.ut_antennas);
            return p;
        }

        std::vector<ProbingObservation> probe(std::span<const CMatrix> channels, const ProbeSetup &p, double s2,
                                              Rng &rng)
        {
            const auto dl = downlink_probe(channels, p.alloc, p.pilots, s2, rng);
            const auto ul = uplink_probe(channels, p.alloc, p.pilots, s2, rng);
            std::vector<ProbingObservation> out;
            for (std::size_t k = 0; k < dl.size(); ++k)
                out.push_back(vectorize_observations(dl[k], ul[k], s2));
            return out;
        }

        /// User k probed alone with the allocation it has in the multi-user setup.
        ProbingObservation probe_alone(const CMatrix &channel, const ProbeSetup &multi, std::size_t k,
                                       std::size_t n_k, PilotMode mode, std::size_t m_e, std::size_t n_e,
                                       std::size_t m)
        {
            ProbeSetup p;
            p.alloc.users.push_back(multi.alloc.users[k]);
            const std::vector<std::size_t> ut{n_k};
            p.pilots = make_pilots(mode == PilotMode::orthogonal ? mode : PilotMode::reused, m_e, n_e, m, ut);
            Rng unused(0);
            const std::vector<CMatrix> ch{channel};
            return probe(ch, p, 0.0, unused).front();
        }

        std::string sci(double v)
        {
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.3e", v);
            return buf;
        }

        bool same_bits(const CMatrix &a, const CMatrix &b)
        {
            return a.rows() == b.rows() && a.cols() == b.cols() &&
                   std::memcmp(a.data(), b.data(), sizeof(cplx) * static_cast<std::size_t>(a.size())) == 0;
        }
    }

    std::string_view to_string(PropertyStatus status)
    {
        switch (status)
        {
        case PropertyStatus::pass:
            return "PASS";
        case PropertyStatus::fail:
            return "FAIL";
        case PropertyStatus::skipped:
            return "SKIP";
        }
        return "?";
    }

    bool ValidationReport::passed() const
    {
        return std::none_of(properties.begin(), properties.end(),
                            [](const PropertyResult &p) { return p.status == PropertyStatus::fail; });
    }

    PropertyResult check_unitarity(bool corrupt_sampling_matrix)
    {
        double worst = 0.0;
        std::size_t worst_n = 1;
        for (std::size_t n = 1; n <= 256; n *= 2)
        {
            CMatrix a = sampling_matrix(ArrayGeometry{n});
            if (corrupt_sampling_matrix)
                a.col(0) *= 1.01;
            const double e = linalg::unitarity_error(a);
            if (e > worst)
            {
                worst = e;
                worst_n = n;
            }
        }
        return verdict("unitarity", worst, 1e-12,
                       "max|A^H A - I| over n=1..256, worst n=" + std::to_string(worst_n) +
                           (corrupt_sampling_matrix ? " (corrupted sampling matrix)" : ""));
    }

    PropertyResult check_norm_preservation(std::uint64_t seed)
    {
        Rng rng = make_rng(derive_seed(seed, streams::validation, 1));
        double worst = 0.0;
        for (int i = 0; i < 100; ++i)
        {
            const std::size_t m = std::size_t{1} << uniform_index(rng, 0, 7);
            const std::size_t n = std::size_t{1} << uniform_index(rng, 0, 3);
            const CMatrix h = complex_gaussian_matrix(rng, static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(m), 1.0);
            const auto beam = to_beam_domain(h, sampling_matrix(ArrayGeometry{n}), sampling_matrix(ArrayGeometry{m}));
            worst = std::max(worst, std::abs(beam.matrix.norm() - h.norm()) / h.norm());
        }
        return verdict("norm_preservation", worst, 1e-10, "| ||H~||_F - ||H||_F | / ||H||_F over 100 channels");
    }

    PropertyResult check_on_grid_sparsity(std::uint64_t seed)
    {
        Rng rng = make_rng(derive_seed(seed, streams::validation, 2));
        std::size_t bad = 0;
        double worst_off = 0.0;
        for (int i = 0; i < 50; ++i)
        {
            const std::size_t m = 16, n = 4;
            const std::size_t n_paths = uniform_index(rng, 1, 4);
            const PathSet paths = sample_paths(n_paths, rng, OnGrid{m, n});
            // Strong gains so that every on-grid entry clears 1e-8.
            std::vector<Path> ps = paths.paths();
            for (auto &p : ps)
                p.gain = std::polar(1.0 + std::abs(p.gain), std::arg(p.gain));
            const CMatrix h = synthesize_channel(PathSet(ps), ArrayGeometry{m}, ArrayGeometry{n});
            const CMatrix hb = to_beam_domain(h, sampling_matrix(ArrayGeometry{n}), sampling_matrix(ArrayGeometry{m})).matrix;
            std::size_t big = 0;
            for (Eigen::Index r = 0; r < hb.rows(); ++r)
                for (Eigen::Index c = 0; c < hb.cols(); ++c)
                {
                    const double v = std::abs(hb(r, c));
                    if (v > 1e-8)
                        ++big;
                    else
                        worst_off = std::max(worst_off, v);
                }
            if (big != n_paths)
                ++bad;
        }
        PropertyResult r = verdict("on_grid_sparsity", worst_off, 1e-10, "largest off-support |H~| over 50 draws");
        if (bad > 0)
        {
            r.status = PropertyStatus::fail;
            r.detail += "; " + std::to_string(bad) + " draws had a support size other than N_P";
        }
        return r;
    }

    PropertyResult check_covariance_psd(std::uint64_t seed)
    {
        Rng rng = make_rng(derive_seed(seed, streams::validation, 3));
        double worst = 0.0;
        for (int i = 0; i < 30; ++i)
        {
            const std::size_t m = 16, n = 4;
            const PathSet paths = sample_paths(uniform_index(rng, 1, 6), rng, OffGrid{});
            const auto c = beam_covariances(paths, ArrayGeometry{m}, ArrayGeometry{n}, AnalyticCovariance{});
            const double tr = linalg::real_trace(c.lambda_full);
            const RVector ev = linalg::hermitian_eigenvalues(c.lambda_full);
            worst = std::max(worst, linalg::hermitian_deviation(c.lambda_full) / tr);
            worst = std::max(worst, std::max(0.0, -ev.minCoeff()) / tr);
            worst = std::max(worst, std::abs(c.r_bs.diagonal().real().sum() - paths.total_power()) / paths.total_power());
        }
        return verdict("covariance_psd", worst, 1e-10,
                       "Hermitian deviation, negative eigenvalue and trace error of Lambda, relative to trace");
    }

    PropertyResult check_lambda_rank(std::uint64_t seed)
    {
        Rng rng = make_rng(derive_seed(seed, streams::validation, 4));
        double worst = 0.0;
        for (int i = 0; i < 30; ++i)
        {
            const std::size_t n_paths = uniform_index(rng, 1, 6);
            const PathSet paths = sample_paths(n_paths, rng, OffGrid{});
            const auto c = beam_covariances(paths, ArrayGeometry{16}, ArrayGeometry{4}, AnalyticCovariance{});
            const auto rank = linalg::numerical_rank(c.lambda_full, 1e-10);
            worst = std::max(worst, static_cast<double>(rank) - static_cast<double>(n_paths));
        }
        return verdict("lambda_rank", worst, 0.0, "max(rank(Lambda) - N_P) over 30 draws, eigenvalue cut 1e-10*trace");
    }

    PropertyResult check_allocation(std::uint64_t seed)
    {
        Rng rng = make_rng(derive_seed(seed, streams::validation, 5));
        double worst = 0.0;
        std::size_t overlaps = 0;
        for (int i = 0; i < 50; ++i)
        {
            const std::size_t k = uniform_index(rng, 1, 4);
            const std::size_t m_e = uniform_index(rng, 1, 4);
            const Scene s = random_scene(rng, 16, k, 4, uniform_index(rng, 1, 4));
            const auto alloc = allocate_beams(s.covs, m_e, 2, s.a_bs, s.a_ut);
            std::vector<int> owner(16, 0);
            for (const auto &u : alloc.users)
            {
                for (auto b : u.bs_beams)
                    if (owner[b]++ > 0)
                        ++overlaps;
                worst = std::max(worst, linalg::unitarity_error(u.precoder));
                worst = std::max(worst, linalg::unitarity_error(u.combiner));
            }
        }
        PropertyResult r = verdict("allocation", worst, 1e-12, "orthonormality of P_k, C_k; disjoint BS beam sets");
        if (overlaps > 0)
        {
            r.status = PropertyStatus::fail;
            r.detail += "; " + std::to_string(overlaps) + " shared beams";
        }
        return r;
    }

    PropertyResult check_selection_scale_invariance(std::uint64_t seed)
    {
        Rng rng = make_rng(derive_seed(seed, streams::validation, 6));
        std::uniform_real_distribution<double> u(0.0, 1.0);
        std::size_t changed = 0;
        for (int i = 0; i < 100; ++i)
        {
            RVector d(32);
            for (auto &x : d)
                x = u(rng);
            const BeamSet base = rank_beams(d);
            for (double c : {1e-6, 0.37, 3.0, 1e6})
                if (rank_beams(RVector(c * d)) != base)
                    ++changed;
        }
        return verdict("selection_scale_invariance", static_cast<double>(changed), 0.0,
                       "rankings changed by positive scaling, 400 cases");
    }

    PropertyResult check_reciprocity(std::uint64_t seed)
    {
        Rng rng = make_rng(derive_seed(seed, streams::validation, 7));
        double worst = 0.0;
        for (int i = 0; i < 50; ++i)
        {
            const Scene s = random_scene(rng, 16, 1, 4, uniform_index(rng, 1, 4));
            const auto setup = probe_setup(s, PilotMode::reused, uniform_index(rng, 1, 8), uniform_index(rng, 1, 4));
            const auto obs = probe(s.channels(), setup, 0.0, rng);
            worst = std::max(worst, relative_gap(obs[0].z_ul, obs[0].z_dl));
        }
        return verdict("reciprocity", worst, 1e-10, "noiseless single-user |z_ul - z_dl| / |z_dl|");
    }

    PropertyResult check_neutralization(std::uint64_t seed)
    {
        Rng rng = make_rng(derive_seed(seed, streams::validation, 8));
        double worst = 0.0;
        double worst_residual = 0.0;
        for (int i = 0; i < 50; ++i)
        {
            const std::size_t k = uniform_index(rng, 2, 3);
            const std::size_t n_paths = uniform_index(rng, 1, 3);
            const std::size_t m = 16, n = 4;
            const Scene s = disjoint_on_grid_scene(rng, m, k, n, n_paths);
            const auto setup = probe_setup(s, PilotMode::reused, n_paths, n_paths);
            const auto channels = s.channels();
            const auto obs = probe(channels, setup, 0.0, rng);
            for (std::size_t u = 0; u < k; ++u)
            {
                const auto alone = probe_alone(channels[u], setup, u, n, PilotMode::reused, n_paths, n_paths, m);
                const double scale = std::max(alone.z_dl.norm(), 1e-300);
                worst = std::max(worst, (obs[u].z_dl - obs[u].z_ul).norm() / scale);
                worst = std::max(worst, (obs[u].z_dl - alone.z_dl).norm() / scale);
                worst = std::max(worst, (obs[u].z_ul - alone.z_ul).norm() / scale);
                for (std::size_t j = 0; j < k; ++j)
                    if (j != u)
                        worst_residual = std::max(
                            worst_residual, neutralization_residual(setup.alloc.users[u].precoder_beam,
                                                                    setup.alloc.users[j].combiner_beam,
                                                                    s.covs[j].lambda_full));
            }
        }
        return verdict("neutralization", std::max(worst, worst_residual), 1e-10,
                       "disjoint on-grid reused probing: z_dl vs z_ul vs single-user (relative) and cross-user "
                       "residual; residual max " +
                           sci(worst_residual));
    }

    PropertyResult check_orthogonal_baseline(std::uint64_t seed)
    {
        Rng rng = make_rng(derive_seed(seed, streams::validation, 9));
        double worst = 0.0;
        for (int i = 0; i < 40; ++i)
        {
            const std::size_t k = uniform_index(rng, 2, 3);
            const std::size_t m = 8, n = 2;
            // Off-grid leakage makes the users' beam supports overlap.
            const Scene s = random_scene(rng, m, k, n, uniform_index(rng, 1, 3));
            const PilotMode mode = i % 2 == 0 ? PilotMode::orthogonal : PilotMode::orthogonal_reduced;
            const std::size_t m_e = mode == PilotMode::orthogonal ? m : uniform_index(rng, 1, m / k);
            const std::size_t n_e = mode == PilotMode::orthogonal ? n : uniform_index(rng, 1, n);
            const auto setup = probe_setup(s, mode, m_e, n_e);
            const auto channels = s.channels();
            const auto obs = probe(channels, setup, 0.0, rng);
            for (std::size_t u = 0; u < k; ++u)
            {
                const auto alone = probe_alone(channels[u], setup, u, n, mode, m_e, n_e, m);
                const double scale = std::max(1.0, alone.z_dl.norm());
                worst = std::max(worst, (obs[u].z_dl - alone.z_dl).norm() / scale);
                worst = std::max(worst, (obs[u].z_ul - alone.z_ul).norm() / scale);
            }
        }
        return verdict("orthogonal_baseline", worst, 1e-12,
                       "orthogonal pilots: multi-user vs single-user probing, |dz| / max(1, |z|)");
    }

    PropertyResult check_covariance_consistency(std::uint64_t seed, std::size_t rounds, double noise_power)
    {
        Rng rng = make_rng(derive_seed(seed, streams::validation, 10));
        const std::size_t m = 8, n = 2, k = 2, m_e = 3, n_e = 2;
        const Scene s = random_scene(rng, m, k, n, 3);
        const auto setup = probe_setup(s, PilotMode::reused, m_e, n_e);
        const RateInputs in = make_rate_inputs(s.covs, setup.alloc, setup.pilots, noise_power);
        const ObservationCovariances expected = assemble_observation_covariances(in, 0);

        const auto dim = expected.joint.rows();
        CMatrix acc = CMatrix::Zero(dim, dim);
        CVector z(dim);
        for (std::size_t r = 0; r < rounds; ++r)
        {
            Rng round_rng = make_rng(derive_seed(seed, streams::monte_carlo, r));
            std::vector<CMatrix> channels;
            for (std::size_t u = 0; u < k; ++u)
                channels.push_back(synthesize_channel(s.paths[u].with_fresh_gains(round_rng), ArrayGeometry{m},
                                                      ArrayGeometry{n}));
            const auto obs = probe(channels, setup, noise_power, round_rng);
            z << obs[0].z_dl, obs[0].z_ul;
            acc.noalias() += z * z.adjoint();
        }
        acc /= static_cast<double>(rounds);
        const double err = (acc - expected.joint).cwiseAbs().maxCoeff();
        const double dl_err = (acc.topLeftCorner(expected.r_dl.rows(), expected.r_dl.cols()) - expected.r_dl)
                                  .cwiseAbs()
                                  .maxCoeff();
        return verdict("covariance_consistency", err, 5e-2,
                       std::to_string(rounds) + " rounds, sigma^2=" + sci(noise_power) +
                           "; R_zdl max deviation " + sci(dl_err));
    }

    std::vector<PropertyResult> check_rates(std::uint64_t seed, std::size_t instances,
                                            const std::vector<double> &noise_powers)
    {
        std::vector<double> positive;
        for (double s2 : noise_powers)
            if (s2 > 0.0)
                positive.push_back(s2);
        const char *names[] = {"oracle_equivalence", "rate_nonnegativity", "rate_monotonicity"};
        const double tolerances[] = {1e-8, 1e-9, 1e-10};
        if (positive.empty())
        {
            std::vector<PropertyResult> out;
            for (int i = 0; i < 3; ++i)
            {
                PropertyResult r;
                r.name = names[i];
                r.status = PropertyStatus::skipped;
                r.tolerance = tolerances[i];
                r.detail = "needs a positive noise power";
                out.push_back(r);
            }
            return out;
        }

        double worst_rel = 0.0, most_negative = 0.0, worst_increase = 0.0;
        std::size_t evaluated = 0;
        std::vector<double> sweep(10);
        for (std::size_t j = 0; j < sweep.size(); ++j)
            sweep[j] = std::pow(10.0, -3.0 + 6.0 * static_cast<double>(j) / 9.0);

        try
        {
            for (std::size_t i = 0; i < instances; ++i)
            {
                Rng rng = make_rng(derive_seed(seed, streams::validation, 1000 + i));
                const std::size_t m = uniform_index(rng, 0, 1) == 0 ? 8 : 16;
                const std::size_t k = uniform_index(rng, 1, 3);
                const std::size_t n_paths = uniform_index(rng, 1, 3);
                const PilotMode mode = static_cast<PilotMode>(i % 3);
                const double s2 = positive[i % positive.size()];
                const Scene s = random_scene(rng, m, k, 2, n_paths);
                const std::size_t m_e = mode == PilotMode::orthogonal ? m : uniform_index(rng, 1, std::min<std::size_t>(4, m / k));
                const std::size_t n_e = mode == PilotMode::orthogonal ? 2 : uniform_index(rng, 1, 2);
                const auto setup = probe_setup(s, mode, m_e, n_e);

                const RateInputs sqrt_in = make_rate_inputs(s.covs, setup.alloc, setup.pilots, s2);
                const RateInputs low_in =
                    make_rate_inputs(s.covs, setup.alloc, setup.pilots, s2, RootKind::low_rank_factor);
                for (std::size_t u = 0; u < k; ++u)
                {
                    const double oracle =
                        gaussian_mi_oracle(brute_force_covariances(s.covs, setup.alloc, mode, s2, u)).bits;
                    const double denom = std::max(oracle, 1e-12);
                    for (const RateInputs *in : {&sqrt_in, &low_in})
                    {
                        const double rate = secret_key_rate(*in, u).bits;
                        worst_rel = std::max(worst_rel, std::abs(rate - oracle) / denom);
                        most_negative = std::min(most_negative, rate);
                    }
                    const auto rates = secret_key_rate_sweep(low_in, u, sweep);
                    for (std::size_t j = 1; j < rates.size(); ++j)
                        worst_increase = std::max(worst_increase, rates[j].bits - rates[j - 1].bits);
                    ++evaluated;
                }
            }
        }
        catch (const std::exception &e)
        {
            return {failure(names[0], tolerances[0], e), failure(names[1], tolerances[1], e),
                    failure(names[2], tolerances[2], e)};
        }

        const std::string count = std::to_string(instances) + " instances, " + std::to_string(evaluated) + " user rates";
        return {verdict(names[0], worst_rel, tolerances[0], "|closed form - oracle| / max(oracle, 1e-12), " + count),
                verdict(names[1], -most_negative, tolerances[1], "most negative rate, " + count),
                verdict(names[2], worst_increase, tolerances[2], "largest rate increase over a 10-point sigma^2 grid")};
    }

    PropertyResult check_determinism(std::uint64_t seed)
    {
        std::size_t mismatches = 0;
        {
            Rng a = make_rng(derive_seed(seed, streams::paths)), b = make_rng(derive_seed(seed, streams::paths));
            const PathSet pa = sample_paths(5, a, OffGrid{}), pb = sample_paths(5, b, OffGrid{});
            for (std::size_t i = 0; i < pa.size(); ++i)
            {
                const auto &x = pa.paths()[i], &y = pb.paths()[i];
                if (x.gain != y.gain || x.aoa != y.aoa || x.aod != y.aod || x.power != y.power)
                    ++mismatches;
            }
            const MonteCarloCovariance mc{500, seed};
            const auto ca = beam_covariances(pa, ArrayGeometry{8}, ArrayGeometry{2}, mc);
            const auto cb = beam_covariances(pb, ArrayGeometry{8}, ArrayGeometry{2}, mc);
            if (!same_bits(ca.lambda_full, cb.lambda_full) || !same_bits(ca.r_bs, cb.r_bs))
                ++mismatches;
        }
        {
            ScenarioConfig c = ScenarioConfig::single_user();
            c.bs_antennas = 16;
            c.ut_antennas = {2};
            c.paths = 2;
            c.m_e = 2;
            c.n_e = 2;
            c.m_e_variants = {2, 1};
            c.snr_db = {0, 10};
            c.trials = 4;
            c.seed = seed;
            c.workers = 1;
            const auto serial = run_single_user_rate(c);
            c.workers = 3;
            const auto threaded = run_single_user_rate(c);
            for (std::size_t i = 0; i < serial.curves.size(); ++i)
                if (serial.curves[i].user_rates != threaded.curves[i].user_rates ||
                    serial.curves[i].sum_rate != threaded.curves[i].sum_rate)
                    ++mismatches;
        }
        return verdict("determinism", static_cast<double>(mismatches), 0.0,
                       "bit mismatches across repeated seeded runs and worker counts");
    }

    ValidationReport run_validation_suite(const ValidationOptions &options)
    {
        ValidationReport report;
        auto guarded = [&](const char *name, double tol, auto &&fn) {
            try
            {
                report.properties.push_back(fn());
            }
            catch (const std::exception &e)
            {
                report.properties.push_back(failure(name, tol, e));
            }
        };
        const auto seed = options.seed;
        guarded("unitarity", 1e-12, [&] { return check_unitarity(options.corrupt_sampling_matrix); });
        guarded("norm_preservation", 1e-10, [&] { return check_norm_preservation(seed); });
        guarded("on_grid_sparsity", 1e-10, [&] { return check_on_grid_sparsity(seed); });
        guarded("covariance_psd", 1e-10, [&] { return check_covariance_psd(seed); });
        guarded("lambda_rank", 0.0, [&] { return check_lambda_rank(seed); });
        guarded("allocation", 1e-12, [&] { return check_allocation(seed); });
        guarded("selection_scale_invariance", 0.0, [&] { return check_selection_scale_invariance(seed); });
        guarded("reciprocity", 1e-10, [&] { return check_reciprocity(seed); });
        guarded("neutralization", 1e-10, [&] { return check_neutralization(seed); });
        guarded("orthogonal_baseline", 1e-12, [&] { return check_orthogonal_baseline(seed); });

        const auto positive = std::find_if(options.noise_powers.begin(), options.noise_powers.end(),
                                           [](double s2) { return s2 > 0.0; });
        if (positive == options.noise_powers.end())
        {
            PropertyResult r;
            r.name = "covariance_consistency";
            r.status = PropertyStatus::skipped;
            r.tolerance = 5e-2;
            r.detail = "needs a positive noise power";
            report.properties.push_back(r);
        }
        else
        {
            guarded("covariance_consistency", 5e-2,
                    [&] { return check_covariance_consistency(seed, options.covariance_rounds, *positive); });
        }
        for (auto &r : check_rates(seed, options.instances, options.noise_powers))
            report.properties.push_back(std::move(r));
        guarded("determinism", 0.0, [&] { return check_determinism(seed); });
        return report;
    }

    void write_report(std::ostream &os, const ValidationReport &report)
    {
        for (const auto &p : report.properties)
        {
            std::ostringstream line;
            line.precision(3);
            line << to_string(p.status) << ' ' << p.name << " measured=" << std::scientific << p.measured
                 << " tolerance=" << p.tolerance;
            if (!p.detail.empty())
                line << " (" << p.detail << ')';
            os << line.str() << '\n';
        }
        os << (report.passed() ? "validation passed" : "validation FAILED") << '\n';
    }
}
