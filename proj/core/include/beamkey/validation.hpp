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

#include "beamkey/config.hpp"
#include "beamkey/key_rate.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace beamkey
{
    enum class PropertyStatus
    {
        pass,
        fail,
        skipped
    };

    std::string_view to_string(PropertyStatus status);

    /// One checked property: the worst measured deviation against its
    /// tolerance (both in the property's own units).
    struct PropertyResult
    {
        std::string name;
        PropertyStatus status = PropertyStatus::pass;
        double measured = 0.0;
        double tolerance = 0.0;
        std::string detail;
    };

    struct ValidationOptions
    {
        std::uint64_t seed = 1;
        std::size_t instances = 200;                  // random instances for the rate properties
        std::vector<double> noise_powers{0.01, 0.1, 1.0};
        std::size_t covariance_rounds = 20000;        // Monte Carlo probing rounds
        bool corrupt_sampling_matrix = false;         // fault injection for the unitarity check
    };

    struct ValidationReport
    {
        std::vector<PropertyResult> properties;

        bool passed() const; // no property failed
    };

    /// Runs every property at small scale. Rate properties that need a
    /// positive noise power are reported as skipped when none is requested.
    ValidationReport run_validation_suite(const ValidationOptions &options);

    /// One line per property: "PASS name measured=... tolerance=... detail".
    void write_report(std::ostream &os, const ValidationReport &report);

    // Individual properties, shared with the acceptance binary.

    /// max|A^H A - I| over n in {1, 2, 4, ..., 256}.
    PropertyResult check_unitarity(bool corrupt_sampling_matrix);
    PropertyResult check_norm_preservation(std::uint64_t seed);
    PropertyResult check_on_grid_sparsity(std::uint64_t seed);
    /// Lambda Hermitian PSD and diag(R~_BS) summing to the total path power.
    PropertyResult check_covariance_psd(std::uint64_t seed);
    PropertyResult check_lambda_rank(std::uint64_t seed);
    /// Disjoint BS beam sets and orthonormal P_k, C_k.
    PropertyResult check_allocation(std::uint64_t seed);
    PropertyResult check_selection_scale_invariance(std::uint64_t seed);
    PropertyResult check_reciprocity(std::uint64_t seed);
    /// Noiseless reused probing with disjoint on-grid allocations: z_dl = z_ul,
    /// multi-user equals single-user probing, and every cross-user residual
    /// (P~_k^T (x) C~_k'^H) Lambda_k' vanishes.
    PropertyResult check_neutralization(std::uint64_t seed);
    PropertyResult check_orthogonal_baseline(std::uint64_t seed);
    /// Empirical covariance of [z_dl; z_ul] over `rounds` probing rounds
    /// against the assembled joint covariance, entrywise.
    PropertyResult check_covariance_consistency(std::uint64_t seed, std::size_t rounds, double noise_power);
    /// Closed-form rate against a brute-force Gaussian MI built directly from Lambda;
    /// also returns nonnegativity and monotonicity in the noise power.
    std::vector<PropertyResult> check_rates(std::uint64_t seed, std::size_t instances,
                                            const std::vector<double> &noise_powers);
    PropertyResult check_determinism(std::uint64_t seed);
}
