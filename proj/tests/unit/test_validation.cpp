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

#include <catch_amalgamated.hpp>

#include <sstream>

using namespace beamkey;

namespace
{
    const PropertyResult &find(const ValidationReport &r, const std::string &name)
    {
        for (const auto &p : r.properties)
            if (p.name == name)
                return p;
        FAIL("missing property " << name);
        throw std::logic_error("unreachable");
    }

    ValidationOptions quick()
    {
        ValidationOptions o;
        o.instances = 20;
        return o;
    }
}

TEST_CASE("the validation suite passes on a healthy build", "[validation]")
{
    const ValidationReport r = run_validation_suite(quick());
    for (const auto &p : r.properties)
    {
        INFO(p.name << ": " << p.detail);
        REQUIRE(p.status == PropertyStatus::pass);
        REQUIRE(p.measured <= p.tolerance);
    }
    REQUIRE(r.passed());
    REQUIRE(r.properties.size() >= 14);

    std::ostringstream os;
    write_report(os, r);
    REQUIRE(os.str().find("PASS unitarity") != std::string::npos);
    REQUIRE(os.str().find("validation passed") != std::string::npos);
}

TEST_CASE("a corrupted sampling matrix fails unitarity", "[validation]")
{
    const PropertyResult bad = check_unitarity(true);
    REQUIRE(bad.status == PropertyStatus::fail);
    REQUIRE(bad.measured > 1e-3);
    REQUIRE(check_unitarity(false).status == PropertyStatus::pass);

    ValidationOptions o = quick();
    o.corrupt_sampling_matrix = true;
    const ValidationReport r = run_validation_suite(o);
    REQUIRE_FALSE(r.passed());
    REQUIRE(find(r, "unitarity").status == PropertyStatus::fail);
    std::ostringstream os;
    write_report(os, r);
    REQUIRE(os.str().find("validation FAILED") != std::string::npos);
}

TEST_CASE("rate properties are skipped without noise", "[validation]")
{
    const auto rates = check_rates(1, 5, {0.0});
    REQUIRE(rates.size() == 3);
    for (const auto &p : rates)
        REQUIRE(p.status == PropertyStatus::skipped);

    ValidationReport r;
    r.properties = rates;
    REQUIRE(r.passed());
    REQUIRE(to_string(PropertyStatus::skipped) == "SKIP");
}

TEST_CASE("individual properties", "[validation]")
{
    for (const PropertyResult &p :
         {check_norm_preservation(3), check_on_grid_sparsity(3), check_covariance_psd(3), check_lambda_rank(3),
          check_allocation(3), check_selection_scale_invariance(3), check_reciprocity(3), check_neutralization(3),
          check_orthogonal_baseline(3), check_determinism(3)})
    {
        INFO(p.name << ": " << p.detail);
        REQUIRE(p.status == PropertyStatus::pass);
    }
    const PropertyResult cov = check_covariance_consistency(3, 20000, 0.1);
    INFO(cov.detail);
    REQUIRE(cov.status == PropertyStatus::pass);
}
