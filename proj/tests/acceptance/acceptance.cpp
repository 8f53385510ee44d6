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

// Acceptance gate: one PASS/FAIL line per criterion.
//
//   beamkey_acceptance            run every criterion
//   beamkey_acceptance 3 5        run criteria 3 and 5
//
// Exit status is 0 when every selected criterion passes.

#include "beamkey/experiments.hpp"
#include "beamkey/validation.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>

using namespace beamkey;

namespace
{
    struct Outcome
    {
        bool pass = false;
        std::string detail;
    };

    using Clock = std::chrono::steady_clock;

    double seconds_since(Clock::time_point start)
    {
        return std::chrono::duration<double>(Clock::now() - start).count();
    }

    std::string fmt(const char *pattern, double value)
    {
        char buf[64];
        std::snprintf(buf, sizeof buf, pattern, value);
        return buf;
    }

    Outcome from_property(const PropertyResult &p)
    {
        return {p.status == PropertyStatus::pass,
                p.name + " measured=" + fmt("%.3g", p.measured) + " tolerance=" + fmt("%.3g", p.tolerance) + " (" +
                    p.detail + ")"};
    }

    /// Closed-form rate against the brute-force Gaussian MI on 200 small instances.
    Outcome criterion_1()
    {
        const auto start = Clock::now();
        const auto props = check_rates(1, 200, {0.01, 0.1, 1.0});
        const double elapsed = seconds_since(start);
        Outcome o = from_property(props.front());
        o.pass = o.pass && elapsed < 30.0;
        o.detail += ", " + fmt("%.2f s", elapsed) + " (limit 30 s)";
        return o;
    }

    Outcome criterion_2()
    {
        const ScenarioConfig c = ScenarioConfig::multi_user();
        const auto ut = c.ut_antenna_list();
        const std::size_t t_ta = pilot_overhead(PilotMode::orthogonal, c.bs_antennas, ut, c.m_e, c.n_e);
        const std::size_t t_pa = pilot_overhead(PilotMode::reused, c.bs_antennas, ut, c.m_e, c.n_e);
        return {t_ta == 152 && t_pa == 10,
                "T_TA=" + std::to_string(t_ta) + " (expect 152), T_PA=" + std::to_string(t_pa) + " (expect 10)"};
    }

    Outcome criterion_3()
    {
        const auto start = Clock::now();
        const ExperimentResult r = run_single_user_rate(ScenarioConfig::single_user());
        const double elapsed = seconds_since(start);
        const auto perfect = r.curve(curves::perfect);
        const auto me6 = r.curve(curves::designed(6));
        const auto me4 = r.curve(curves::designed(4));
        bool ordered = true;
        for (std::size_t i = 0; i < perfect.size(); ++i)
            ordered = ordered && perfect[i].sum_rate >= me6[i].sum_rate && me6[i].sum_rate >= me4[i].sum_rate;
        const double ratio = me6.back().sum_rate / perfect.back().sum_rate;
        return {ordered && ratio >= 0.9 && elapsed < 300.0,
                std::string("ordering perfect >= me6 >= me4 ") + (ordered ? "holds" : "VIOLATED") +
                    ", me6/perfect at " + fmt("%g dB", perfect.back().snr_db) + " = " + fmt("%.4f", ratio) +
                    " (need >= 0.9), " + fmt("%.1f s", elapsed) + " (limit 300 s)"};
    }

    Outcome criterion_4()
    {
        const auto start = Clock::now();
        const ExperimentResult r = run_multiuser_unit_rate(ScenarioConfig::multi_user());
        const double elapsed = seconds_since(start);
        const auto me6 = r.curve(curves::reused(6));
        const auto me4 = r.curve(curves::reused(4));
        const auto orth = r.curve(curves::orthogonal);
        bool ordered = true;
        std::size_t checked = 0;
        std::ostringstream worst;
        for (std::size_t i = 0; i < me6.size(); ++i)
        {
            if (me6[i].snr_db < 0.0)
                continue;
            ++checked;
            if (!(me6[i].unit_rate > me4[i].unit_rate && me4[i].unit_rate > orth[i].unit_rate))
            {
                ordered = false;
                worst << " violated at " << me6[i].snr_db << " dB;";
            }
        }
        const auto top = me6.size() - 1;
        return {ordered && checked > 0 && elapsed < 600.0,
                std::string("me6 > me4 > orthogonal ") + (ordered ? "holds" : "VIOLATED") + " at " +
                    std::to_string(checked) + " SNR points >= 0 dB;" + worst.str() + " at " +
                    fmt("%g dB", me6[top].snr_db) + ": " + fmt("%.4f", me6[top].unit_rate) + " > " +
                    fmt("%.4f", me4[top].unit_rate) + " > " + fmt("%.4f", orth[top].unit_rate) + " bits/round, " +
                    fmt("%.1f s", elapsed) + " (limit 600 s)"};
    }

    Outcome criterion_5()
    {
        const ExperimentResult r = run_beam_gain_profile(ScenarioConfig::multi_user());
        std::size_t below = 0;
        double worst = 1.0, mean = 0.0;
        for (const auto &c : r.captures)
        {
            below += c.fraction < 0.8 ? 1 : 0;
            worst = std::min(worst, c.fraction);
            mean += c.fraction;
        }
        mean /= static_cast<double>(r.captures.size());
        const double median_db = median_attenuation_db(r);
        return {below == 0 && median_db >= 15.0,
                "top-6 capture >= 0.8 for " + std::to_string(r.captures.size() - below) + "/" +
                    std::to_string(r.captures.size()) + " users (mean " + fmt("%.3f", mean) + ", min " +
                    fmt("%.3f", worst) + "); median adjacent attenuation " + fmt("%.1f dB", median_db) +
                    " (need >= 15 dB)"};
    }

    Outcome criterion_6() { return from_property(check_neutralization(1)); }

    Outcome criterion_7() { return from_property(check_covariance_consistency(1, 100000, 0.1)); }

    Outcome criterion_8()
    {
        const ValidationReport report = run_validation_suite(ValidationOptions{});
        std::size_t passed = 0;
        std::string failed;
        for (const auto &p : report.properties)
        {
            if (p.status == PropertyStatus::pass)
                ++passed;
            else
                failed += " " + p.name + "=" + std::string(to_string(p.status));
        }
        return {report.passed() && passed == report.properties.size(),
                std::to_string(passed) + "/" + std::to_string(report.properties.size()) + " properties pass" +
                    (failed.empty() ? "" : ";" + failed)};
    }
}

int main(int argc, char **argv)
{
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"oracle equivalence", criterion_1},
        {"pilot overhead", criterion_2},
        {"single-user rate ordering", criterion_3},
        {"multi-user unit rate ordering", criterion_4},
        {"beam concentration", criterion_5},
        {"reciprocity and neutralization", criterion_6},
        {"covariance consistency", criterion_7},
        {"property suite", criterion_8},
    };

    std::set<std::size_t> selected;
    for (int i = 1; i < argc; ++i)
    {
        const std::string arg = argv[i];
        std::size_t n = 0;
        try
        {
            n = std::stoul(arg);
        }
        catch (const std::exception &)
        {
        }
        if (n < 1 || n > criteria.size())
        {
            std::cerr << "usage: beamkey_acceptance [criterion 1-" << criteria.size() << "]...\n";
            return 2;
        }
        selected.insert(n);
    }
    if (selected.empty())
        for (std::size_t n = 1; n <= criteria.size(); ++n)
            selected.insert(n);

    bool all = true;
    for (std::size_t n : selected)
    {
        Outcome o;
        try
        {
            o = criteria[n - 1].second();
        }
        catch (const std::exception &e)
        {
            o = {false, std::string("exception: ") + e.what()};
        }
        all = all && o.pass;
        std::cout << "criterion " << n << " [" << criteria[n - 1].first << "]: " << (o.pass ? "PASS" : "FAIL")
                  << " - " << o.detail << std::endl;
    }
    return all ? 0 : 1;
}
