/*
   Copyright 2026 The gwtheta Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#pragma once

// Scenario registry for the ten worked examples and statistical
// verification of the limit theorems against them.
//
// Three kinds of checks:
//   analytic        exact F_n-based quantities against the theorem's limit or
//                   asymptotic expression (deterministic);
//   distributional  Monte Carlo against the limit law; the allowance is
//                   z standard errors plus the exact distance between the
//                   law of Z_n and its limit, so the test is of the sampler
//                   against the exact finite-n law and the theorem's limit
//                   enters only through a computed, not a tuned, bias term;
//   stabilization   fraction of paths frozen on [n/2, n], a necessary
//                   condition for almost-sure convergence.
// With z = 4 on at most 11 grid points (Bonferroni) and KS at level 1e-3,
// each distributional check fails falsely with probability below 1e-3.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gwtheta/classifier.hpp"
#include "gwtheta/environment.hpp"

namespace gwtheta {

struct Scenario {
    std::string id;
    std::string description;
    ThetaModel model;
    FamilyParams free_params;
    Regime expected_regime = Regime::undetermined;
    std::string expected_sub_label;
    std::string theorem_id;
    std::size_t mc_horizon = 100;
};

struct PlotRow {
    double x = 0.0;
    double empirical = 0.0;
    double theoretical = 0.0;
};

struct Check {
    std::string name;
    std::string kind;  // analytic | distributional | stabilization | divergence | classification
    double statistic = 0.0;
    double target = 0.0;
    double tolerance = 0.0;
    bool pass = false;
    /// Reported for reference; does not enter the overall verdict.
    bool informational = false;
    std::string note;
    std::vector<PlotRow> plot;
};

struct HarnessConfig {
    std::size_t replicates = 20000;
    std::optional<std::size_t> horizon;  // overrides each scenario's Monte Carlo horizon
    std::size_t analytic_horizon = 10000;
    std::uint64_t seed = 1;
    unsigned workers = 1;
    double z = 4.0;
    double ks_alpha = 1e-3;
    double analytic_rel_tol = 0.01;
    double limit_tol = 1e-6;
};

/// Below this many replicates the harness widens z to 6 and flags low power.
inline constexpr std::size_t kLowPowerReplicates = 1000;

struct VerificationReport {
    std::string scenario_id;
    std::string theorem_id;
    std::vector<Check> checks;
    std::size_t replicates = 0;
    std::vector<std::size_t> horizons;
    std::uint64_t seed = 0;
    bool low_power = false;

    bool pass() const;
    /// Smallest tolerance - |statistic - target| over the verdict checks.
    double worst_margin() const;
};

std::vector<Scenario> registry();
std::vector<std::string> scenario_ids();

/// Scenario `id` with free parameters overridden (theta, sigma, r).
/// Throws RejectedParameter when an override leaves the example's range.
Scenario make_scenario(std::string_view id, const FamilyParams& overrides = {});

/// Throws ScenarioInfeasible when the scenario's classification disagrees
/// with the theorem it is meant to illustrate.
VerificationReport verify_theorem(const Scenario& scenario, const HarnessConfig& config);

std::vector<VerificationReport> run_all(const HarnessConfig& config);

/// Rows (scenario, theorem, pass, worst_margin).
void write_summary_table(std::ostream& out, const std::vector<VerificationReport>& reports);
/// Rows (scenario, check, x, empirical, theoretical).
void write_plot_csv(std::ostream& out, const std::vector<VerificationReport>& reports);

}  // namespace gwtheta
