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

// Numeric limit detection for the composite constants and for the partial
// sums of the almost-sure convergence criteria.
//
// Deciding whether a sequence converges from finitely many terms is
// heuristic. The detector therefore returns a tri-state (plus "oscillating")
// together with the evidence it used, and refuses to guess:
//
//   determined   the checkpoints x_{N/2}, x_{3N/4}, x_N agree within tol, or
//                the sequence is monotone on [N/2, N] and two Aitken
//                extrapolations over the doublings N/8 -> N/4 -> N/2 -> N
//                agree within tol (algebraic rates of order n^-0.15 or
//                faster are resolved this way), or the sequence is positive
//                and shrinks by a stable factor below 0.9 per doubling
//                (power-law decay, limit 0);
//   infinite     monotone increasing with increments that do not decay
//                over doublings (logarithmic growth or faster), or
//                x_N > 1/tol and growing; for non-monotone sequences, the
//                window liminf itself diverges;
//   oscillating  non-monotone on [N/2, N] with liminf/limsup gap > 10 tol
//                (only reported when the caller allows it);
//   undetermined anything else.

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>

#include "gwtheta/environment.hpp"

namespace gwtheta {

enum class LimitStatus { determined, infinite, oscillating, undetermined, not_applicable };

std::string_view to_string(LimitStatus status);

struct LimitEvidence {
    std::string rule;
    std::array<std::size_t, 4> checkpoint_index{};  // N/8, N/4, N/2, N
    std::array<double, 4> checkpoint_value{};
    double window_liminf = 0.0;  // over [N/2, N]
    double window_limsup = 0.0;
    bool monotone = true;
    double extrapolated = 0.0;       // Aitken estimate from the last three checkpoints
    double extrapolated_prev = 0.0;  // ... and from the first three
};

struct LimitValue {
    LimitStatus status = LimitStatus::undetermined;
    double value = 0.0;  // meaningful when determined; +inf when infinite
    LimitEvidence evidence;

    bool determined() const noexcept { return status == LimitStatus::determined; }
    bool infinite() const noexcept { return status == LimitStatus::infinite; }
    /// Determined and within `eps` of zero.
    bool is_zero(double eps) const noexcept { return determined() && value <= eps; }
};

/// Detects the limit of xs[0], xs[1], ... (generation order). Sequences
/// shorter than 16 terms use their last four terms as checkpoints.
LimitValue detect_limit(std::span<const double> xs, double tol, bool allow_oscillating);

/// Limits of the composite constants.
struct LimitConstants {
    LimitValue A;
    LimitValue C;
    LimitValue D;       // theta == 0 only; not_applicable otherwise
    LimitValue B;
    LimitValue sum_AC;  // A_n + C_n, monotone in case (a)
    std::size_t horizon_used = 0;
    double tol = 0.0;
    /// Every checked index satisfies the equality making f_n(1) = 1 (cases b, d, f).
    bool proper_equality = false;
    bool exact_family = false;

    /// Threshold below which a determined limit is treated as zero.
    double zero_tol() const noexcept;
};

LimitConstants limit_constants(const ThetaModel& model, std::size_t horizon, double tol);

enum class TriState { holds, fails, undetermined };

std::string_view to_string(TriState t);

struct ConvergenceConditions {
    TriState church_lindvall = TriState::undetermined;
    double church_lindvall_sum = 0.0;
    double sum_one_minus_a = 0.0;
    TriState condition_a0 = TriState::undetermined;
    TriState condition_A1 = TriState::undetermined;
    double sum_A1 = 0.0;
    TriState tilde_cl = TriState::undetermined;
    double tilde_cl_sum = 0.0;
    std::size_t horizon = 0;
};

/// p_n(1) = f_n'(0), the probability of exactly one offspring at generation n.
double one_step_p1(const ThetaModel& model, std::size_t n);

ConvergenceConditions convergence_conditions(const ThetaModel& model, std::size_t horizon,
                                             double tol = 1e-6);

}  // namespace gwtheta
