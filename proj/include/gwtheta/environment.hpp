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

// Parametric environment of a theta-branching process: the fixed pair
// (theta, r) and the generation-indexed sequences (a_n, c_n).
//
// Sequences are pure functions of the generation index, so arbitrarily long
// horizons cost no memory. Each family reports, besides its value, the
// complement 1 - x and log(1 - x) computed without cancellation where the
// family has a closed form for them (e.g. 1 - a_n = 1/(n+1) for the harmonic
// family, log(1 - c_n) = -n^sigma for the exponential-tail family).

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace gwtheta {

enum class CaseLabel { a, b, c, d, e, f };

std::string_view to_string(CaseLabel label);

enum class Family {
    harmonic,
    convergent,
    proportional_c,
    negative_proportional_c,
    alternating_ex3,
    superharmonic_ex4,
    dyadic_ex5,
    exp_tail_ex6,
    constant,
    table,
};

std::string_view to_string(Family family);
std::optional<Family> family_from_string(std::string_view name);

/// Which parameter a sequence feeds; some families take different values per slot.
enum class Slot { a, c };

enum class TailRule { repeat_last, error };

using FamilyParams = std::map<std::string, double, std::less<>>;

/// Value of a sequence at one index, with its complement evaluated accurately.
struct SeqValue {
    double value = 0.0;
    double complement = 1.0;      // 1 - value
    double log_complement = 0.0;  // log(1 - value); NaN when value > 1
};

class EnvSequence {
public:
    EnvSequence() = default;

    static EnvSequence harmonic();
    static EnvSequence convergent();
    static EnvSequence proportional(double sigma);
    static EnvSequence negative_proportional(double sigma);
    static EnvSequence alternating_ex3();
    static EnvSequence superharmonic_ex4();
    static EnvSequence dyadic_ex5();
    static EnvSequence exp_tail(double sigma);
    static EnvSequence constant(double value);
    static EnvSequence table(std::vector<double> values, TailRule tail = TailRule::repeat_last);

    /// Generic constructor used by the JSON reader; checks that the required
    /// parameters are present.
    static EnvSequence make(Family family, FamilyParams params, std::vector<double> table = {},
                            TailRule tail = TailRule::repeat_last);

    Family family() const noexcept { return family_; }
    const FamilyParams& params() const noexcept { return params_; }
    const std::vector<double>& table_values() const noexcept { return table_; }
    TailRule tail_rule() const noexcept { return tail_; }

    /// Value at generation n >= 1. `a_at_n` is the a-sequence at the same
    /// index; only the c-slot families defined relative to a_n read it.
    SeqValue at(std::size_t n, Slot slot, const SeqValue* a_at_n = nullptr) const;

    bool depends_on_a() const noexcept;

    friend bool operator==(const EnvSequence&, const EnvSequence&) = default;

private:
    EnvSequence(Family family, FamilyParams params) : family_(family), params_(std::move(params)) {}

    double param(std::string_view name) const;

    Family family_ = Family::constant;
    FamilyParams params_{{"value", 1.0}};
    std::vector<double> table_;
    TailRule tail_ = TailRule::repeat_last;
};

/// The environment at one generation, as seen by the analytics.
struct EnvPoint {
    std::size_t n = 0;
    double a = 0.0;
    double one_minus_a = 0.0;
    double c = 0.0;
    double log_one_minus_c = 0.0;
};

/// Slack applied to the closed bounds of the admissible rows.
inline constexpr double kConstraintSlack = 1e-12;

/// A validated parameter set (theta, r, a_n, c_n) with its case label.
///
/// Validation is eager up to `checked_horizon()`; every later call to `at(n)`
/// re-checks the row constraints for that index, so an invalid tail cannot
/// leak into downstream computations.
class ThetaModel {
public:
    static ThetaModel validate(double theta, double r, EnvSequence a_seq, EnvSequence c_seq,
                               std::size_t check_horizon);

    double theta() const noexcept { return theta_; }
    double r() const noexcept { return r_; }
    CaseLabel case_label() const noexcept { return label_; }
    const EnvSequence& a_seq() const noexcept { return a_seq_; }
    const EnvSequence& c_seq() const noexcept { return c_seq_; }
    std::size_t checked_horizon() const noexcept { return checked_; }

    /// Environment at generation n >= 1; throws RejectedParameter when the
    /// pair (a_n, c_n) violates the model's row.
    EnvPoint at(std::size_t n) const;

    /// log(r - c_n), exact for r == 1 via the sequence's log-complement.
    double log_r_minus_c(const EnvPoint& p) const;

    /// True when f_n(1) == 1 at every n <= horizon (always true in cases a and e).
    bool proper_up_to(std::size_t horizon) const;

    friend bool operator==(const ThetaModel&, const ThetaModel&) = default;

private:
    ThetaModel() = default;

    double theta_ = 1.0;
    double r_ = 1.0;
    CaseLabel label_ = CaseLabel::a;
    EnvSequence a_seq_;
    EnvSequence c_seq_;
    std::size_t checked_ = 0;
};

/// Case label of (theta, r) alone; throws RejectedParameter outside every row.
CaseLabel classify_parameters(double theta, double r);

/// One-step generating function f_n(s) on [0, r].
double step_pgf(const ThetaModel& model, std::size_t n, double s);

}  // namespace gwtheta
