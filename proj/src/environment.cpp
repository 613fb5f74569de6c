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

#include "gwtheta/environment.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <limits>
#include <sstream>

#include "gwtheta/errors.hpp"
#include "gwtheta/pgf.hpp"

namespace gwtheta {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

SeqValue plain(double v) {
    return {v, 1.0 - v, v <= 1.0 ? std::log1p(-v) : kNaN};
}

SeqValue with_complement(double v, double complement) {
    return {v, complement, complement >= 0.0 ? std::log(complement) : kNaN};
}

bool is_power_of_two(std::size_t n) { return n != 0 && std::has_single_bit(n); }

constexpr std::array<std::pair<Family, std::string_view>, 10> kFamilyNames{{
    {Family::harmonic, "harmonic"},
    {Family::convergent, "convergent"},
    {Family::proportional_c, "proportional_c"},
    {Family::negative_proportional_c, "negative_proportional_c"},
    {Family::alternating_ex3, "alternating_ex3"},
    {Family::superharmonic_ex4, "superharmonic_ex4"},
    {Family::dyadic_ex5, "dyadic_ex5"},
    {Family::exp_tail_ex6, "exp_tail_ex6"},
    {Family::constant, "constant"},
    {Family::table, "table"},
}};

std::string describe(double x) {
    std::ostringstream os;
    os.precision(17);
    os << x;
    return os.str();
}

}  // namespace

std::string_view to_string(CaseLabel label) {
    switch (label) {
        case CaseLabel::a: return "a";
        case CaseLabel::b: return "b";
        case CaseLabel::c: return "c";
        case CaseLabel::d: return "d";
        case CaseLabel::e: return "e";
        case CaseLabel::f: return "f";
    }
    return "?";
}

std::string_view to_string(Family family) {
    for (const auto& [f, name] : kFamilyNames)
        if (f == family) return name;
    return "?";
}

std::optional<Family> family_from_string(std::string_view name) {
    for (const auto& [f, n] : kFamilyNames)
        if (n == name) return f;
    return std::nullopt;
}

EnvSequence EnvSequence::harmonic() { return {Family::harmonic, {}}; }
EnvSequence EnvSequence::convergent() { return {Family::convergent, {}}; }
EnvSequence EnvSequence::proportional(double sigma) {
    return {Family::proportional_c, {{"sigma", sigma}}};
}
EnvSequence EnvSequence::negative_proportional(double sigma) {
    return {Family::negative_proportional_c, {{"sigma", sigma}}};
}
EnvSequence EnvSequence::alternating_ex3() { return {Family::alternating_ex3, {}}; }
EnvSequence EnvSequence::superharmonic_ex4() { return {Family::superharmonic_ex4, {}}; }
EnvSequence EnvSequence::dyadic_ex5() { return {Family::dyadic_ex5, {}}; }
EnvSequence EnvSequence::exp_tail(double sigma) { return {Family::exp_tail_ex6, {{"sigma", sigma}}}; }
EnvSequence EnvSequence::constant(double value) { return {Family::constant, {{"value", value}}}; }

EnvSequence EnvSequence::table(std::vector<double> values, TailRule tail) {
    if (values.empty()) throw RejectedParameter("table sequence must be non-empty", 0, "");
    EnvSequence seq{Family::table, {}};
    seq.table_ = std::move(values);
    seq.tail_ = tail;
    return seq;
}

EnvSequence EnvSequence::make(Family family, FamilyParams params, std::vector<double> table,
                              TailRule tail) {
    auto require = [&](std::string_view key) {
        if (!params.contains(key))
            throw RejectedParameter("family '" + std::string(to_string(family)) +
                                        "' requires parameter '" + std::string(key) + "'",
                                    0, "");
    };
    switch (family) {
        case Family::proportional_c:
        case Family::negative_proportional_c:
        case Family::exp_tail_ex6: require("sigma"); break;
        case Family::constant: require("value"); break;
        case Family::table: return EnvSequence::table(std::move(table), tail);
        default: break;
    }
    return {family, std::move(params)};
}

double EnvSequence::param(std::string_view name) const {
    auto it = params_.find(name);
    if (it == params_.end())
        throw RejectedParameter("missing family parameter '" + std::string(name) + "'", 0, "");
    return it->second;
}

bool EnvSequence::depends_on_a() const noexcept {
    return family_ == Family::proportional_c || family_ == Family::negative_proportional_c;
}

SeqValue EnvSequence::at(std::size_t n, Slot slot, const SeqValue* a_at_n) const {
    if (n == 0) throw DomainError("environment sequences are indexed from n = 1");
    const double x = static_cast<double>(n);
    switch (family_) {
        case Family::harmonic: return with_complement(x / (x + 1.0), 1.0 / (x + 1.0));
        case Family::convergent:
            return with_complement(x * (x + 3.0) / ((x + 1.0) * (x + 2.0)),
                                   2.0 / ((x + 1.0) * (x + 2.0)));
        case Family::proportional_c:
        case Family::negative_proportional_c: {
            if (slot != Slot::c || a_at_n == nullptr)
                throw RejectedParameter(std::string(to_string(family_)) +
                                            " is defined relative to a_n and only fits the c slot",
                                        0, "");
            const double sign = family_ == Family::proportional_c ? 1.0 : -1.0;
            return plain(sign * a_at_n->complement * param("sigma"));
        }
        case Family::alternating_ex3:
            if (slot == Slot::a) {
                if (n == 1) return plain(0.5);
                return n % 2 == 0 ? plain(4.0) : plain(0.25);
            }
            return n % 2 == 1 ? plain(1.0) : plain(2.0);
        case Family::superharmonic_ex4:
            if (slot == Slot::a) return with_complement((x + 1.0) / x, -1.0 / x);
            return plain(1.0 / (x * x * (x + 1.0)));
        case Family::dyadic_ex5:
            if (slot == Slot::a) {
                if (is_power_of_two(n + 1)) return plain(x);
                if (is_power_of_two(n) && n >= 2) return plain(1.0 / (x - 1.0));
                return plain(1.0);
            }
            if (is_power_of_two(n) && n > 2) return plain(1.0);
            return plain(1.0 / (x * x));
        case Family::exp_tail_ex6: {
            if (slot != Slot::c)
                throw RejectedParameter("exp_tail_ex6 only fits the c slot", 0, "");
            const double e = std::pow(x, param("sigma"));
            return {-std::expm1(-e), std::exp(-e), -e};
        }
        case Family::constant: return plain(param("value"));
        case Family::table: {
            if (n > table_.size()) {
                if (tail_ == TailRule::error)
                    throw RejectedParameter("table sequence exhausted", n,
                                            "table has " + std::to_string(table_.size()) +
                                                " entries and tail rule 'error'");
                return plain(table_.back());
            }
            return plain(table_[n - 1]);
        }
    }
    throw DomainError("unknown sequence family");
}

CaseLabel classify_parameters(double theta, double r) {
    if (!std::isfinite(theta) || !std::isfinite(r))
        throw RejectedParameter("theta and r must be finite", 0, "");
    if (theta == -1.0) throw RejectedParameter("theta = -1 is excluded", 0, "");
    if (!(theta > -1.0 && theta <= 1.0))
        throw RejectedParameter("theta must lie in (-1, 1]", 0, "theta=" + describe(theta));
    if (!(r >= 1.0)) throw RejectedParameter("r must be >= 1", 0, "r=" + describe(r));
    const bool unit = r == 1.0;
    if (theta > 0.0) return unit ? CaseLabel::a : CaseLabel::b;
    if (theta < 0.0) return unit ? CaseLabel::c : CaseLabel::d;
    return unit ? CaseLabel::e : CaseLabel::f;
}

namespace {

// Checks lo <= x <= hi with the closed-interval slack, reporting the row.
void check_between(double x, double lo, double hi, const char* row, std::size_t n,
                   const char* what) {
    const double slack_lo = kConstraintSlack * std::max(1.0, std::abs(lo));
    const double slack_hi = kConstraintSlack * std::max(1.0, std::abs(hi));
    if (!(x >= lo - slack_lo && x <= hi + slack_hi))
        throw RejectedParameter(std::string(row), n,
                                std::string(what) + "=" + describe(x) + " outside [" +
                                    describe(lo) + ", " + describe(hi) + "]");
}

void check_row(CaseLabel label, double theta, double r, const EnvPoint& p) {
    const double a = p.a;
    const double c = p.c;
    const std::size_t n = p.n;
    auto fail = [&](const char* row, const std::string& detail) {
        throw RejectedParameter(row, n, detail);
    };
    if (!std::isfinite(a) || !std::isfinite(c)) fail("a_n and c_n must be finite", "");
    if (label == CaseLabel::a) {
        if (!(a > 0.0)) fail("case (a) requires 0 < a_n < inf", "a_n=" + describe(a));
        if (!(c > 0.0)) fail("case (a) requires c_n > 0", "c_n=" + describe(c));
        if (!(c >= p.one_minus_a - kConstraintSlack))
            fail("case (a) requires c_n >= 1 - a_n",
                 "c_n=" + describe(c) + ", 1-a_n=" + describe(p.one_minus_a));
        return;
    }
    if (!(a > 0.0 && p.one_minus_a > 0.0))
        fail("cases (b)-(f) require 0 < a_n < 1", "a_n=" + describe(a));
    switch (label) {
        case CaseLabel::b:
            check_between(c, p.one_minus_a * std::pow(r, -theta),
                          p.one_minus_a * std::pow(r - 1.0, -theta),
                          "case (b) requires (1-a_n) r^-theta <= c_n <= (1-a_n) (r-1)^-theta", n,
                          "c_n");
            break;
        case CaseLabel::c:
            if (!(c > 0.0)) fail("case (c) requires 0 < c_n <= 1 - a_n", "c_n=" + describe(c));
            check_between(c, 0.0, p.one_minus_a, "case (c) requires 0 < c_n <= 1 - a_n", n, "c_n");
            break;
        case CaseLabel::d:
            check_between(c, p.one_minus_a * std::pow(r - 1.0, -theta),
                          p.one_minus_a * std::pow(r, -theta),
                          "case (d) requires (1-a_n) (r-1)^-theta <= c_n <= (1-a_n) r^-theta", n,
                          "c_n");
            break;
        case CaseLabel::e:
            if (!(c >= 0.0) || !std::isfinite(p.log_one_minus_c))
                fail("case (e) requires 0 <= c_n < 1", "c_n=" + describe(c));
            break;
        case CaseLabel::f:
            check_between(c, 0.0, 1.0, "case (f) requires 0 <= c_n <= 1", n, "c_n");
            break;
        case CaseLabel::a: break;
    }
}

}  // namespace

ThetaModel ThetaModel::validate(double theta, double r, EnvSequence a_seq, EnvSequence c_seq,
                                std::size_t check_horizon) {
    if (check_horizon < 1) throw DomainError("check_horizon must be >= 1");
    ThetaModel m;
    m.label_ = classify_parameters(theta, r);
    m.theta_ = theta;
    m.r_ = r;
    if (a_seq.depends_on_a())
        throw RejectedParameter(std::string(to_string(a_seq.family())) +
                                    " cannot define the a sequence",
                                0, "");
    m.a_seq_ = std::move(a_seq);
    m.c_seq_ = std::move(c_seq);
    for (std::size_t n = 1; n <= check_horizon; ++n) (void)m.at(n);
    m.checked_ = check_horizon;
    return m;
}

EnvPoint ThetaModel::at(std::size_t n) const {
    const SeqValue a = a_seq_.at(n, Slot::a);
    const SeqValue c = c_seq_.at(n, Slot::c, &a);
    EnvPoint p{n, a.value, a.complement, c.value, c.log_complement};
    check_row(label_, theta_, r_, p);
    return p;
}

double ThetaModel::log_r_minus_c(const EnvPoint& p) const {
    if (r_ == 1.0) return p.log_one_minus_c;
    return std::log(r_ - p.c);
}

bool ThetaModel::proper_up_to(std::size_t horizon) const {
    if (label_ == CaseLabel::a || label_ == CaseLabel::e) return true;
    if (label_ == CaseLabel::c) return false;
    for (std::size_t n = 1; n <= horizon; ++n) {
        const EnvPoint p = at(n);
        double equality = 0.0;
        if (label_ == CaseLabel::f)
            equality = 1.0;
        else
            equality = p.one_minus_a * std::pow(r_ - 1.0, -theta_);
        if (std::abs(p.c - equality) > kConstraintSlack * std::max(1.0, equality)) return false;
    }
    return true;
}

double step_pgf(const ThetaModel& model, std::size_t n, double s) {
    return ThetaPgf::step(model, n).eval(s);
}

}  // namespace gwtheta
