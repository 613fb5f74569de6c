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

#include "gwtheta/classifier.hpp"

#include <array>
#include <utility>

namespace gwtheta {

namespace {

constexpr std::array<std::pair<Regime, std::string_view>, 8> kRegimeNames{{
    {Regime::supercritical, "supercritical"},
    {Regime::asymptotically_degenerate, "asymptotically_degenerate"},
    {Regime::critical, "critical"},
    {Regime::strictly_subcritical, "strictly_subcritical"},
    {Regime::loosely_subcritical, "loosely_subcritical"},
    {Regime::infinite_mean, "infinite_mean"},
    {Regime::defective, "defective"},
    {Regime::undetermined, "undetermined"},
}};

RegimeLabel label(Regime regime, std::string basis, std::string sub = {}) {
    RegimeLabel out;
    out.regime = regime;
    out.basis = std::move(basis);
    out.sub_label = std::move(sub);
    return out;
}

RegimeLabel classify_proper_theta(const LimitConstants& lim) {
    const double eps = lim.zero_tol();
    if (lim.C.determined()) {
        if (lim.A.is_zero(eps)) return label(Regime::supercritical, "C<inf and A_n->0");
        if (lim.A.determined()) return label(Regime::asymptotically_degenerate, "C<inf and A_n->A in (0,inf)");
        if (lim.A.infinite()) return label(Regime::strictly_subcritical, "C<inf and A_n->inf, so B_n->0");
        return label(Regime::undetermined, "C<inf but lim A_n is " + std::string(to_string(lim.A.status)));
    }
    if (lim.C.infinite()) {
        switch (lim.B.status) {
            case LimitStatus::infinite: return label(Regime::critical, "C=inf and B_n->inf");
            case LimitStatus::determined: return label(Regime::strictly_subcritical, "C=inf and B_n->B<inf");
            case LimitStatus::oscillating:
                return label(Regime::loosely_subcritical, "C=inf and lim B_n does not exist");
            default: return label(Regime::undetermined, "C=inf but lim B_n is undetermined");
        }
    }
    return label(Regime::undetermined, "lim C_n is undetermined");
}

RegimeLabel classify_infinite_mean(const LimitConstants& lim) {
    const double eps = lim.zero_tol();
    if (!lim.A.determined() || !lim.D.determined())
        return label(Regime::undetermined, "theta=0, r=1 needs determined limits A and D");
    const bool a_zero = lim.A.is_zero(eps);
    const bool d_zero = lim.D.is_zero(eps);
    if (a_zero && d_zero) return label(Regime::infinite_mean, "A=0 and D=0", "i");
    if (a_zero) return label(Regime::infinite_mean, "A=0 and D>0", "ii");
    if (d_zero) return label(Regime::infinite_mean, "A in (0,1) and D=0", "iii");
    return label(Regime::infinite_mean, "A in (0,1) and D>0", "iv");
}

RegimeLabel classify_defective(const ThetaModel& model, const LimitConstants& lim) {
    const double eps = lim.zero_tol();
    const bool log_form = model.theta() == 0.0;
    if (!lim.A.determined() || (log_form ? !lim.D.determined() : !lim.C.determined()))
        return label(Regime::undetermined,
                     log_form ? "defective case needs determined limits A and D"
                              : "defective case needs determined limits A and C");
    RegimeLabel out = lim.A.is_zero(eps) ? label(Regime::defective, "A=0", "i")
                                         : label(Regime::defective, "A in (0,1)", "ii");
    if (lim.proper_equality) {
        out.proper_subcase = true;
        out.basis += log_form ? " with c_n=1 at every n" : " with c_n=(1-a_n)(r-1)^-theta at every n";
    }
    return out;
}

}  // namespace

std::string_view to_string(Regime regime) {
    for (const auto& [r, name] : kRegimeNames)
        if (r == regime) return name;
    return "?";
}

std::optional<Regime> regime_from_string(std::string_view name) {
    for (const auto& [r, n] : kRegimeNames)
        if (n == name) return r;
    return std::nullopt;
}

std::string_view to_string(Confidence c) {
    return c == Confidence::exact_family ? "exact_family" : "numeric";
}

std::string RegimeLabel::theorem_id() const {
    switch (regime) {
        case Regime::supercritical: return "T1";
        case Regime::asymptotically_degenerate: return "T2";
        case Regime::critical: return "T3";
        case Regime::strictly_subcritical: return "T4";
        case Regime::loosely_subcritical: return "T5";
        case Regime::infinite_mean: return "T6(" + sub_label + ")";
        case Regime::defective: {
            const std::string base = [&] {
                switch (evidence_case) {
                    case CaseLabel::b: return std::string("T7");
                    case CaseLabel::d: return std::string("T8");
                    case CaseLabel::f: return std::string("T9");
                    default: return std::string("T10");
                }
            }();
            return base + (proper_subcase ? "-cor(" : "(") + sub_label + ")";
        }
        case Regime::undetermined: return {};
    }
    return {};
}

RegimeLabel classify(const ThetaModel& model, const LimitConstants& limits) {
    RegimeLabel out;
    switch (model.case_label()) {
        case CaseLabel::a: out = classify_proper_theta(limits); break;
        case CaseLabel::e: out = classify_infinite_mean(limits); break;
        default: out = classify_defective(model, limits); break;
    }
    out.evidence = limits;
    out.evidence_case = model.case_label();
    out.confidence = limits.exact_family ? Confidence::exact_family : Confidence::numeric;
    return out;
}

}  // namespace gwtheta
