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

#include "gwtheta/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "gwtheta/classifier.hpp"
#include "gwtheta/errors.hpp"

namespace gwtheta {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Kahan {
    double sum = 0.0;
    double comp = 0.0;
    void add(double x) {
        const double y = x - comp;
        const double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
};

double clamp01(double x) { return std::clamp(x, 0.0, 1.0); }

}  // namespace

double CompositeConstants::D() const { return std::exp(log_D); }

ConstantsTable::ConstantsTable(const ThetaModel& model, std::size_t horizon) {
    rows_.reserve(horizon + 1);
    CompositeConstants k;
    rows_.push_back(k);
    Kahan c_sum;
    Kahan log_d_sum;
    const bool log_form = model.theta() == 0.0;
    for (std::size_t n = 1; n <= horizon; ++n) {
        const EnvPoint p = model.at(n);
        const double a_prev = k.A;
        c_sum.add(a_prev * p.c);
        if (log_form) log_d_sum.add(a_prev * p.one_minus_a * model.log_r_minus_c(p));
        k.n = n;
        k.A = a_prev * p.a;
        k.C = c_sum.sum;
        k.log_D = log_form ? log_d_sum.sum : 0.0;
        k.B = k.A > 0.0 ? k.C / k.A : kInf;
        rows_.push_back(k);
    }
}

CompositeConstants composite_constants(const ThetaModel& model, std::size_t n) {
    return ConstantsTable(model, n)[n];
}

double composed_pgf(const ThetaModel& model, std::size_t n, double s) {
    if (n == 0) {
        if (!(s >= 0.0 && s <= model.r())) throw DomainError("argument outside [0, r]");
        return s;
    }
    return ThetaPgf::composite(model, composite_constants(model, n)).eval(s);
}

SurvivalMoments survival_and_moments(const ThetaModel& model, const CompositeConstants& k) {
    const ThetaPgf g = ThetaPgf::composite(model, k);
    SurvivalMoments m;
    m.p_zero = g.eval(0.0);
    m.p_alive = g.increment(0.0, 1.0);
    m.p_delta = g.defect();
    m.mean_restricted = g.derivative_at_one();
    m.mean_infinite = std::isinf(m.mean_restricted);
    m.mean_conditional = m.mean_infinite ? kInf : m.mean_restricted / m.p_alive;
    return m;
}

SurvivalMoments survival_and_moments(const ThetaModel& model, std::size_t n) {
    return survival_and_moments(model, composite_constants(model, n));
}

double conditional_pgf(const ThetaModel& model, std::size_t n, double s) {
    if (!(s >= 0.0 && s <= 1.0)) throw DomainError("conditional pgf argument outside [0, 1]");
    const ThetaPgf g = ThetaPgf::composite(model, composite_constants(model, n));
    const double alive = g.increment(0.0, 1.0);
    if (!(alive > 1e-300))
        throw ConditioningOnNull("P(tau > " + std::to_string(n) + ") vanishes");
    if (s == 1.0) return 1.0;
    return g.increment(0.0, s) / alive;
}

AbsorptionProbabilities absorption_by(const ThetaModel& model, std::size_t n) {
    const ThetaPgf g = ThetaPgf::composite(model, composite_constants(model, n));
    AbsorptionProbabilities out;
    out.q = g.eval(0.0);
    out.q_delta = g.defect();
    out.Q = out.q + out.q_delta;
    return out;
}

AbsorptionProbabilities absorption_probabilities(const ThetaModel& model,
                                                 const LimitConstants& limits) {
    const double theta = model.theta();
    const double r = model.r();
    AbsorptionProbabilities out;
    switch (model.case_label()) {
        case CaseLabel::a: {
            double total;
            if (limits.sum_AC.determined() || limits.sum_AC.infinite()) {
                total = limits.sum_AC.value;
            } else if (limits.C.infinite()) {
                total = kInf;
            } else {
                throw UndeterminedLimit("q needs lim (A_n + C_n), which is undetermined");
            }
            out.q = 1.0 - std::pow(total, -1.0 / theta);
            break;
        }
        case CaseLabel::b:
        case CaseLabel::c:
        case CaseLabel::d: {
            if (!limits.A.determined() || !limits.C.determined())
                throw UndeterminedLimit("q and q_delta need determined limits A and C");
            const double A = limits.A.value;
            const double C = limits.C.value;
            out.q = r - std::pow(A * std::pow(r, -theta) + C, -1.0 / theta);
            out.q_delta = 1.0 - r + std::pow(A * std::pow(r - 1.0, -theta) + C, -1.0 / theta);
            break;
        }
        case CaseLabel::e: {
            if (!limits.D.determined()) throw UndeterminedLimit("q needs a determined limit D");
            out.q = 1.0 - limits.D.value;
            break;
        }
        case CaseLabel::f: {
            if (!limits.A.determined() || !limits.D.determined())
                throw UndeterminedLimit("q and q_delta need determined limits A and D");
            const double A = limits.A.value;
            const double D = limits.D.value;
            out.q = r - std::pow(r, A) * D;
            out.q_delta = 1.0 - r + std::pow(r - 1.0, A) * D;
            break;
        }
    }
    out.q = clamp01(out.q);
    out.q_delta = clamp01(out.q_delta);
    out.Q = std::min(1.0, out.q + out.q_delta);
    return out;
}

std::string_view to_string(TransformKind k) {
    switch (k) {
        case TransformKind::laplace_transform: return "laplace_transform";
        case TransformKind::pgf: return "pgf";
        case TransformKind::cdf: return "cdf";
        case TransformKind::constant: return "constant";
    }
    return "?";
}

std::string_view to_string(ScalingKind k) {
    switch (k) {
        case ScalingKind::none: return "none";
        case ScalingKind::linear: return "linear";
        case ScalingKind::log_linear: return "log_linear";
    }
    return "?";
}

std::string_view to_string(Conditioning c) {
    return c == Conditioning::none ? "none" : "survival";
}

double Scaling::factor_at(double theta, const CompositeConstants& k) const {
    switch (factor) {
        case Factor::one: return 1.0;
        case Factor::a_pow_inv_theta: return std::pow(k.A, 1.0 / theta);
        case Factor::b_pow_neg_inv_theta: return std::pow(k.B, -1.0 / theta);
        case Factor::a: return k.A;
        case Factor::custom: return custom_factor;
    }
    return 1.0;
}

double LimitLawDescriptor::param(std::string_view name) const {
    const auto it = parameters.find(name);
    if (it == parameters.end())
        throw DomainError("limit law " + theorem_id + " has no parameter " + std::string(name));
    return it->second;
}

double LimitLawDescriptor::evaluate(double x) const {
    using F = Form;
    if (kind == TransformKind::laplace_transform && x < 0.0)
        throw DomainError("Laplace argument must be nonnegative");
    if (kind == TransformKind::pgf && !(x >= 0.0 && x <= 1.0))
        throw DomainError("pgf argument outside [0, 1]");
    switch (form) {
        case F::laplace_supercritical: {
            const double theta = param("theta");
            return 1.0 - std::pow(std::pow(x, -theta) + param("C"), -1.0 / theta);
        }
        case F::laplace_critical: {
            const double theta = param("theta");
            return 1.0 - std::pow(1.0 + std::pow(x, -theta), -1.0 / theta);
        }
        case F::conditional_ratio: {
            if (x == 1.0) return 1.0;
            const double theta = param("theta");
            const double B = param("B");
            return 1.0 - std::pow((std::pow(1.0 - x, -theta) + B) / (1.0 + B), -1.0 / theta);
        }
        case F::theta_pgf:
            return ThetaPgf::general(param("theta"), param("r"), param("A"), param("C")).eval(x);
        case F::log_pgf:
            return ThetaPgf::log_form(param("r"), param("A"), param("log_D")).eval(x);
        case F::exp_cdf: {
            const double D = param("D");
            if (x < 0.0) return 1.0 - D;
            return 1.0 - D * std::exp(-x);
        }
        case F::conditional_power:
            return 1.0 - std::pow(1.0 - x, param("A"));
        case F::defective_conditional: {
            const double theta = param("theta");
            const double r = param("r");
            const double base = std::pow(r, -theta);
            return (std::pow(r - x, -theta) - base) / (std::pow(r - 1.0, -theta) - base);
        }
        case F::log_conditional: {
            const double r = param("r");
            return (std::log(r) - std::log(r - x)) / (std::log(r) - std::log(r - 1.0));
        }
    }
    return 0.0;
}

double defective_conditional_mean_limit(double theta, double r) {
    if (theta == 0.0) return 1.0 / ((r - 1.0) * (std::log(r) - std::log(r - 1.0)));
    if (r == 1.0) return theta < 0.0 ? kInf : 0.0;
    return theta * std::pow(r - 1.0, -theta - 1.0) /
           (std::pow(r - 1.0, -theta) - std::pow(r, -theta));
}

double defective_survival_constant(double theta, double r, double C) {
    if (theta == 0.0) return std::log(r) - std::log(r - 1.0);
    return (std::pow(r - 1.0, -theta) - std::pow(r, -theta)) / theta *
           std::pow(C, -1.0 / theta - 1.0);
}

namespace {

LimitLawDescriptor critical_law(double theta, std::string id) {
    LimitLawDescriptor d;
    d.theorem_id = std::move(id);
    d.kind = TransformKind::laplace_transform;
    d.form = LimitLawDescriptor::Form::laplace_critical;
    d.parameters = {{"theta", theta}};
    d.scaling = {ScalingKind::linear, Scaling::Factor::b_pow_neg_inv_theta, 1.0,
                 Conditioning::survival, "B_n^(-1/theta) Z_n | Z_n > 0"};
    return d;
}

LimitLawDescriptor subcritical_law(double theta, double B, std::string id) {
    LimitLawDescriptor d;
    d.theorem_id = std::move(id);
    d.kind = TransformKind::pgf;
    d.form = LimitLawDescriptor::Form::conditional_ratio;
    d.parameters = {{"theta", theta},
                    {"B", B},
                    {"conditional_mean_limit", std::pow(1.0 + B, 1.0 / theta)},
                    {"survival_constant", std::pow(1.0 + B, -1.0 / theta)}};
    d.scaling = {ScalingKind::none, Scaling::Factor::one, 1.0, Conditioning::survival,
                 "Z_n | Z_n > 0"};
    return d;
}

}  // namespace

LimitLawDescriptor limit_law(const ThetaModel& model, const LimitConstants& limits) {
    const RegimeLabel label = classify(model, limits);
    const double theta = model.theta();
    const double r = model.r();
    const std::string id = label.theorem_id();
    using F = LimitLawDescriptor::Form;

    LimitLawDescriptor d;
    d.theorem_id = id;
    switch (label.regime) {
        case Regime::undetermined:
            throw UndeterminedLimit("regime undetermined: " + label.basis);
        case Regime::loosely_subcritical:
            throw NoLimitLaw(
                "B_n has no limit; request a subsequential law with an explicit subsequence");
        case Regime::supercritical: {
            const double C = limits.C.value;
            d.kind = TransformKind::laplace_transform;
            d.form = F::laplace_supercritical;
            d.parameters = {{"theta", theta}, {"C", C}, {"q", 1.0 - std::pow(C, -1.0 / theta)}};
            d.scaling = {ScalingKind::linear, Scaling::Factor::a_pow_inv_theta, 1.0,
                         Conditioning::none, "A_n^(1/theta) Z_n"};
            return d;
        }
        case Regime::asymptotically_degenerate: {
            const double A = limits.A.value;
            const double C = limits.C.value;
            d.kind = TransformKind::pgf;
            d.form = F::theta_pgf;
            d.parameters = {{"theta", theta}, {"r", 1.0},
                            {"A", A},         {"C", C},
                            {"mean_limit", std::pow(A, -1.0 / theta)},
                            {"q", 1.0 - std::pow(A + C, -1.0 / theta)}};
            return d;
        }
        case Regime::critical:
            return critical_law(theta, id);
        case Regime::strictly_subcritical: {
            const double B = limits.A.infinite() && limits.C.determined() ? 0.0 : limits.B.value;
            return subcritical_law(theta, B, id);
        }
        case Regime::infinite_mean: {
            const bool a_zero = label.sub_label == "i" || label.sub_label == "ii";
            const bool d_zero = label.sub_label == "i" || label.sub_label == "iii";
            const double A = a_zero ? 0.0 : limits.A.value;
            const double D = d_zero ? 0.0 : limits.D.value;
            if (a_zero) {
                d.kind = TransformKind::cdf;
                d.form = F::exp_cdf;
                d.parameters = {{"D", d_zero ? 1.0 : D}, {"q", 1.0 - D}};
                d.scaling = {ScalingKind::log_linear, Scaling::Factor::a, 1.0,
                             d_zero ? Conditioning::survival : Conditioning::none,
                             d_zero ? "A_n ln Z_n | Z_n > 0" : "A_n ln Z_n"};
            } else if (d_zero) {
                d.kind = TransformKind::pgf;
                d.form = F::conditional_power;
                d.parameters = {{"A", A}, {"q", 1.0}};
                d.scaling.conditioning = Conditioning::survival;
                d.scaling.description = "Z_n | Z_n > 0";
            } else {
                d.kind = TransformKind::pgf;
                d.form = F::log_pgf;
                d.parameters = {{"r", 1.0}, {"A", A}, {"log_D", std::log(D)}, {"D", D},
                                {"q", 1.0 - D}};
            }
            return d;
        }
        case Regime::defective: {
            const AbsorptionProbabilities abs = absorption_probabilities(model, limits);
            const bool a_zero = label.sub_label == "i";
            if (a_zero) {
                d.kind = TransformKind::pgf;
                d.form = theta == 0.0 ? F::log_conditional : F::defective_conditional;
                const double C = theta == 0.0 ? 0.0 : limits.C.value;
                d.parameters = {{"theta", theta},
                                {"r", r},
                                {"C", C},
                                {"q", abs.q},
                                {"q_delta", abs.q_delta},
                                {"conditional_mean_limit", defective_conditional_mean_limit(theta, r)},
                                {"survival_constant", defective_survival_constant(theta, r, C)}};
                d.scaling = {ScalingKind::none, Scaling::Factor::one, 1.0, Conditioning::survival,
                             "Z_n | tau > n"};
                return d;
            }
            const double A = limits.A.value;
            d.kind = TransformKind::pgf;
            if (theta == 0.0) {
                const double D = limits.D.value;
                d.form = F::log_pgf;
                d.parameters = {{"r", r},
                                {"A", A},
                                {"D", D},
                                {"log_D", std::log(D)},
                                {"restricted_mean_limit", A * std::pow(r - 1.0, A - 1.0) * D}};
            } else {
                const double C = limits.C.value;
                d.form = F::theta_pgf;
                const double mean = r == 1.0 ? kInf
                                             : A * std::pow(A + C * std::pow(r - 1.0, theta),
                                                            -1.0 / theta - 1.0);
                d.parameters = {{"theta", theta}, {"r", r}, {"A", A}, {"C", C},
                                {"restricted_mean_limit", mean}};
            }
            d.parameters["q"] = abs.q;
            d.parameters["q_delta"] = abs.q_delta;
            d.scaling.description = "Z_n restricted to Z_n != Delta";
            return d;
        }
    }
    throw UndeterminedLimit("unhandled regime");
}

LimitLawDescriptor limit_law_along(const ThetaModel& model, const Subsequence& sub,
                                   std::size_t horizon, double tol) {
    if (model.case_label() != CaseLabel::a)
        throw NoLimitLaw("subsequential laws are defined for theta in (0,1], r = 1 only");
    const ConstantsTable table(model, horizon);
    std::vector<std::size_t> indices;
    for (std::size_t m = sub.first;; ++m) {
        const std::size_t k = sub.index(m);
        if (k > horizon || k == 0) break;
        if (!indices.empty() && k <= indices.back())
            throw DomainError("subsequence " + sub.tag + " is not strictly increasing");
        indices.push_back(k);
    }
    if (indices.size() < 4)
        throw UndeterminedLimit("subsequence " + sub.tag + " has fewer than four terms below the horizon");
    // B held at the latest subsequence index, on the generation axis, so the
    // detector's doubling checkpoints see the sparse terms at their true position.
    std::vector<double> held;
    held.reserve(horizon - indices.front() + 1);
    std::size_t next = 0;
    for (std::size_t n = indices.front(); n <= horizon; ++n) {
        while (next + 1 < indices.size() && indices[next + 1] <= n) ++next;
        held.push_back(table[indices[next]].B);
    }
    const LimitValue B = detect_limit(held, tol, false);
    const double theta = model.theta();
    LimitLawDescriptor d;
    if (B.infinite()) {
        d = critical_law(theta, "T5(i)");
    } else if (B.determined()) {
        d = subcritical_law(theta, std::max(0.0, B.value), "T5(ii)");
    } else {
        throw UndeterminedLimit("B along subsequence " + sub.tag + " is " +
                                std::string(to_string(B.status)));
    }
    d.parameters["subsequence_terms"] = static_cast<double>(indices.size());
    d.scaling.description += " along " + sub.tag;
    return d;
}

}  // namespace gwtheta
