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

#include "gwtheta/limits.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "gwtheta/analytics.hpp"
#include "gwtheta/pgf.hpp"

namespace gwtheta {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kRatioCap = 0.9;

bool significant_step(double prev, double next) {
    return std::abs(next - prev) > 1e-13 * std::max(1.0, std::abs(prev));
}

LimitValue make(LimitStatus status, double value, LimitEvidence ev, const char* rule) {
    ev.rule = rule;
    LimitValue out;
    out.status = status;
    out.value = value;
    out.evidence = std::move(ev);
    return out;
}

double aitken(double x, double d_last, double ratio) { return x + d_last * ratio / (1.0 - ratio); }

}  // namespace

std::string_view to_string(LimitStatus status) {
    switch (status) {
        case LimitStatus::determined: return "determined";
        case LimitStatus::infinite: return "infinite";
        case LimitStatus::oscillating: return "oscillating";
        case LimitStatus::undetermined: return "undetermined";
        case LimitStatus::not_applicable: return "not_applicable";
    }
    return "?";
}

std::string_view to_string(TriState t) {
    switch (t) {
        case TriState::holds: return "holds";
        case TriState::fails: return "fails";
        case TriState::undetermined: return "undetermined";
    }
    return "?";
}

LimitValue detect_limit(std::span<const double> xs, double tol, bool allow_oscillating) {
    LimitEvidence ev;
    const std::size_t N = xs.size();
    if (N < 4) return make(LimitStatus::undetermined, 0.0, ev, "too few terms");

    // Checkpoints (1-based generation indices) and the trailing window.
    std::array<std::size_t, 4> idx;
    std::size_t mid;
    std::size_t window_begin;
    if (N >= 16) {
        idx = {N / 8, N / 4, N / 2, N};
        mid = (3 * N) / 4;
        window_begin = N / 2;
    } else {
        idx = {N - 3, N - 2, N - 1, N};
        mid = N - 1;
        window_begin = N - 3;
    }
    ev.checkpoint_index = idx;
    for (int i = 0; i < 4; ++i) ev.checkpoint_value[i] = xs[idx[i] - 1];
    const double x8 = ev.checkpoint_value[0];
    const double x4 = ev.checkpoint_value[1];
    const double x2 = ev.checkpoint_value[2];
    const double x1 = ev.checkpoint_value[3];
    const double x34 = xs[mid - 1];

    bool up = false;
    bool down = false;
    double lo = kInf;
    double hi = -kInf;
    for (std::size_t i = window_begin - 1; i < N; ++i) {
        const double x = xs[i];
        if (std::isnan(x)) return make(LimitStatus::undetermined, 0.0, ev, "NaN in sequence");
        lo = std::min(lo, x);
        hi = std::max(hi, x);
        if (i >= window_begin && significant_step(xs[i - 1], x)) (x > xs[i - 1] ? up : down) = true;
    }
    ev.window_liminf = lo;
    ev.window_limsup = hi;
    ev.monotone = !(up && down);

    if (std::isinf(x1) && x1 > 0) return make(LimitStatus::infinite, kInf, ev, "overflow to +inf");

    if (std::abs(x1 - x2) <= tol && std::abs(x1 - x34) <= tol && hi - lo <= tol)
        return make(LimitStatus::determined, x1, ev, "checkpoints agree within tol");

    if (!ev.monotone) {
        // Window minima over the three trailing doubling windows.
        auto window_min = [&](std::size_t from, std::size_t to) {
            double m = kInf;
            for (std::size_t i = from; i <= to; ++i) m = std::min(m, xs[i - 1]);
            return m;
        };
        if (N >= 16) {
            const double lo1 = window_min(std::max<std::size_t>(1, N / 8), N / 4);
            const double lo2 = window_min(N / 4, N / 2);
            const double lo3 = lo;
            const double e2 = lo2 - lo1;
            const double e3 = lo3 - lo2;
            if ((e2 > 0 && e3 > tol && e3 >= kRatioCap * e2) || lo3 > 1.0 / tol)
                return make(LimitStatus::infinite, kInf, ev, "window liminf diverges");
        }
        if (hi - lo > 10.0 * tol && allow_oscillating)
            return make(LimitStatus::oscillating, 0.0, ev, "liminf/limsup gap exceeds 10 tol");
        return make(LimitStatus::undetermined, 0.0, ev, "not monotone on the trailing window");
    }

    const double d1 = x4 - x8;
    const double d2 = x2 - x4;
    const double d3 = x1 - x2;
    if (d3 > 0 && x1 > 1.0 / tol)
        return make(LimitStatus::infinite, kInf, ev, "exceeds 1/tol and still growing");
    if (d1 > 0 && d2 > 0 && d3 > tol && d3 >= kRatioCap * d2 && d2 >= kRatioCap * d1)
        return make(LimitStatus::infinite, kInf, ev, "increments do not decay over doublings");

    // Positive and shrinking by a stable factor per doubling: power-law decay to 0.
    if (x8 > 0.0 && x1 > 0.0 && d3 < 0.0) {
        const double q1 = x4 / x8, q2 = x2 / x4, q3 = x1 / x2;
        if (q1 < kRatioCap && q2 < kRatioCap && q3 < kRatioCap && std::abs(q3 - q2) <= 0.05 &&
            std::abs(q2 - q1) <= 0.05)
            return make(LimitStatus::determined, 0.0, ev, "stable decay factor over doublings");
    }

    if (d1 != 0.0 && d2 != 0.0) {
        const double rho2 = d2 / d1;
        const double rho3 = d3 / d2;
        if (rho2 >= 0.0 && rho2 < kRatioCap && rho3 >= 0.0 && rho3 < kRatioCap) {
            ev.extrapolated_prev = aitken(x2, d2, rho2);
            ev.extrapolated = aitken(x1, d3, rho3);
            if (std::abs(ev.extrapolated - ev.extrapolated_prev) <=
                tol * std::max(1.0, std::abs(ev.extrapolated)))
                return make(LimitStatus::determined, ev.extrapolated, ev,
                            "Aitken extrapolations agree within tol");
            return make(LimitStatus::undetermined, 0.0, ev, "Aitken extrapolations disagree");
        }
    }
    return make(LimitStatus::undetermined, 0.0, ev, "no convergence or divergence pattern");
}

double LimitConstants::zero_tol() const noexcept { return std::max(1e3 * tol, 1e-9); }

LimitConstants limit_constants(const ThetaModel& model, std::size_t horizon, double tol) {
    const ConstantsTable table(model, horizon);
    const std::size_t N = horizon;
    std::vector<double> A(N), C(N), D(N), B(N), AC(N);
    for (std::size_t n = 1; n <= N; ++n) {
        const CompositeConstants& k = table[n];
        A[n - 1] = k.A;
        C[n - 1] = k.C;
        D[n - 1] = k.D();
        B[n - 1] = k.B;
        AC[n - 1] = k.A + k.C;
    }
    LimitConstants out;
    out.horizon_used = N;
    out.tol = tol;
    out.A = detect_limit(A, tol, false);
    out.C = detect_limit(C, tol, false);
    out.B = detect_limit(B, tol, true);
    out.sum_AC = detect_limit(AC, tol, false);
    if (model.theta() == 0.0) {
        out.D = detect_limit(D, tol, false);
    } else {
        out.D.status = LimitStatus::not_applicable;
        out.D.evidence.rule = "D_n is defined for theta == 0 only";
    }

    for (LimitValue* v : {&out.A, &out.C, &out.D, &out.B, &out.sum_AC})
        if (v->determined()) v->value = std::max(0.0, v->value);

    // Keep determined limits inside the closed bounds the constants obey
    // at every n; extrapolation can overshoot them by round-off.
    const double theta = model.theta();
    const double r = model.r();
    const CaseLabel label = model.case_label();
    if (label != CaseLabel::a && out.A.determined()) out.A.value = std::min(out.A.value, 1.0);
    if (out.A.determined() && out.C.determined()) {
        const double oneA = 1.0 - out.A.value;
        double lo = 0.0;
        double hi = kInf;
        if (label == CaseLabel::b) {
            lo = oneA * std::pow(r, -theta);
            hi = oneA * std::pow(r - 1.0, -theta);
        } else if (label == CaseLabel::d) {
            lo = oneA * std::pow(r - 1.0, -theta);
            hi = oneA * std::pow(r, -theta);
        } else if (label == CaseLabel::c) {
            hi = oneA;
        }
        out.C.value = std::clamp(out.C.value, lo, hi);
    }
    if (label == CaseLabel::f && out.A.determined() && out.D.determined()) {
        const double oneA = 1.0 - out.A.value;
        out.D.value = std::clamp(out.D.value, std::pow(r - 1.0, oneA), std::pow(r, oneA));
    }
    if (label == CaseLabel::e && out.D.determined()) out.D.value = std::min(out.D.value, 1.0);

    out.proper_equality = (label == CaseLabel::b || label == CaseLabel::d || label == CaseLabel::f) &&
                          model.proper_up_to(N);

    auto closed_a = [](Family f) {
        return f == Family::harmonic || f == Family::convergent || f == Family::constant;
    };
    auto closed_c = [](Family f) {
        return f == Family::constant || f == Family::proportional_c ||
               f == Family::negative_proportional_c;
    };
    out.exact_family = closed_a(model.a_seq().family()) && closed_c(model.c_seq().family());
    return out;
}

double one_step_p1(const ThetaModel& model, std::size_t n) {
    const EnvPoint p = model.at(n);
    const double theta = model.theta();
    const double r = model.r();
    const double log_a = p.a < 1.0 ? std::log1p(-p.one_minus_a) : std::log(p.a);
    double log_p;
    if (theta == 0.0) {
        const double log_term = r == 1.0 ? p.log_one_minus_c : std::log1p(-p.c / r);
        log_p = log_a + p.one_minus_a * log_term;
    } else {
        log_p = log_a + (-1.0 / theta - 1.0) * std::log1p(p.c * std::pow(r, theta) - p.one_minus_a);
    }
    return std::exp(log_p);
}

namespace {

TriState sum_status(std::vector<double>& partial, double tol, double& value) {
    if (partial.empty()) return TriState::undetermined;
    for (double x : partial)
        if (!std::isfinite(x)) {
            value = kInf;
            return TriState::undetermined;
        }
    const bool negative = partial.back() < 0.0;
    if (negative)
        for (double& x : partial) x = -x;
    const LimitValue lim = detect_limit(partial, tol, false);
    const double sign = negative ? -1.0 : 1.0;
    if (lim.determined()) {
        value = sign * lim.value;
        return TriState::holds;
    }
    value = sign * partial.back();
    if (lim.infinite()) {
        value = sign * kInf;
        return TriState::fails;
    }
    return TriState::undetermined;
}

}  // namespace

ConvergenceConditions convergence_conditions(const ThetaModel& model, std::size_t horizon,
                                             double tol) {
    std::vector<double> cl, cl_tilde, a0, a1;
    cl.reserve(horizon);
    double s_cl = 0, s_tilde = 0, s_a0 = 0, s_a1 = 0;
    for (std::size_t n = 1; n <= horizon; ++n) {
        const EnvPoint p = model.at(n);
        const double p1 = one_step_p1(model, n);
        s_cl += -std::expm1(std::log(p1));
        const double mass = ThetaPgf::step(model, n).at_one();
        s_tilde += -std::expm1(std::log(p1) - std::log(mass));
        s_a0 += p.one_minus_a;
        s_a1 += p.one_minus_a * -p.log_one_minus_c;
        cl.push_back(s_cl);
        cl_tilde.push_back(s_tilde);
        a0.push_back(s_a0);
        a1.push_back(s_a1);
    }
    ConvergenceConditions out;
    out.horizon = horizon;
    out.church_lindvall = sum_status(cl, tol, out.church_lindvall_sum);
    out.tilde_cl = sum_status(cl_tilde, tol, out.tilde_cl_sum);
    out.condition_a0 = sum_status(a0, tol, out.sum_one_minus_a);
    out.condition_A1 = sum_status(a1, tol, out.sum_A1);
    return out;
}

}  // namespace gwtheta
