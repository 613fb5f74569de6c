#pragma once

// Shared fixtures: one representative model per parameter case.

#include <array>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "gwtheta/environment.hpp"

namespace gwtheta::testing {

inline ThetaModel model(double theta, double r, EnvSequence a, EnvSequence c, std::size_t horizon = 1000) {
    return ThetaModel::validate(theta, r, std::move(a), std::move(c), horizon);
}

inline ThetaModel single_step(double theta, double r, double a, double c) {
    return model(theta, r, EnvSequence::table({a}), EnvSequence::table({c}), 1);
}

struct NamedModel {
    std::string name;
    ThetaModel m;
};

inline std::vector<NamedModel> case_models() {
    using E = EnvSequence;
    return {
        {"a: theta=1/2 r=1", model(0.5, 1.0, E::harmonic(), E::proportional(1.0))},
        {"b: theta=1/2 r=2", model(0.5, 2.0, E::harmonic(), E::proportional(0.85))},
        {"c: theta=-1/2 r=1", model(-0.5, 1.0, E::harmonic(), E::proportional(0.5))},
        {"d: theta=-1/2 r=2", model(-0.5, 2.0, E::convergent(), E::proportional(1.2))},
        {"e: theta=0 r=1", model(0.0, 1.0, E::harmonic(), E::exp_tail(1.0))},
        {"f: theta=0 r=2", model(0.0, 2.0, E::convergent(), E::constant(0.5))},
    };
}

/// f_n(s) evaluated from the raw sequence values.
inline double direct_step(const ThetaModel& m, std::size_t n, double s) {
    const EnvPoint p = m.at(n);
    const double r = m.r(), th = m.theta();
    // log(r - c) from the sequence's own complement; c_n can round to r
    if (th == 0.0) return r - std::exp((1.0 - p.a) * m.log_r_minus_c(p)) * std::pow(r - s, p.a);
    return r - std::pow(p.a * std::pow(r - s, -th) + p.c, -1.0 / th);
}

/// f_1(f_2(...f_n(s))).
inline double iterated(const ThetaModel& m, std::size_t n, double s) {
    for (std::size_t k = n; k >= 1; --k) s = direct_step(m, k, s);
    return s;
}

inline constexpr std::array<double, 11> kGrid = {0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};

}  // namespace gwtheta::testing
