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

#include "gwtheta/pgf.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "gwtheta/analytics.hpp"
#include "gwtheta/environment.hpp"
#include "gwtheta/errors.hpp"

namespace gwtheta {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

double power_difference(double y, double delta, double gamma) {
    if (delta == 0.0) return 0.0;
    if (y == 0.0) return std::pow(delta, gamma);
    return std::pow(y, gamma) * std::expm1(gamma * std::log1p(delta / y));
}

ThetaPgf ThetaPgf::general(double theta, double r, double a, double c) {
    return ThetaPgf{theta, r, a, c, 0.0};
}

ThetaPgf ThetaPgf::log_form(double r, double a, double log_d) {
    return ThetaPgf{0.0, r, a, 0.0, log_d};
}

ThetaPgf ThetaPgf::step(const ThetaModel& model, std::size_t n) {
    const EnvPoint p = model.at(n);
    if (model.theta() != 0.0) return general(model.theta(), model.r(), p.a, p.c);
    return log_form(model.r(), p.a, p.one_minus_a * model.log_r_minus_c(p));
}

ThetaPgf ThetaPgf::composite(const ThetaModel& model, const CompositeConstants& k) {
    if (model.theta() != 0.0) return general(model.theta(), model.r(), k.A, k.C);
    return log_form(model.r(), k.A, k.log_D);
}

double ThetaPgf::eval(double s) const {
    if (!(s >= 0.0 && s <= r))
        throw DomainError("generating function argument s=" + std::to_string(s) +
                          " outside [0, r]");
    if (theta == 0.0) {
        if (s == r) return r;
        return r - std::exp(log_d + a * std::log(r - s));
    }
    if (s == r) return theta > 0.0 ? r : r - std::pow(c, -1.0 / theta);
    return r - std::pow(a * std::pow(r - s, -theta) + c, -1.0 / theta);
}

double ThetaPgf::increment(double lo, double hi) const {
    if (!(lo >= 0.0 && hi <= r && lo <= hi))
        throw DomainError("increment requires 0 <= lo <= hi <= r");
    if (lo == hi) return 0.0;
    if (theta == 0.0) {
        const double d = std::exp(log_d);
        if (hi == r) return d * std::pow(r - lo, a);
        return d * std::pow(r - hi, a) * std::expm1(a * std::log1p((hi - lo) / (r - hi)));
    }
    const double gamma = -1.0 / theta;
    if (hi == r) {
        if (theta > 0.0) return std::pow(a * std::pow(r - lo, -theta) + c, gamma);
        return power_difference(c, a * std::pow(r - lo, -theta), gamma);
    }
    const double u = std::pow(r - hi, -theta);
    const double y = a * u + c;
    const double delta = a * u * std::expm1(-theta * std::log1p((hi - lo) / (r - hi)));
    return power_difference(y, delta, gamma);
}

double ThetaPgf::defect() const {
    if (r == 1.0) {
        if (theta < 0.0) return std::pow(c, -1.0 / theta);
        return 0.0;
    }
    if (theta == 0.0) return 1.0 - r + std::exp(log_d + a * std::log(r - 1.0));
    return 1.0 - r + std::pow(a * std::pow(r - 1.0, -theta) + c, -1.0 / theta);
}

double ThetaPgf::derivative_at_zero() const {
    if (theta == 0.0) return a * std::exp(log_d + (a - 1.0) * std::log(r));
    return a * std::pow(a + c * std::pow(r, theta), -1.0 / theta - 1.0);
}

double ThetaPgf::derivative_at_one() const {
    if (theta == 0.0) {
        if (r == 1.0) return kInf;
        return a * std::exp(log_d + (a - 1.0) * std::log(r - 1.0));
    }
    if (r == 1.0) return theta > 0.0 ? std::pow(a, -1.0 / theta) : kInf;
    return a * std::pow(a + c * std::pow(r - 1.0, theta), -1.0 / theta - 1.0);
}

}  // namespace gwtheta
