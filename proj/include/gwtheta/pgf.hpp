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

#include <cstddef>

namespace gwtheta {

class ThetaModel;
struct CompositeConstants;

/// A generating function of the theta family,
///
///     g(s) = r - (a (r-s)^-theta + c)^(-1/theta)      theta != 0
///     g(s) = r - d (r-s)^a                            theta == 0
///
/// The family is closed under composition, so the same type describes the
/// one-step laws f_n (a = a_n, c = c_n, d = (r-c_n)^(1-a_n)) and the laws of
/// the population F_n (a = A_n, c = C_n, d = D_n).
///
/// At s = r the theta > 0 and theta == 0 forms are continuous with value r.
/// For theta < 0 the value at s = r is the left limit r - c^(-1/theta); when
/// r == 1 this is the proper mass g(1) of a defective law.
struct ThetaPgf {
    double theta = 1.0;
    double r = 1.0;
    double a = 1.0;
    double c = 0.0;
    double log_d = 0.0;  // theta == 0 only

    static ThetaPgf step(const ThetaModel& model, std::size_t n);
    static ThetaPgf composite(const ThetaModel& model, const CompositeConstants& k);
    static ThetaPgf general(double theta, double r, double a, double c);
    static ThetaPgf log_form(double r, double a, double log_d);

    /// g(s); throws DomainError for s outside [0, r].
    double eval(double s) const;

    /// g(hi) - g(lo) for lo <= hi, evaluated without cancellation.
    double increment(double lo, double hi) const;

    /// g(1): total mass of the non-defective part.
    double at_one() const { return eval(1.0); }

    /// 1 - g(1), the probability of the defect state.
    double defect() const;

    /// g'(0) = probability of exactly one.
    double derivative_at_zero() const;

    /// g'(1) = E[X; X != defect]; +inf when the restricted mean diverges.
    double derivative_at_one() const;
};

/// (y + delta)^gamma - y^gamma for y > 0, y + delta > 0, without cancellation.
double power_difference(double y, double delta, double gamma);

}  // namespace gwtheta
