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

// Closed-form analytics of the composed process: the composite constants
// (A_n, C_n, D_n, B_n), the law of Z_n, its absorption probabilities and the
// limit laws that the ten limit theorems assign to each regime.

#include <cstddef>
#include <functional>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "gwtheta/environment.hpp"
#include "gwtheta/limits.hpp"
#include "gwtheta/pgf.hpp"

namespace gwtheta {

struct CompositeConstants {
    std::size_t n = 0;
    double A = 1.0;
    double C = 0.0;
    double log_D = 0.0;  // theta == 0 only
    double B = 0.0;      // C / A; +inf when A underflows

    double D() const;
};

/// Constants for n = 0..horizon, computed by one forward pass with
/// compensated summation of C_n and log D_n.
class ConstantsTable {
public:
    ConstantsTable(const ThetaModel& model, std::size_t horizon);

    const CompositeConstants& operator[](std::size_t n) const { return rows_.at(n); }
    std::size_t horizon() const noexcept { return rows_.size() - 1; }
    const std::vector<CompositeConstants>& rows() const noexcept { return rows_; }

private:
    std::vector<CompositeConstants> rows_;
};

CompositeConstants composite_constants(const ThetaModel& model, std::size_t n);

/// F_n(s) = f_1(f_2(...f_n(s))) through the closed form.
double composed_pgf(const ThetaModel& model, std::size_t n, double s);

struct SurvivalMoments {
    double p_alive = 0.0;   // P(tau > n) = F_n(1) - F_n(0)
    double p_zero = 0.0;    // F_n(0)
    double p_delta = 0.0;   // 1 - F_n(1)
    double mean_restricted = 0.0;   // E(Z_n; tau_delta > n) = F_n'(1)
    double mean_conditional = 0.0;  // E(Z_n | tau > n)
    bool mean_infinite = false;
};

SurvivalMoments survival_and_moments(const ThetaModel& model, std::size_t n);
SurvivalMoments survival_and_moments(const ThetaModel& model, const CompositeConstants& k);

/// E(s^{Z_n} | tau > n); throws ConditioningOnNull when P(tau > n) vanishes.
double conditional_pgf(const ThetaModel& model, std::size_t n, double s);

struct AbsorptionProbabilities {
    double q = 0.0;
    double q_delta = 0.0;
    double Q = 0.0;
};

AbsorptionProbabilities absorption_probabilities(const ThetaModel& model,
                                                 const LimitConstants& limits);

/// Probabilities of absorption at 0 and at Delta by generation n (the
/// partial versions F_n(0) and 1 - F_n(1)).
AbsorptionProbabilities absorption_by(const ThetaModel& model, std::size_t n);

enum class TransformKind { laplace_transform, pgf, cdf, constant };
enum class ScalingKind { none, linear, log_linear };
enum class Conditioning { none, survival };

std::string_view to_string(TransformKind k);
std::string_view to_string(ScalingKind k);
std::string_view to_string(Conditioning c);

/// How Z_n is normalized before comparing with a limit law.
struct Scaling {
    enum class Factor { one, a_pow_inv_theta, b_pow_neg_inv_theta, a, custom };

    ScalingKind kind = ScalingKind::none;
    Factor factor = Factor::one;
    double custom_factor = 1.0;
    Conditioning conditioning = Conditioning::none;
    std::string description = "Z_n";

    /// Multiplier at generation n (applied to Z_n or to ln Z_n).
    double factor_at(double theta, const CompositeConstants& k) const;
};

struct LimitLawDescriptor {
    enum class Form {
        laplace_supercritical,  // 1 - (lambda^-theta + C)^(-1/theta)
        laplace_critical,       // 1 - (1 + lambda^-theta)^(-1/theta)
        conditional_ratio,      // 1 - (((1-s)^-theta + B) / (1 + B))^(-1/theta)
        theta_pgf,              // r - (A (r-s)^-theta + C)^(-1/theta)
        log_pgf,                // r - D (r-s)^A
        exp_cdf,                // 1 - D e^-x, x >= 0
        conditional_power,      // 1 - (1-s)^A
        defective_conditional,  // ((r-s)^-theta - r^-theta) / ((r-1)^-theta - r^-theta)
        log_conditional,        // (ln r - ln(r-s)) / (ln r - ln(r-1))
    };

    std::string theorem_id;
    TransformKind kind = TransformKind::pgf;
    Form form = Form::theta_pgf;
    std::map<std::string, double, std::less<>> parameters;
    Scaling scaling;

    double param(std::string_view name) const;

    /// Transform value at its argument (lambda, s or x depending on kind).
    double evaluate(double x) const;
};

/// An explicit index mapping m -> k_m for subsequential limit laws.
struct Subsequence {
    std::string tag;
    std::function<std::size_t(std::size_t)> index;
    std::size_t first = 1;
};

/// The limit law prescribed by the model's regime. Throws NoLimitLaw when
/// B_n oscillates, and UndeterminedLimit when the regime cannot be resolved.
LimitLawDescriptor limit_law(const ThetaModel& model, const LimitConstants& limits);

/// Subsequential law along B_{k_m}; dispatches to the infinite-B or
/// finite-B variant.
LimitLawDescriptor limit_law_along(const ThetaModel& model, const Subsequence& sub,
                                   std::size_t horizon, double tol);

/// Limit of E(Z_n | tau > n) for the defective laws with A = 0.
double defective_conditional_mean_limit(double theta, double r);

/// Constant K in P(tau > n) ~ K * A_n for the defective laws with A = 0
/// (theta != 0 form; the log form for theta == 0 is ln r - ln(r-1)).
double defective_survival_constant(double theta, double r, double C);

}  // namespace gwtheta
