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

// Probability masses of theta-family generating functions by power-series
// arithmetic.
//
// Every expansion runs in the scaled variable x = s/r, where the inner
// series is a generalized binomial series of (1-x)^beta, and the outer
// fractional power u(x)^gamma follows from the recurrence
//
//     k u_0 w_k = sum_{j=1..k} ((gamma+1) j - k) u_j w_{k-j}
//
// (J. C. P. Miller). For theta > 0 the pgf is factored as
// g = r - r (1-x) (a + c r^theta (1-x)^theta)^(-1/theta), which keeps every
// term of the recurrence nonnegative; p_k then comes out as a difference of
// consecutive w's scaled by r^(1-k).

#include <cstddef>
#include <iosfwd>
#include <vector>

#include "gwtheta/errors.hpp"
#include "gwtheta/pgf.hpp"

namespace gwtheta {

struct Pmf {
    std::vector<double> weights;  // p(0..J)
    double tail_mass = 0.0;       // mass above J within the proper part
    double defect_mass = 0.0;     // mass on Delta
    double clipped_mass = 0.0;    // total magnitude of negative round-off set to 0

    std::size_t cutoff() const noexcept { return weights.empty() ? 0 : weights.size() - 1; }
    double weight(std::size_t j) const noexcept { return j < weights.size() ? weights[j] : 0.0; }
    /// sum(weights) + tail + defect.
    double total() const;
};

class CutoffExceeded : public Error {
public:
    CutoffExceeded(const std::string& what, Pmf partial) : Error(what), partial_(std::move(partial)) {}
    const Pmf& partial() const noexcept { return partial_; }

private:
    Pmf partial_;
};

inline constexpr double kDefaultTailTol = 1e-12;
inline constexpr std::size_t kDefaultMaxCutoff = std::size_t{1} << 20;

/// Streams the Taylor coefficients p_0, p_1, ... of a theta-family pgf.
class CoefficientStream {
public:
    explicit CoefficientStream(const ThetaPgf& g);

    double next();
    std::size_t produced() const noexcept { return k_; }
    /// Cost of the next coefficient grows with k (dense recurrence).
    bool quadratic() const noexcept;

private:
    enum class Mode { positive, negative, log_form };

    long double inner(std::size_t j) const;
    long double outer_next();

    ThetaPgf g_;
    Mode mode_;
    long double gamma_ = 0.0L;
    long double beta_ = 0.0L;     // exponent of the inner binomial series
    long double scale_ = 0.0L;    // coefficient multiplying (1-x)^beta
    long double head_ = 0.0L;     // constant term of the inner series
    std::vector<long double> binom_;  // (1-x)^beta coefficients, j >= 0
    std::vector<long double> out_;    // outer series coefficients
    std::size_t inner_nonzero_;       // binom_ is exactly zero from this index on
    std::size_t k_ = 0;
    long double log_r_ = 0.0L;
    long double log_prefactor_ = 0.0L;  // theta == 0: log(d r^a)
    long double e_ = 1.0L;              // theta == 0: current (1-x)^a coefficient
};

/// Truncated pmf with explicit tail and defect masses.
Pmf pmf_from_theta_pgf(const ThetaPgf& g, double tail_tol = kDefaultTailTol,
                       std::size_t max_cutoff = kDefaultMaxCutoff);

Pmf pmf_from_theta_pgf(double theta, double r, double a_coef, double c_coef,
                       double tail_tol = kDefaultTailTol, std::size_t max_cutoff = kDefaultMaxCutoff);

class ThetaModel;

/// Law of Z_n from the composite constants.
Pmf population_pmf(const ThetaModel& model, std::size_t n, double tail_tol = kDefaultTailTol,
                   std::size_t max_cutoff = kDefaultMaxCutoff);

/// First `count` coefficients, no tail control.
std::vector<double> leading_coefficients(const ThetaPgf& g, std::size_t count);

/// Rows "j,weight" followed by tail_mass, defect_mass and cutoff footer rows.
void write_pmf_csv(std::ostream& out, const Pmf& pmf);

}  // namespace gwtheta
