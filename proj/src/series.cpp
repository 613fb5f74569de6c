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

#include "gwtheta/series.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <string>

#include "gwtheta/analytics.hpp"
#include "gwtheta/environment.hpp"
#include "gwtheta/io.hpp"

namespace gwtheta {

namespace {

constexpr std::size_t kNever = std::numeric_limits<std::size_t>::max();
constexpr double kClipLimit = 1e-14;

}  // namespace

double Pmf::total() const {
    long double s = tail_mass + defect_mass;
    for (double w : weights) s += w;
    return static_cast<double>(s);
}

CoefficientStream::CoefficientStream(const ThetaPgf& g) : g_(g), inner_nonzero_(kNever) {
    log_r_ = std::log(static_cast<long double>(g.r));
    if (g.theta == 0.0) {
        mode_ = Mode::log_form;
        log_prefactor_ = static_cast<long double>(g.log_d) + g.a * log_r_;
        return;
    }
    const long double theta = g.theta;
    if (theta > 0) {
        mode_ = Mode::positive;
        head_ = g.a;
        scale_ = g.c * std::pow(static_cast<long double>(g.r), theta);
        beta_ = theta;
    } else {
        mode_ = Mode::negative;
        head_ = g.c;
        scale_ = g.a * std::pow(static_cast<long double>(g.r), -theta);
        beta_ = -theta;
    }
    gamma_ = -1.0L / theta;
    binom_.push_back(1.0L);
}

bool CoefficientStream::quadratic() const noexcept {
    return mode_ != Mode::log_form && inner_nonzero_ == kNever;
}

long double CoefficientStream::inner(std::size_t j) const {
    if (j == 0) return head_ + scale_;
    return j < inner_nonzero_ ? scale_ * binom_[j] : 0.0L;
}

long double CoefficientStream::outer_next() {
    const std::size_t k = out_.size();
    if (k == 0) {
        out_.push_back(std::pow(inner(0), gamma_));
        return out_[0];
    }
    while (binom_.size() <= k && inner_nonzero_ == kNever) {
        const std::size_t j = binom_.size();
        const long double b = binom_[j - 1] * ((static_cast<long double>(j) - 1.0L - beta_) / j);
        binom_.push_back(b);
        if (b == 0.0L) inner_nonzero_ = j;
    }
    const std::size_t jmax = std::min(k, inner_nonzero_ == kNever ? k : inner_nonzero_ - 1);
    long double acc = 0.0L;
    for (std::size_t j = 1; j <= jmax; ++j)
        acc += ((gamma_ + 1.0L) * j - static_cast<long double>(k)) * inner(j) * out_[k - j];
    out_.push_back(acc / (static_cast<long double>(k) * inner(0)));
    return out_.back();
}

double CoefficientStream::next() {
    const std::size_t k = k_++;
    const long double r = g_.r;
    switch (mode_) {
        case Mode::log_form: {
            if (k == 0) return static_cast<double>(r - std::exp(log_prefactor_));
            e_ *= (static_cast<long double>(k) - 1.0L - g_.a) / k;
            return static_cast<double>(-e_ * std::exp(log_prefactor_ - k * log_r_));
        }
        case Mode::positive: {
            const long double w = outer_next();
            if (k == 0) return static_cast<double>(r - r * w);
            return static_cast<double>((out_[k - 1] - w) * std::exp((1.0L - k) * log_r_));
        }
        case Mode::negative: {
            const long double h = outer_next();
            if (k == 0) return static_cast<double>(r - h);
            return static_cast<double>(-h * std::exp(-static_cast<long double>(k) * log_r_));
        }
    }
    return 0.0;
}

Pmf pmf_from_theta_pgf(const ThetaPgf& g, double tail_tol, std::size_t max_cutoff) {
    if (!(tail_tol > 0.0)) throw DomainError("tail_tol must be positive");
    Pmf pmf;
    const double total = g.at_one();
    pmf.defect_mass = std::max(0.0, g.defect());
    CoefficientStream stream(g);
    long double sum = 0.0L;
    double prev_tail = 0.0;          // tail at the previous power of two
    double prev_exponent = -1.0;     // decay exponent over the previous doubling
    for (std::size_t k = 0;; ++k) {
        double p = stream.next();
        if (p < 0.0) {
            if (p < -kClipLimit)
                throw NumericalError("coefficient " + std::to_string(k) + " = " +
                                     std::to_string(p) + " is negative beyond round-off");
            pmf.clipped_mass += -p;
            p = 0.0;
        }
        pmf.weights.push_back(p);
        sum += p;
        const double tail = total - static_cast<double>(sum);
        if (tail <= tail_tol) {
            pmf.tail_mass = std::max(0.0, tail);
            return pmf;
        }
        pmf.tail_mass = tail;
        if (k >= max_cutoff)
            throw CutoffExceeded("tail mass " + std::to_string(tail) + " above " +
                                 std::to_string(tail_tol) + " at cutoff " + std::to_string(k),
                                 pmf);
        const std::size_t count = k + 1;
        if ((count & (count - 1)) == 0) {
            if (count >= 4096 && stream.quadratic() && prev_tail > 0.0) {
                // Dense recurrence: give up early when the tail decays like a
                // power law too slow to reach tail_tol within max_cutoff.
                const double exponent = std::log2(prev_tail / tail);
                const bool accelerating = prev_exponent > 0.0 && exponent >= 1.25 * prev_exponent;
                if (!accelerating) {
                    const double predicted =
                        exponent > 0.0 ? count * std::pow(tail / tail_tol, 1.0 / exponent)
                                       : std::numeric_limits<double>::infinity();
                    if (predicted > static_cast<double>(max_cutoff))
                        throw CutoffExceeded("power-law tail: mass " + std::to_string(tail) +
                                                 " at cutoff " + std::to_string(k) +
                                                 " would need about " + std::to_string(predicted) +
                                                 " terms",
                                             pmf);
                }
            }
            prev_exponent = prev_tail > 0.0 ? std::log2(prev_tail / tail) : -1.0;
            prev_tail = tail;
        }
    }
}

Pmf pmf_from_theta_pgf(double theta, double r, double a_coef, double c_coef, double tail_tol,
                       std::size_t max_cutoff) {
    if (theta == 0.0) {
        if (!(c_coef < r)) throw DomainError("theta = 0 form needs c < r");
        return pmf_from_theta_pgf(
            ThetaPgf::log_form(r, a_coef, (1.0 - a_coef) * std::log(r - c_coef)), tail_tol,
            max_cutoff);
    }
    return pmf_from_theta_pgf(ThetaPgf::general(theta, r, a_coef, c_coef), tail_tol, max_cutoff);
}

Pmf population_pmf(const ThetaModel& model, std::size_t n, double tail_tol, std::size_t max_cutoff) {
    return pmf_from_theta_pgf(ThetaPgf::composite(model, composite_constants(model, n)), tail_tol,
                              max_cutoff);
}

std::vector<double> leading_coefficients(const ThetaPgf& g, std::size_t count) {
    CoefficientStream stream(g);
    std::vector<double> out(count);
    for (double& x : out) x = stream.next();
    return out;
}

void write_pmf_csv(std::ostream& out, const Pmf& pmf) {
    out << "j,weight\n";
    for (std::size_t j = 0; j < pmf.weights.size(); ++j)
        out << j << ',' << format_double(pmf.weights[j]) << '\n';
    out << "tail_mass," << format_double(pmf.tail_mass) << '\n';
    out << "defect_mass," << format_double(pmf.defect_mass) << '\n';
    out << "cutoff," << pmf.cutoff() << '\n';
}

}  // namespace gwtheta
