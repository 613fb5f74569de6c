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

#include "gwtheta/sampler.hpp"

#include "gwtheta/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace gwtheta {

namespace {

// Bernoulli polynomials B_2..B_4 for the asymptotic gamma-ratio expansion.
double bern2(double x) { return x * x - x + 1.0 / 6.0; }
double bern3(double x) { return x * x * x - 1.5 * x * x + 0.5 * x; }
double bern4(double x) { return x * x * x * x - 2.0 * x * x * x + x * x - 1.0 / 30.0; }

/// ln Gamma(z + alpha) - ln Gamma(z + 1) for large z.
double log_gamma_ratio_asymptotic(double z, double alpha) {
    const double beta = 1.0;
    return (alpha - beta) * std::log(z) + (bern2(alpha) - bern2(beta)) / (2.0 * z) -
           (bern3(alpha) - bern3(beta)) / (6.0 * z * z) +
           (bern4(alpha) - bern4(beta)) / (12.0 * z * z * z);
}

constexpr double kAsymptoticFrom = 1e4;

}  // namespace

double PopulationState::log_size() const {
    switch (kind) {
        case Kind::saturated: return log_value;
        case Kind::delta: return std::nan("");
        default: return std::log(static_cast<double>(value));
    }
}

double PopulationState::power(double s) const {
    switch (kind) {
        case Kind::delta: return 0.0;
        case Kind::saturated: return s >= 1.0 ? 1.0 : 0.0;
        default:
            if (value == 0) return 1.0;
            return std::pow(s, static_cast<double>(value));
    }
}

PgfSampler::PgfSampler(const ThetaPgf& g, SamplerOptions opts)
    : g_(g), opts_(opts), has_generator_(true) {
    if (g.theta == 0.0 && g.r == 1.0) {
        sibuya_ = true;
        sib_a_ = g.a;
        sib_d_ = std::exp(g.log_d);
        sib_lgamma_ = std::lgamma(1.0 - sib_a_);
        p_zero_ = -std::expm1(g.log_d);
        p_alive_ = sib_d_;
        defect_ = 0.0;
        modal_ = p_zero_ >= sib_d_ * sib_a_ ? 0 : 1;
        // p(k) = d (a/k) S(k-1), S(k) = S(k-1) (k-a)/k
        bulk_limit_ = kBulkSupport;
        sib_prob_.assign(bulk_limit_, 0.0);
        sib_prob_[0] = p_zero_;
        double surv = 1.0;
        for (std::uint64_t k = 1; k < bulk_limit_; ++k) {
            const double kd = static_cast<double>(k);
            sib_prob_[k] = sib_d_ * (sib_a_ / kd) * surv;
            surv *= (kd - sib_a_) / kd;
        }
        return;
    }
    try {
        pmf_ = pmf_from_theta_pgf(g, opts.tail_tol, opts.max_cutoff);
    } catch (const CutoffExceeded& e) {
        if (!opts.censor_tail) throw;
        pmf_ = e.partial();
        censored_table_ = true;
    }
    p_zero_ = g.eval(0.0);
    p_alive_ = g.increment(0.0, 1.0);
    defect_ = std::max(0.0, g.defect());
    cum_alive_.assign(pmf_.weights.size(), 0.0);
    long double acc = 0.0L;
    for (std::size_t k = 1; k < pmf_.weights.size(); ++k) {
        acc += pmf_.weights[k];
        cum_alive_[k] = static_cast<double>(acc);
    }
    modal_ = static_cast<std::uint64_t>(
        std::max_element(pmf_.weights.begin(), pmf_.weights.end()) - pmf_.weights.begin());
    bulk_limit_ = std::clamp<std::uint64_t>(pmf_.weights.size(), 1, kBulkSupport);
}

PgfSampler::PgfSampler(Pmf pmf) : pmf_(std::move(pmf)) {
    if (pmf_.weights.empty()) pmf_.weights.push_back(0.0);
    p_zero_ = pmf_.weights[0];
    cum_alive_.assign(pmf_.weights.size(), 0.0);
    long double acc = 0.0L;
    for (std::size_t k = 1; k < pmf_.weights.size(); ++k) {
        acc += pmf_.weights[k];
        cum_alive_[k] = static_cast<double>(acc);
    }
    p_alive_ = static_cast<double>(acc) + pmf_.tail_mass;
    defect_ = pmf_.defect_mass;
    modal_ = static_cast<std::uint64_t>(
        std::max_element(pmf_.weights.begin(), pmf_.weights.end()) - pmf_.weights.begin());
    bulk_limit_ = std::clamp<std::uint64_t>(pmf_.weights.size(), 1, kBulkSupport);
}

double sibuya_log_survival(double a, double k) {
    if (k <= 0.0) return 0.0;
    const double alpha = 1.0 - a;
    const double ratio = k < kAsymptoticFrom ? std::lgamma(k + alpha) - std::lgamma(k + 1.0)
                                             : log_gamma_ratio_asymptotic(k, alpha);
    return ratio - std::lgamma(alpha);
}

double PgfSampler::sibuya_log_survival(double k) const {
    if (k <= 0.0) return 0.0;
    const double alpha = 1.0 - sib_a_;
    const double ratio = k < kAsymptoticFrom ? std::lgamma(k + alpha) - std::lgamma(k + 1.0)
                                             : log_gamma_ratio_asymptotic(k, alpha);
    return ratio - sib_lgamma_;
}

PopulationState PgfSampler::sibuya_from_survival(double w) const {
    // X = min{k >= 1 : S(k) < w}.
    const double log_w = std::log(w);
    if (sibuya_log_survival(1.0) < log_w) return PopulationState::count_of(1);
    std::uint64_t lo = 1;
    std::uint64_t hi = 2;
    while (sibuya_log_survival(static_cast<double>(hi)) >= log_w) {
        lo = hi;
        if (hi >= kMaxExactCount)
            return PopulationState::saturated(-(log_w + sib_lgamma_) / sib_a_);
        hi *= 2;
    }
    while (hi - lo > 1) {
        const std::uint64_t mid = lo + (hi - lo) / 2;
        (sibuya_log_survival(static_cast<double>(mid)) >= log_w ? lo : hi) = mid;
    }
    return PopulationState::count_of(hi);
}

PopulationState PgfSampler::alive_at(double t) const {
    if (sibuya_) return sibuya_from_survival(1.0 - t);
    const double v = t * p_alive_;
    const auto first = cum_alive_.begin() + 1;
    const auto it = std::upper_bound(first, cum_alive_.end(), v);
    if (it != cum_alive_.end())
        return PopulationState::count_of(static_cast<std::uint64_t>(it - cum_alive_.begin()));

    const std::size_t J = pmf_.cutoff();
    if (censored_table_) return PopulationState::censored(J + 1);
    if (!has_generator_)
        throw CutoffExceeded("draw fell in the tail above cutoff " + std::to_string(J), pmf_);
    // Resolve the tail by continuing the expansion.
    CoefficientStream stream(g_);
    for (std::size_t k = 0; k <= J; ++k) stream.next();
    long double acc = J > 0 ? cum_alive_[J] : 0.0L;
    for (std::size_t k = J + 1; k <= J + opts_.max_cutoff; ++k) {
        acc += std::max(0.0, stream.next());
        if (acc > v) return PopulationState::count_of(k);
    }
    throw CutoffExceeded("tail draw unresolved within " + std::to_string(opts_.max_cutoff) +
                             " further terms",
                         pmf_);
}

PopulationState PgfSampler::draw(CounterRng& rng) const {
    double u = rng.uniform();
    if (u < p_zero_) return PopulationState::count_of(0);
    u -= p_zero_;
    if (u < p_alive_) return alive_at(u / p_alive_);
    return PopulationState::delta();
}

PopulationState PgfSampler::draw_alive(CounterRng& rng) const {
    if (sibuya_) return sibuya_from_survival(rng.uniform());
    return alive_at(rng.uniform());
}

PopulationState PgfSampler::draw_at_least(std::uint64_t k, CounterRng& rng) const {
    if (k < 1 || k > bulk_limit_) throw DomainError("draw_at_least bound outside the bulk range");
    for (;;) {
        const double u = rng.uniform();
        PopulationState out;
        if (sibuya_) {
            const double w = (1.0 - u) * std::exp(sibuya_log_survival(static_cast<double>(k) - 1.0));
            out = sibuya_from_survival(w);
        } else {
            const double lo = cum_alive_[k - 1];
            out = alive_at(std::min((lo + u * (p_alive_ - lo)) / p_alive_, std::nextafter(1.0, 0.0)));
        }
        // Rounding at the lower edge can land below k; redraw then.
        if (!(out.kind == PopulationState::Kind::count && out.value < k)) return out;
    }
}

double PgfSampler::prob(std::uint64_t k) const {
    if (k == 0) return p_zero_;
    if (k < sib_prob_.size()) return sib_prob_[k];
    if (sibuya_) {
        const double kd = static_cast<double>(k);
        return sib_d_ * (sib_a_ / kd) * std::exp(sibuya_log_survival(kd - 1.0));
    }
    return pmf_.weight(k);
}

PopulationState PgfSampler::draw_excluding(std::uint64_t m, CounterRng& rng) const {
    const double pm = prob(m);
    if (pm <= 0.0) return draw(rng);
    for (;;) {
        double x = rng.uniform() * (1.0 - pm);
        PopulationState out;
        if (m == 0) {
            out = x < p_alive_ ? alive_at(x / p_alive_) : PopulationState::delta();
        } else if (x < p_zero_) {
            out = PopulationState::count_of(0);
        } else {
            x -= p_zero_;
            if (x < p_alive_ - pm) {
                // Skip over m's interval inside the alive block.
                const double lo = sibuya_
                    ? sib_d_ * -std::expm1(sibuya_log_survival(static_cast<double>(m) - 1.0))
                    : cum_alive_[m - 1];
                if (x >= lo) x += pm;
                out = alive_at(std::min(x / p_alive_, std::nextafter(1.0, 0.0)));
            } else {
                out = PopulationState::delta();
            }
        }
        // Rounding at interval edges can land on m itself; redraw then.
        if (!(out.kind == PopulationState::Kind::count && out.value == m)) return out;
    }
}

PopulationState sample_offspring(const Pmf& pmf, CounterRng& rng) {
    return PgfSampler(pmf).draw(rng);
}

PopulationState sample_offspring(const PgfSampler& sampler, CounterRng& rng) {
    return sampler.draw(rng);
}

}  // namespace gwtheta
