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

// Exact inverse-transform sampling from theta-family laws.
//
// The outcome space is laid out as [0 | 1, 2, ... | Delta] with masses
// p(0), P(alive) and the defect. Alive outcomes are located by their
// position inside the alive block, so conditioning on survival never loses
// resolution to a large p(0).
//
// Two backends:
//   table   cumulative masses from the series engine; a uniform falling in
//           the (<= tail_tol) tail is resolved by continuing the expansion
//   sibuya  theta == 0, r == 1: g(s) = 1 - d (1-s)^a is an atom 1-d at zero
//           plus d times a Sibuya(a) law with survival function
//           S(k) = Gamma(k+1-a) / (Gamma(1-a) Gamma(k+1)); inverted in
//           closed form, down to counts beyond 2^62 (reported on the log scale)

#include <cstdint>
#include <vector>

#include "gwtheta/pgf.hpp"
#include "gwtheta/rng.hpp"
#include "gwtheta/series.hpp"

namespace gwtheta {

/// Z_n: a count, the defect state Delta, a count too large for 64 bits
/// (kept as ln Z), or a draw known only to exceed a bound.
struct PopulationState {
    enum class Kind : std::uint8_t { count, delta, saturated, censored };

    Kind kind = Kind::count;
    std::uint64_t value = 1;  // count, or the lower bound when censored
    double log_value = 0.0;   // ln Z when saturated

    static PopulationState count_of(std::uint64_t n) { return {Kind::count, n, 0.0}; }
    static PopulationState delta() { return {Kind::delta, 0, 0.0}; }
    static PopulationState saturated(double log_z) { return {Kind::saturated, 0, log_z}; }
    static PopulationState censored(std::uint64_t lower) { return {Kind::censored, lower, 0.0}; }

    bool is_delta() const noexcept { return kind == Kind::delta; }
    bool is_zero() const noexcept { return kind == Kind::count && value == 0; }
    bool alive() const noexcept { return !is_delta() && !is_zero(); }
    bool exact() const noexcept { return kind == Kind::count; }
    /// ln Z for alive states (lower bound when censored).
    double log_size() const;
    /// s^Z for 0 <= s <= 1 (0 for Delta; s^bound when censored).
    double power(double s) const;

    friend bool operator==(const PopulationState&, const PopulationState&) = default;
};

/// Counts up to this bound are exact integers.
inline constexpr std::uint64_t kMaxExactCount = std::uint64_t{1} << 62;

struct SamplerOptions {
    double tail_tol = kDefaultTailTol;
    std::size_t max_cutoff = kDefaultMaxCutoff;
    /// Accept a truncated table for heavy tails; draws beyond it are censored.
    bool censor_tail = false;
};

class PgfSampler {
public:
    explicit PgfSampler(const ThetaPgf& g, SamplerOptions opts = {});
    /// Table backend over a precomputed pmf (no re-expansion possible).
    explicit PgfSampler(Pmf pmf);

    PopulationState draw(CounterRng& rng) const;
    /// Conditioned on the outcome being neither 0 nor Delta.
    PopulationState draw_alive(CounterRng& rng) const;
    /// Conditioned on the outcome differing from the count `m`.
    PopulationState draw_excluding(std::uint64_t m, CounterRng& rng) const;

    /// Conditioned on the outcome being a count >= k, for 1 <= k <= bulk_limit().
    PopulationState draw_at_least(std::uint64_t k, CounterRng& rng) const;

    double prob(std::uint64_t k) const;
    /// Counts below this have cheap exact masses; used to split many parents at once.
    std::uint64_t bulk_limit() const noexcept { return bulk_limit_; }
    double p_zero() const noexcept { return p_zero_; }
    double p_alive() const noexcept { return p_alive_; }
    double defect() const noexcept { return defect_; }
    /// Most likely count among those tabulated.
    std::uint64_t modal_value() const noexcept { return modal_; }
    bool closed_form() const noexcept { return sibuya_; }
    bool censoring() const noexcept { return censored_table_; }
    const Pmf& pmf() const noexcept { return pmf_; }

private:
    /// Outcome at fraction t in [0, 1) of the alive block.
    PopulationState alive_at(double t) const;
    PopulationState sibuya_from_survival(double w) const;
    double sibuya_log_survival(double k) const;

    ThetaPgf g_;
    SamplerOptions opts_;
    bool sibuya_ = false;
    bool has_generator_ = false;
    bool censored_table_ = false;
    double sib_a_ = 0.0;
    double sib_d_ = 0.0;
    double sib_lgamma_ = 0.0;  // lgamma(1-a)
    Pmf pmf_;
    std::vector<double> cum_alive_;  // cum_alive_[k] = p(1) + ... + p(k)
    double p_zero_ = 0.0;
    double p_alive_ = 0.0;
    double defect_ = 0.0;
    std::uint64_t modal_ = 0;
    std::uint64_t bulk_limit_ = 1;
    std::vector<double> sib_prob_;  // sibuya masses below bulk_limit_
};

/// Support points handled in bulk by the multinomial split.
inline constexpr std::uint64_t kBulkSupport = 1024;

/// ln S(k) for the Sibuya(a) law, S(k) = P(X > k) = Gamma(k+1-a) / (Gamma(1-a) Gamma(k+1)).
double sibuya_log_survival(double a, double k);

/// One draw from a tabulated pmf; a draw in the tail raises CutoffExceeded
/// because a bare pmf cannot be re-expanded.
PopulationState sample_offspring(const Pmf& pmf, CounterRng& rng);
PopulationState sample_offspring(const PgfSampler& sampler, CounterRng& rng);

}  // namespace gwtheta
