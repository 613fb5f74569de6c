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

#include "gwtheta/simulator.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <ostream>
#include <random>
#include <thread>

#include "gwtheta/errors.hpp"
#include "gwtheta/io.hpp"

namespace gwtheta {

namespace {

constexpr std::size_t kBlockSize = 4096;

struct BlockResult {
    std::size_t completed = 0;
    std::size_t zero = 0;
    std::size_t delta = 0;
    std::size_t alive = 0;
    std::size_t truncated = 0;
    std::vector<double> pgf_sum;
    std::vector<double> pgf_sq;
    std::vector<double> scaled;
    std::map<std::uint64_t, std::size_t> histogram;
    std::size_t histogram_overflow = 0;
    std::map<std::uint64_t, std::size_t> stabilized;
    std::size_t stabilized_count = 0;
    std::map<std::string, std::size_t> errors;
};

std::uint64_t state_key(const PopulationState& s) {
    return s.is_delta() ? kDeltaKey : s.value;
}

double scaled_value(const Scaling& sc, double factor, const PopulationState& z) {
    if (sc.kind == ScalingKind::log_linear) {
        if (z.is_zero()) return -std::numeric_limits<double>::infinity();
        return factor * z.log_size();
    }
    const double size = z.kind == PopulationState::Kind::saturated
                            ? std::exp(z.log_value)
                            : static_cast<double>(z.value);
    return sc.kind == ScalingKind::linear ? factor * size : size;
}

std::string error_name(const std::exception& e) {
    if (dynamic_cast<const CutoffExceeded*>(&e)) return "CutoffExceeded";
    if (dynamic_cast<const NumericalError*>(&e)) return "NumericalError";
    if (dynamic_cast<const RejectedParameter*>(&e)) return "RejectedParameter";
    return "Error";
}

}  // namespace

std::string_view to_string(SimMode mode) {
    return mode == SimMode::direct ? "direct" : "generational";
}

OffspringLaws::OffspringLaws(const ThetaModel& model, std::size_t horizon, SamplerOptions opts) {
    laws_.reserve(horizon);
    for (std::size_t n = 1; n <= horizon; ++n) laws_.emplace_back(ThetaPgf::step(model, n), opts);
}

PopulationState next_generation(const PgfSampler& law, std::uint64_t parents, CounterRng& rng,
                                std::uint64_t cap, bool& overflow) {
    overflow = false;
    std::uint64_t total = 0;
    auto add = [&](const PopulationState& x) {
        if (!x.exact() || x.value > cap - std::min(cap, total)) {
            overflow = true;
            return false;
        }
        total += x.value;
        return true;
    };
    if (parents <= kSplitThreshold) {
        for (std::uint64_t i = 0; i < parents; ++i) {
            const PopulationState x = law.draw(rng);
            if (x.is_delta()) return x;
            if (!add(x)) return PopulationState::count_of(total);
        }
        return PopulationState::count_of(total);
    }
    // Many parents: split them over Delta, 0, 1, ..., K-1 and the tail with
    // sequential binomials (an exact multinomial draw); only tail parents are
    // drawn one at a time.
    std::uint64_t remaining = parents;
    long double mass = 1.0L;
    auto split = [&](double p) -> std::uint64_t {
        if (remaining == 0 || p <= 0.0) {
            mass -= p;
            return 0;
        }
        const double q = mass > p ? static_cast<double>(p / mass) : 1.0;
        std::binomial_distribution<std::uint64_t> pick(remaining, std::clamp(q, 0.0, 1.0));
        const std::uint64_t hits = pick(rng);
        remaining -= hits;
        mass -= p;
        return hits;
    };
    if (split(law.defect()) > 0) return PopulationState::delta();
    const std::uint64_t limit = law.bulk_limit();
    for (std::uint64_t k = 0; k < limit && remaining > 0; ++k) {
        const std::uint64_t hits = split(law.prob(k));
        if (k > 0 && hits > (cap - total) / k) {
            overflow = true;
            return PopulationState::count_of(cap);
        }
        total += hits * k;
    }
    for (; remaining > 0; --remaining)
        if (!add(law.draw_at_least(limit, rng))) return PopulationState::count_of(total);
    return PopulationState::count_of(total);
}

Trajectory simulate_trajectory(const OffspringLaws& laws, std::size_t horizon, CounterRng& rng,
                               std::uint64_t cap) {
    if (horizon > laws.horizon()) throw DomainError("horizon exceeds the cached offspring laws");
    Trajectory t;
    t.states.reserve(horizon + 1);
    t.states.push_back(PopulationState::count_of(1));
    for (std::size_t n = 1; n <= horizon; ++n) {
        const PopulationState& prev = t.states.back();
        if (!prev.alive()) {
            t.states.push_back(prev);
            continue;
        }
        bool overflow = false;
        const PopulationState next = next_generation(laws.at(n), prev.value, rng, cap, overflow);
        if (overflow) {
            t.truncated = true;
            break;
        }
        t.states.push_back(next);
        if (next.is_delta()) t.tau_delta = n;
        if (next.is_zero()) t.tau0 = n;
    }
    return t;
}

Trajectory simulate_trajectory(const ThetaModel& model, std::size_t horizon, std::uint64_t seed,
                               const SimOptions& opts) {
    const OffspringLaws laws(model, horizon, opts.sampler);
    CounterRng rng = CounterRng::for_replicate(seed, 0);
    Trajectory t = simulate_trajectory(laws, horizon, rng, opts.population_cap);
    t.seed = seed;
    return t;
}

PopulationState sample_zn_direct(const ThetaModel& model, std::size_t n, std::uint64_t seed,
                                 const SimOptions& opts) {
    const PgfSampler sampler(ThetaPgf::composite(model, composite_constants(model, n)), opts.sampler);
    CounterRng rng = CounterRng::for_replicate(seed, 0);
    return sampler.draw(rng);
}

EnsembleStats run_ensemble(const ThetaModel& model, const EnsembleConfig& cfg) {
    if (cfg.replicates < 1) throw DomainError("replicates must be at least 1");
    if (cfg.horizon < 1) throw DomainError("horizon must be at least 1");

    const CompositeConstants k = composite_constants(model, cfg.horizon);
    std::optional<PgfSampler> direct;
    std::optional<OffspringLaws> laws;
    if (cfg.mode == SimMode::direct)
        direct.emplace(ThetaPgf::composite(model, k), cfg.sampler);
    else
        laws.emplace(model, cfg.horizon, cfg.sampler);

    const double factor = cfg.scaling ? cfg.scaling->factor_at(model.theta(), k) : 1.0;
    const std::size_t grid = cfg.pgf_grid.size();
    const bool conditioned = cfg.conditioning == Conditioning::survival;
    const std::size_t window_start = cfg.horizon / 2;

    auto run_block = [&](std::size_t block) {
        BlockResult b;
        b.pgf_sum.assign(grid, 0.0);
        b.pgf_sq.assign(grid, 0.0);
        const std::size_t begin = block * kBlockSize;
        const std::size_t end = std::min(cfg.replicates, begin + kBlockSize);
        for (std::size_t i = begin; i < end; ++i) {
            CounterRng rng = CounterRng::for_replicate(cfg.base_seed, i);
            PopulationState z;
            bool truncated = false;
            try {
                if (direct) {
                    z = conditioned ? direct->draw_alive(rng) : direct->draw(rng);
                } else {
                    const Trajectory t = simulate_trajectory(*laws, cfg.horizon, rng, cfg.population_cap);
                    truncated = t.truncated;
                    z = truncated ? PopulationState::censored(cfg.population_cap) : t.states.back();
                    if (cfg.track_stabilization && !truncated) {
                        const PopulationState& last = t.states.back();
                        const bool constant = std::all_of(
                            t.states.begin() + static_cast<std::ptrdiff_t>(window_start),
                            t.states.end(), [&](const PopulationState& s) { return s == last; });
                        if (constant) {
                            ++b.stabilized_count;
                            if (last.exact() || last.is_delta()) ++b.stabilized[state_key(last)];
                        }
                    }
                }
            } catch (const Error& e) {
                ++b.errors[error_name(e)];
                continue;
            }
            ++b.completed;
            if (truncated) ++b.truncated;
            if (z.is_zero())
                ++b.zero;
            else if (z.is_delta())
                ++b.delta;
            else
                ++b.alive;

            if (z.is_delta())
                ++b.histogram[kDeltaKey];
            else if (z.exact() && z.value <= cfg.histogram_limit)
                ++b.histogram[z.value];
            else
                ++b.histogram_overflow;

            if (conditioned && !z.alive()) continue;
            for (std::size_t g = 0; g < grid; ++g) {
                const double x = z.power(cfg.pgf_grid[g]);
                b.pgf_sum[g] += x;
                b.pgf_sq[g] += x * x;
            }
            if (cfg.scaling && !z.is_delta()) b.scaled.push_back(scaled_value(*cfg.scaling, factor, z));
        }
        return b;
    };

    const std::size_t blocks = (cfg.replicates + kBlockSize - 1) / kBlockSize;
    std::vector<BlockResult> results(blocks);
    const unsigned workers = std::max(1u, std::min<unsigned>(cfg.workers, static_cast<unsigned>(blocks)));
    if (workers == 1) {
        for (std::size_t b = 0; b < blocks; ++b) results[b] = run_block(b);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        std::exception_ptr failure;
        std::atomic<bool> failed{false};
        for (unsigned w = 0; w < workers; ++w)
            pool.emplace_back([&] {
                for (std::size_t b = next++; b < blocks; b = next++) {
                    try {
                        results[b] = run_block(b);
                    } catch (...) {
                        if (!failed.exchange(true)) failure = std::current_exception();
                    }
                }
            });
        for (auto& t : pool) t.join();
        if (failure) std::rethrow_exception(failure);
    }

    // Ordered reduction: identical for any worker count.
    EnsembleStats s;
    s.replicates = cfg.replicates;
    s.horizon = cfg.horizon;
    s.mode = cfg.mode;
    s.conditioning = cfg.conditioning;
    s.pgf_grid = cfg.pgf_grid;
    s.scale_factor = factor;
    if (cfg.scaling) s.scaling_description = cfg.scaling->description;
    std::vector<double> pgf_sum(grid, 0.0), pgf_sq(grid, 0.0);
    for (const BlockResult& b : results) {
        s.completed += b.completed;
        s.zero_count += b.zero;
        s.delta_count += b.delta;
        s.alive_count += b.alive;
        s.truncated_count += b.truncated;
        for (std::size_t g = 0; g < grid; ++g) {
            pgf_sum[g] += b.pgf_sum[g];
            pgf_sq[g] += b.pgf_sq[g];
        }
        s.scaled_samples.insert(s.scaled_samples.end(), b.scaled.begin(), b.scaled.end());
        for (const auto& [key, count] : b.histogram) s.histogram[key] += count;
        s.histogram_overflow += b.histogram_overflow;
        for (const auto& [key, count] : b.stabilized) s.stabilized[key] += count;
        s.stabilized_count += b.stabilized_count;
        for (const auto& [key, count] : b.errors) s.errors[key] += count;
    }
    auto freq = [&](std::size_t count) {
        Estimate e;
        if (s.completed == 0) return e;
        const double m = static_cast<double>(s.completed);
        e.value = count / m;
        e.se = std::sqrt(e.value * (1.0 - e.value) / m);
        return e;
    };
    s.zero_freq = freq(s.zero_count);
    s.delta_freq = freq(s.delta_count);
    s.survival_freq = freq(s.alive_count);
    const double m = static_cast<double>(conditioned ? s.alive_count : s.completed);
    s.empirical_pgf.resize(grid);
    for (std::size_t g = 0; g < grid && m > 0; ++g) {
        const double mean = pgf_sum[g] / m;
        const double var = std::max(0.0, pgf_sq[g] / m - mean * mean);
        s.empirical_pgf[g] = {mean, std::sqrt(var / m)};
    }
    return s;
}

std::vector<double> empirical_law(const EnsembleStats& stats, std::uint64_t max_value) {
    std::vector<double> law(max_value + 1, 0.0);
    if (stats.completed == 0) return law;
    for (const auto& [key, count] : stats.histogram)
        if (key <= max_value) law[key] = static_cast<double>(count) / stats.completed;
    return law;
}

void write_trajectory_csv(std::ostream& out, const Trajectory& t) {
    out << "generation,state\n";
    for (std::size_t n = 0; n < t.states.size(); ++n) {
        const PopulationState& z = t.states[n];
        out << n << ',';
        switch (z.kind) {
            case PopulationState::Kind::delta: out << "Delta"; break;
            case PopulationState::Kind::saturated: out << "exp(" << format_double(z.log_value) << ')'; break;
            case PopulationState::Kind::censored: out << '>' << z.value - 1; break;
            default: out << z.value;
        }
        out << '\n';
    }
}

}  // namespace gwtheta
