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
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gwtheta/analytics.hpp"
#include "gwtheta/environment.hpp"
#include "gwtheta/rng.hpp"
#include "gwtheta/sampler.hpp"

namespace gwtheta {

enum class SimMode { generational, direct };

std::string_view to_string(SimMode mode);

inline constexpr std::uint64_t kDefaultPopulationCap = 1'000'000'000;
/// Above this many parents a generation is drawn by a multinomial split.
inline constexpr std::uint64_t kSplitThreshold = 10'000;

struct SimOptions {
    std::uint64_t population_cap = kDefaultPopulationCap;
    SamplerOptions sampler;
};

/// One sampler per generation 1..horizon, built once and shared read-only.
class OffspringLaws {
public:
    OffspringLaws(const ThetaModel& model, std::size_t horizon, SamplerOptions opts = {});

    const PgfSampler& at(std::size_t n) const { return laws_.at(n - 1); }
    std::size_t horizon() const noexcept { return laws_.size(); }

private:
    std::vector<PgfSampler> laws_;
};

struct Trajectory {
    std::vector<PopulationState> states;  // generations 0..horizon (shorter when truncated)
    std::optional<std::size_t> tau0;
    std::optional<std::size_t> tau_delta;
    std::uint64_t seed = 0;  // base seed of the stream
    bool truncated = false;  // population exceeded the cap

    std::optional<std::size_t> tau() const { return tau0 ? tau0 : tau_delta; }
};

/// Z_{n} given Z_{n-1} = parents: `parents` i.i.d. draws, short-circuiting at
/// the first Delta. Sets `overflow` when the sum exceeds `cap`.
PopulationState next_generation(const PgfSampler& law, std::uint64_t parents, CounterRng& rng,
                                std::uint64_t cap, bool& overflow);

Trajectory simulate_trajectory(const OffspringLaws& laws, std::size_t horizon, CounterRng& rng,
                               std::uint64_t cap = kDefaultPopulationCap);
Trajectory simulate_trajectory(const ThetaModel& model, std::size_t horizon, std::uint64_t seed,
                               const SimOptions& opts = {});

/// One draw of Z_n from its composite law.
PopulationState sample_zn_direct(const ThetaModel& model, std::size_t n, std::uint64_t seed,
                                 const SimOptions& opts = {});

struct Estimate {
    double value = 0.0;
    double se = 0.0;
};

struct EnsembleConfig {
    std::size_t horizon = 1;
    std::size_t replicates = 1000;
    std::uint64_t base_seed = 0;
    unsigned workers = 1;
    SimMode mode = SimMode::direct;
    Conditioning conditioning = Conditioning::none;
    std::optional<Scaling> scaling;
    std::vector<double> pgf_grid = {0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
    std::uint64_t population_cap = kDefaultPopulationCap;
    SamplerOptions sampler;
    std::uint64_t histogram_limit = 1000;
    bool track_stabilization = false;
};

inline constexpr std::uint64_t kDeltaKey = ~std::uint64_t{0};

struct EnsembleStats {
    std::size_t replicates = 0;
    std::size_t completed = 0;
    std::size_t horizon = 0;
    SimMode mode = SimMode::direct;
    Conditioning conditioning = Conditioning::none;

    std::size_t zero_count = 0;
    std::size_t delta_count = 0;
    std::size_t alive_count = 0;
    std::size_t truncated_count = 0;
    Estimate zero_freq;
    Estimate delta_freq;
    Estimate survival_freq;

    /// E(s^Z_n; Z_n != Delta), or E(s^Z_n | alive) under survival conditioning.
    std::vector<double> pgf_grid;
    std::vector<Estimate> empirical_pgf;

    std::string scaling_description;
    double scale_factor = 1.0;
    std::vector<double> scaled_samples;  // replicate order

    std::map<std::uint64_t, std::size_t> histogram;  // final counts <= limit; Delta under kDeltaKey
    std::size_t histogram_overflow = 0;

    /// Paths constant on [horizon/2, horizon], by the value held.
    std::map<std::uint64_t, std::size_t> stabilized;
    std::size_t stabilized_count = 0;

    std::map<std::string, std::size_t> errors;
};

EnsembleStats run_ensemble(const ThetaModel& model, const EnsembleConfig& config);

/// Empirical law on {0..max_value} from a histogram, normalized by `total`.
std::vector<double> empirical_law(const EnsembleStats& stats, std::uint64_t max_value);

void write_trajectory_csv(std::ostream& out, const Trajectory& t);

}  // namespace gwtheta
