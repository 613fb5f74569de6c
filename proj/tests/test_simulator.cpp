#include <doctest.h>

#include <cmath>
#include <sstream>

#include "gwtheta/analytics.hpp"
#include "gwtheta/io.hpp"
#include "gwtheta/simulator.hpp"
#include "gwtheta/stats.hpp"
#include "models.hpp"

using namespace gwtheta;
using gwtheta::testing::model;
using E = EnvSequence;

namespace {

bool within_se(double freq, double p, std::size_t n, double z = 4.0) {
    return std::abs(freq - p) <= z * std::sqrt(p * (1.0 - p) / static_cast<double>(n)) + 1e-12;
}

}  // namespace

TEST_CASE("trajectories are reproducible and absorbing") {
    const auto m = model(0.5, 2.0, E::harmonic(), E::proportional(0.85));
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const Trajectory a = simulate_trajectory(m, 60, seed);
        const Trajectory b = simulate_trajectory(m, 60, seed);
        REQUIRE(a.states == b.states);
        CHECK(a.states.front() == PopulationState::count_of(1));
        for (std::size_t n = 1; n < a.states.size(); ++n) {
            if (a.states[n - 1].is_zero()) CHECK(a.states[n].is_zero());
            if (a.states[n - 1].is_delta()) CHECK(a.states[n].is_delta());
        }
        if (a.tau0) CHECK(a.states[*a.tau0].is_zero());
        if (a.tau_delta) CHECK(a.states[*a.tau_delta].is_delta());
    }
}

TEST_CASE("extinction by generation 4") {
    const auto lf = model(1.0, 1.0, E::constant(1.0), E::constant(1.0));
    EnsembleConfig cfg;
    cfg.horizon = 4;
    cfg.replicates = 100000;
    cfg.base_seed = 17;
    cfg.mode = SimMode::generational;
    const EnsembleStats s = run_ensemble(lf, cfg);
    CHECK(s.completed == cfg.replicates);
    CHECK(within_se(s.zero_freq.value, 0.8, cfg.replicates));
    CHECK(s.zero_freq.se == doctest::Approx(std::sqrt(0.8 * 0.2 / 1e5)).epsilon(0.05));

    int zeros = 0;
    for (std::uint64_t i = 0; i < 100000; ++i) zeros += sample_zn_direct(lf, 4, i).is_zero();
    CHECK(within_se(zeros / 1e5, 0.8, 100000));
}

TEST_CASE("no defect when c is identically one") {
    const auto m = model(0.0, 2.0, E::harmonic(), E::constant(1.0));
    EnsembleConfig cfg;
    cfg.horizon = 50;
    cfg.replicates = 100000;
    cfg.mode = SimMode::generational;
    const EnsembleStats s = run_ensemble(m, cfg);
    CHECK(s.delta_count == 0);
    CHECK(s.delta_freq.value == 0.0);
}

TEST_CASE("ensembles do not depend on the worker count") {
    const auto m = model(-0.5, 1.0, E::harmonic(), E::proportional(0.5));
    for (const SimMode mode : {SimMode::direct, SimMode::generational}) {
        EnsembleConfig cfg;
        cfg.horizon = 30;
        cfg.replicates = 20000;
        cfg.base_seed = 99;
        cfg.mode = mode;
        cfg.scaling = Scaling{ScalingKind::linear, Scaling::Factor::a, 1.0, Conditioning::none, "A_n Z_n"};
        cfg.sampler.censor_tail = true;
        cfg.workers = 1;
        const std::string one = to_json(run_ensemble(m, cfg)).dump();
        cfg.workers = 8;
        const EnsembleStats eight = run_ensemble(m, cfg);
        CHECK(to_json(eight).dump() == one);
        cfg.workers = 3;
        CHECK(to_json(run_ensemble(m, cfg)).dump() == one);
        CHECK(eight.scaled_samples.size() == eight.zero_count + eight.alive_count);
    }
}

TEST_CASE("generational and direct modes agree") {
    for (const auto& [name, m] : gwtheta::testing::case_models()) {
        CAPTURE(name);
        EnsembleConfig cfg;
        cfg.horizon = 8;
        cfg.replicates = 40000;
        cfg.histogram_limit = 40;
        cfg.sampler.censor_tail = true;
        cfg.mode = SimMode::direct;
        cfg.base_seed = 1;
        const EnsembleStats d = run_ensemble(m, cfg);
        cfg.mode = SimMode::generational;
        cfg.base_seed = 2;
        const EnsembleStats g = run_ensemble(m, cfg);
        std::vector<double> a, b;
        for (std::uint64_t k = 0; k <= 40; ++k) {
            a.push_back(static_cast<double>(d.histogram.count(k) ? d.histogram.at(k) : 0));
            b.push_back(static_cast<double>(g.histogram.count(k) ? g.histogram.at(k) : 0));
        }
        a.push_back(static_cast<double>(d.histogram_overflow + (d.histogram.count(kDeltaKey) ? d.histogram.at(kDeltaKey) : 0)));
        b.push_back(static_cast<double>(g.histogram_overflow + (g.histogram.count(kDeltaKey) ? g.histogram.at(kDeltaKey) : 0)));
        const ChiSquareResult chi = chi_square_homogeneity(a, b);
        CHECK(chi.p_value > 1e-4);
        // and both against the exact extinction probability
        const double f0 = composed_pgf(m, 8, 0.0);
        CHECK(within_se(d.zero_freq.value, f0, cfg.replicates, 5.0));
        CHECK(within_se(g.zero_freq.value, f0, cfg.replicates, 5.0));
    }
}

TEST_CASE("empirical pgf matches the exact pgf") {
    const auto m = model(1.0, 1.0, E::harmonic(), E::proportional(1.0));
    EnsembleConfig cfg;
    cfg.horizon = 20;
    cfg.replicates = 50000;
    const EnsembleStats s = run_ensemble(m, cfg);
    for (std::size_t i = 0; i < s.pgf_grid.size(); ++i) {
        const double exact = composed_pgf(m, 20, s.pgf_grid[i]);
        CHECK(std::abs(s.empirical_pgf[i].value - exact) <= 5 * s.empirical_pgf[i].se + 1e-12);
    }
}

TEST_CASE("large generations are split in bulk") {
    const PgfSampler law(ThetaPgf::general(1.0, 1.0, 1.0, 1.0));  // mean 1, variance 2
    CounterRng rng(8);
    bool overflow = false;
    const std::uint64_t parents = 4'000'000;
    const PopulationState z = next_generation(law, parents, rng, kDefaultPopulationCap, overflow);
    REQUIRE(z.exact());
    CHECK_FALSE(overflow);
    const double sd = std::sqrt(2.0 * parents);
    CHECK(std::abs(static_cast<double>(z.value) - double(parents)) <= 5 * sd);
}

TEST_CASE("population cap") {
    // a strongly supercritical environment overflows a small cap
    const auto m = model(1.0, 1.0, E::constant(0.2), E::constant(0.8));
    SimOptions opts;
    opts.population_cap = 1000;
    const Trajectory t = simulate_trajectory(m, 50, 3, opts);
    CHECK(t.truncated);
}

TEST_CASE("trajectory csv") {
    const auto m = model(1.0, 1.0, E::constant(1.0), E::constant(1.0));
    std::ostringstream os;
    write_trajectory_csv(os, simulate_trajectory(m, 5, 1));
    CHECK(os.str().rfind("generation,", 0) == 0);
}
