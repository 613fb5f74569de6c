#include <doctest.h>

#include <cmath>
#include <set>
#include <vector>

#include "gwtheta/errors.hpp"
#include "gwtheta/rng.hpp"
#include "gwtheta/sampler.hpp"
#include "gwtheta/series.hpp"
#include "gwtheta/stats.hpp"

using namespace gwtheta;

TEST_CASE("philox4x32-10 known answers") {
    CHECK(philox4x32({0, 0, 0, 0}, {0, 0}) == PhiloxBlock{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
    CHECK(philox4x32({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}) ==
          PhiloxBlock{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
    CHECK(philox4x32({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}) ==
          PhiloxBlock{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("counter rng streams") {
    CounterRng a(42), b(42), c(43);
    for (int i = 0; i < 100; ++i) {
        const auto x = a();
        CHECK(x == b());
        CHECK(x != c());
    }
    std::set<std::uint64_t> keys;
    for (std::uint64_t i = 0; i < 10000; ++i) keys.insert(derive_stream_key(7, i));
    CHECK(keys.size() == 10000);
    CHECK(derive_stream_key(7, 3) != derive_stream_key(8, 3));

    CounterRng u(1);
    double sum = 0.0;
    for (int i = 0; i < 100000; ++i) {
        const double x = u.uniform();
        REQUIRE(x > 0.0);
        REQUIRE(x < 1.0);
        sum += x;
    }
    CHECK(std::abs(sum / 100000 - 0.5) < 4 * std::sqrt(1.0 / 12 / 100000));
}

TEST_CASE("sibuya survival") {
    // P(X > k) = prod_{j <= k} (1 - a/j)
    for (const double a : {0.05, 0.3, 0.5, 0.9}) {
        double log_prod = 0.0;
        for (int k = 1; k <= 200; ++k) {
            log_prod += std::log1p(-a / k);
            CHECK(sibuya_log_survival(a, k) == doctest::Approx(log_prod).epsilon(1e-12));
        }
        // large k against lgamma, and continuity across the switch point
        for (const double k : {2e4, 1e5}) {
            const double ref = std::lgamma(k + 1.0 - a) - std::lgamma(1.0 - a) - std::lgamma(k + 1.0);
            CHECK(sibuya_log_survival(a, k) == doctest::Approx(ref).epsilon(1e-10));
        }
        const double lo = sibuya_log_survival(a, 9999.0), hi = sibuya_log_survival(a, 10000.0);
        const double hi2 = sibuya_log_survival(a, 10001.0);
        CHECK(hi - lo == doctest::Approx(std::log1p(-a / 10000.0)).epsilon(1e-8));
        CHECK(hi2 - hi == doctest::Approx(std::log1p(-a / 10001.0)).epsilon(1e-8));
    }
}

TEST_CASE("degenerate laws") {
    Pmf all_delta;
    all_delta.weights = {0.0};
    all_delta.defect_mass = 1.0;
    Pmf all_zero;
    all_zero.weights = {1.0};
    const PgfSampler d(all_delta), z(all_zero);
    CounterRng rng(5);
    for (int i = 0; i < 1000; ++i) {
        CHECK(d.draw(rng).is_delta());
        CHECK(z.draw(rng).is_zero());
    }
}

TEST_CASE("geometric law mean") {
    const PgfSampler g(ThetaPgf::general(1.0, 1.0, 1.0, 1.0));
    CounterRng rng(11);
    std::vector<double> xs(1'000'000);
    for (double& x : xs) x = static_cast<double>(g.draw(rng).value);
    const MeanSe m = mean_and_se(xs);
    CHECK(std::abs(m.mean - 1.0) <= 4 * m.se);
}

TEST_CASE("defect frequency") {
    const PgfSampler g(ThetaPgf::log_form(2.0, 0.5, 0.5 * std::log(2.0)));
    const double p = std::sqrt(2.0) - 1.0;
    CounterRng rng(3);
    const int n = 100000;
    int delta = 0;
    for (int i = 0; i < n; ++i) delta += g.draw(rng).is_delta();
    CHECK(std::abs(double(delta) / n - p) <= 4 * std::sqrt(p * (1 - p) / n));
}

TEST_CASE("sampler frequencies match the pmf") {
    const std::vector<ThetaPgf> laws = {
        ThetaPgf::general(0.5, 1.0, 0.4, 0.7),
        ThetaPgf::general(-0.5, 1.0, 0.5, 0.3),
        ThetaPgf::general(-0.5, 2.0, 0.6, 0.5),
        ThetaPgf::log_form(1.0, 0.4, 0.0),        // Sibuya, closed form
        ThetaPgf::log_form(1.0, 0.4, std::log(0.6)),
        ThetaPgf::log_form(2.0, 0.3, 0.7 * std::log(1.5)),
    };
    for (std::size_t li = 0; li < laws.size(); ++li) {
        CAPTURE(li);
        SamplerOptions opts;
        opts.censor_tail = true;  // censored draws land in the overflow bin
        const PgfSampler s(laws[li], opts);
        CounterRng rng(100 + li);
        const int n = 200000;
        const std::uint64_t bins = 20;
        std::vector<double> obs(bins + 2, 0.0);  // 0..bins-1, overflow, Delta
        for (int i = 0; i < n; ++i) {
            const PopulationState x = s.draw(rng);
            if (x.is_delta()) ++obs[bins + 1];
            else if (x.exact() && x.value < bins) ++obs[x.value];
            else ++obs[bins];
        }
        double below = 0.0;
        for (std::uint64_t k = 0; k < bins; ++k) {
            const double p = s.prob(k);
            below += p;
            CHECK(std::abs(obs[k] / n - p) <= 5 * std::sqrt(p * (1 - p) / n) + 1e-12);
        }
        const double pd = s.defect();
        CHECK(std::abs(obs[bins + 1] / n - pd) <= 5 * std::sqrt(pd * (1 - pd) / n) + 1e-12);
        const double po = 1.0 - below - pd;
        CHECK(std::abs(obs[bins] / n - po) <= 5 * std::sqrt(po * (1 - po) / n) + 1e-12);
    }
}

TEST_CASE("conditioned draws") {
    const PgfSampler s(ThetaPgf::general(1.0, 1.0, 0.5, 0.5));
    CounterRng rng(9);
    for (int i = 0; i < 10000; ++i) {
        CHECK(s.draw_alive(rng).alive());
        const PopulationState x = s.draw_excluding(1, rng);
        CHECK_FALSE((x.exact() && x.value == 1));
    }
}

TEST_CASE("draws are reproducible") {
    const PgfSampler s(ThetaPgf::log_form(1.0, 0.2, std::log(0.7)));
    for (std::uint64_t seed : {1u, 2u, 99u}) {
        CounterRng a(seed), b(seed);
        for (int i = 0; i < 100; ++i) CHECK(s.draw(a) == s.draw(b));
    }
}

TEST_CASE("tail censoring") {
    // theta < 0, r = 1: heavy tail, censored above the table
    SamplerOptions opts;
    opts.censor_tail = true;
    opts.max_cutoff = 256;
    const PgfSampler s(ThetaPgf::general(-0.9, 1.0, 0.05, 0.2), opts);
    CHECK(s.censoring());
    CounterRng rng(4);
    int censored = 0;
    for (int i = 0; i < 20000; ++i) {
        const PopulationState x = s.draw(rng);
        if (x.kind == PopulationState::Kind::censored) {
            ++censored;
            CHECK(x.value > 256);
        }
    }
    CHECK(censored > 0);
}

TEST_CASE("draws above a bound") {
    for (const ThetaPgf& g : {ThetaPgf::general(0.5, 1.0, 0.4, 0.7), ThetaPgf::log_form(1.0, 0.6, std::log(0.8))}) {
        const PgfSampler s(g, SamplerOptions{1e-12, 1 << 14, true});
        const std::uint64_t k = 3;
        double above = s.p_alive();
        for (std::uint64_t j = 1; j < k; ++j) above -= s.prob(j);
        CounterRng rng(41);
        const int n = 100000;
        std::vector<int> hits(4, 0);
        for (int i = 0; i < n; ++i) {
            const PopulationState x = s.draw_at_least(k, rng);
            REQUIRE(x.value >= k);
            if (x.exact() && x.value < k + 4) ++hits[x.value - k];
        }
        for (std::uint64_t j = 0; j < 4; ++j) {
            const double p = s.prob(k + j) / above;
            CHECK(std::abs(hits[j] / double(n) - p) <= 5 * std::sqrt(p * (1 - p) / n));
        }
        CHECK_THROWS_AS(s.draw_at_least(0, rng), DomainError);
    }
}
