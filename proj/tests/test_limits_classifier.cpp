#include <doctest.h>

#include <cmath>
#include <vector>

#include "gwtheta/classifier.hpp"
#include "gwtheta/harness.hpp"
#include "gwtheta/limits.hpp"
#include "models.hpp"

using namespace gwtheta;
using gwtheta::testing::model;
using E = EnvSequence;

namespace {

template <class F>
std::vector<double> sequence(std::size_t n, F f) {
    std::vector<double> xs(n);
    for (std::size_t i = 0; i < n; ++i) xs[i] = f(static_cast<double>(i + 1));
    return xs;
}

}  // namespace

TEST_CASE("limit detection on known sequences") {
    const auto conv = detect_limit(sequence(10000, [](double n) { return 1.0 / 3.0 + 1.0 / n; }), 1e-6, false);
    REQUIRE(conv.determined());
    CHECK(conv.value == doctest::Approx(1.0 / 3.0).epsilon(1e-6));

    const auto fast = detect_limit(sequence(10000, [](double n) { return 2.0 - std::exp(-n); }), 1e-9, false);
    REQUIRE(fast.determined());
    CHECK(fast.value == doctest::Approx(2.0));

    const auto power = detect_limit(sequence(10000, [](double n) { return std::pow(n, -2.0 / 3.0); }), 1e-6, false);
    REQUIRE(power.determined());
    CHECK(power.value == doctest::Approx(0.0).epsilon(1e-6).scale(1.0));

    double h = 0.0;
    const auto harmonic = detect_limit(sequence(10000, [&](double n) { return h += 1.0 / n; }), 1e-6, false);
    CHECK(harmonic.infinite());
    CHECK(std::isinf(harmonic.value));

    CHECK(detect_limit(sequence(10000, [](double n) { return n * n; }), 1e-6, false).infinite());

    const auto osc = sequence(10000, [](double n) { return std::fmod(n, 2.0) == 0.0 ? 1.0 : 2.0; });
    CHECK(detect_limit(osc, 1e-6, true).status == LimitStatus::oscillating);
    CHECK(detect_limit(osc, 1e-6, false).status == LimitStatus::undetermined);

    const auto slow = detect_limit(sequence(10000, [](double n) { return 1.0 / std::log(n + 1.0); }), 1e-6, false);
    CHECK_FALSE(slow.determined());
}

TEST_CASE("regime examples") {
    const auto ex1 = model(1.0, 1.0, E::harmonic(), E::proportional(2.0));
    CHECK(classify(ex1, limit_constants(ex1, 10000, 1e-6)).regime == Regime::supercritical);
    const auto ex3 = make_scenario("Ex3").model;
    CHECK(classify(ex3, limit_constants(ex3, 10000, 1e-6)).regime == Regime::critical);
    const auto ex4 = make_scenario("Ex4b").model;
    CHECK(classify(ex4, limit_constants(ex4, 10000, 1e-6)).regime == Regime::strictly_subcritical);
    const auto ex2 = model(1.0, 1.0, E::convergent(), E::proportional(1.0));
    CHECK(classify(ex2, limit_constants(ex2, 10000, 1e-6)).regime == Regime::asymptotically_degenerate);
}

TEST_CASE("every registry scenario gets its theorem's label") {
    for (const Scenario& sc : registry()) {
        CAPTURE(sc.id);
        const RegimeLabel label = classify(sc.model, limit_constants(sc.model, 10000, 1e-6));
        CHECK(label.regime == sc.expected_regime);
        CHECK(label.sub_label == sc.expected_sub_label);
        const auto base = [](const std::string& id) { return id.substr(0, id.find_first_of("(-")); };
        CHECK(base(label.theorem_id()) == base(sc.theorem_id));
        CHECK(label.evidence_case == sc.model.case_label());
        CHECK_FALSE(label.basis.empty());
    }
}

TEST_CASE("regime names round trip") {
    for (const Regime r : {Regime::supercritical, Regime::asymptotically_degenerate, Regime::critical,
                           Regime::strictly_subcritical, Regime::loosely_subcritical, Regime::infinite_mean,
                           Regime::defective, Regime::undetermined})
        CHECK(regime_from_string(to_string(r)) == r);
    CHECK_FALSE(regime_from_string("subcritical").has_value());
}

TEST_CASE("convergence conditions") {
    const auto ex2 = model(1.0, 1.0, E::convergent(), E::proportional(1.0));
    const auto ex1 = model(1.0, 1.0, E::harmonic(), E::proportional(1.0));
    CHECK(convergence_conditions(ex2, 10000).church_lindvall == TriState::holds);
    CHECK(convergence_conditions(ex1, 10000).church_lindvall == TriState::fails);

    const ConvergenceConditions iv = convergence_conditions(make_scenario("Ex6iv").model, 10000);
    const ConvergenceConditions iii = convergence_conditions(make_scenario("Ex6iii").model, 10000);
    CHECK(iv.condition_a0 == TriState::holds);
    CHECK(iv.condition_A1 == TriState::holds);
    CHECK(iii.condition_A1 == TriState::fails);
}
