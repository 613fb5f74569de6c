#include <doctest.h>

#include <cmath>

#include "gwtheta/environment.hpp"
#include "gwtheta/errors.hpp"
#include "gwtheta/pgf.hpp"
#include "models.hpp"

using namespace gwtheta;
using gwtheta::testing::model;
using gwtheta::testing::single_step;

TEST_CASE("parameter cases") {
    CHECK(classify_parameters(1.0, 1.0) == CaseLabel::a);
    CHECK(classify_parameters(0.3, 2.0) == CaseLabel::b);
    CHECK(classify_parameters(-0.5, 1.0) == CaseLabel::c);
    CHECK(classify_parameters(-0.5, 3.0) == CaseLabel::d);
    CHECK(classify_parameters(0.0, 1.0) == CaseLabel::e);
    CHECK(classify_parameters(0.0, 2.0) == CaseLabel::f);
}

TEST_CASE("validation accepts and rejects") {
    const auto ex1 = model(1.0, 1.0, EnvSequence::harmonic(), EnvSequence::proportional(2.0), 100);
    CHECK(ex1.case_label() == CaseLabel::a);
    CHECK(ex1.checked_horizon() == 100);

    CHECK_THROWS_AS(model(-1.0, 1.0, EnvSequence::harmonic(), EnvSequence::proportional(1.0)),
                    RejectedParameter);
    CHECK_THROWS_AS(single_step(0.0, 2.0, 0.5, 1.5), RejectedParameter);
    CHECK_THROWS_AS(single_step(1.5, 1.0, 1.0, 1.0), RejectedParameter);
    CHECK_THROWS_AS(single_step(0.5, 0.5, 1.0, 1.0), RejectedParameter);
    CHECK_THROWS_AS(single_step(0.5, 1.0, 0.0, 1.0), RejectedParameter);
    CHECK_THROWS_AS(single_step(std::nan(""), 1.0, 1.0, 1.0), RejectedParameter);

    try {
        model(0.0, 2.0, EnvSequence::table({0.5, 0.5, 0.5}), EnvSequence::table({1.0, 1.0, 1.5}), 3);
        FAIL("expected rejection");
    } catch (const RejectedParameter& e) {
        CHECK(e.index() == 3);
    }
}

TEST_CASE("table tail rule") {
    const auto seq = EnvSequence::table({0.5}, TailRule::error);
    CHECK(seq.at(1, Slot::a).value == 0.5);
    CHECK_THROWS(seq.at(2, Slot::a));
    CHECK(EnvSequence::table({0.5, 0.25}).at(9, Slot::a).value == 0.25);
}

TEST_CASE("family values") {
    const auto m = model(1.0, 1.0, EnvSequence::harmonic(), EnvSequence::proportional(2.0));
    for (std::size_t n = 1; n <= 20; ++n) {
        const EnvPoint p = m.at(n);
        const double nn = static_cast<double>(n);
        CHECK(p.a == doctest::Approx(nn / (nn + 1.0)).epsilon(1e-15));
        CHECK(p.c == doctest::Approx((1.0 - p.a) * 2.0).epsilon(1e-15));
        CHECK(p.one_minus_a == doctest::Approx(1.0 / (nn + 1.0)).epsilon(1e-15));
    }
}

TEST_CASE("one-step generating function") {
    CHECK(step_pgf(single_step(1.0, 1.0, 1.0, 1.0), 1, 0.0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(step_pgf(single_step(0.0, 2.0, 0.5, 1.0), 1, 1.0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(step_pgf(single_step(0.0, 2.0, 0.5, 0.0), 1, 1.0) ==
          doctest::Approx(2.0 - std::sqrt(2.0)).epsilon(1e-15));

    for (const auto& [name, m] : gwtheta::testing::case_models()) {
        CAPTURE(name);
        for (std::size_t n : {1, 2, 5, 17}) {
            // left limit at r: theta < 0 keeps the atom r - c^(-1/theta)
            const double at_r = m.theta() < 0.0 ? m.r() - std::pow(m.at(n).c, -1.0 / m.theta()) : m.r();
            CHECK(step_pgf(m, n, m.r()) == doctest::Approx(at_r).epsilon(1e-15));
            // increasing on [0, 1]
            double prev = step_pgf(m, n, 0.0);
            CHECK(prev >= 0.0);
            for (double s : gwtheta::testing::kGrid) {
                const double v = step_pgf(m, n, s);
                CHECK(v >= prev - 1e-15);
                prev = v;
            }
            CHECK(prev <= 1.0 + 1e-12);
        }
    }
}

TEST_CASE("theta pgf direct formula") {
    // r - (a (r-s)^-theta + c)^(-1/theta), evaluated independently
    for (const double theta : {1.0, 0.5, -0.5, -0.25}) {
        for (const double r : {1.0, 2.5}) {
            const double a = 0.7, c = 0.4;
            const ThetaPgf g = ThetaPgf::general(theta, r, a, c);
            for (double s : gwtheta::testing::kGrid) {
                const double expect = r - std::pow(a * std::pow(r - s, -theta) + c, -1.0 / theta);
                CHECK(g.eval(s) == doctest::Approx(expect).epsilon(1e-13));
            }
        }
    }
    const ThetaPgf h = ThetaPgf::log_form(2.0, 0.5, std::log(0.8));
    CHECK(h.eval(0.3) == doctest::Approx(2.0 - 0.8 * std::sqrt(1.7)).epsilon(1e-14));
}

TEST_CASE("power difference is accurate for tiny increments") {
    const double y = 1.3;
    for (const double gamma : {-2.0, -0.5, 0.5, 2.0}) {
        for (const double delta : {1e-14, 1e-8}) {
            // second-order Taylor reference, remainder O(delta^3)
            const double ref = gamma * std::pow(y, gamma - 1.0) * delta +
                               0.5 * gamma * (gamma - 1.0) * std::pow(y, gamma - 2.0) * delta * delta;
            CHECK(power_difference(y, delta, gamma) == doctest::Approx(ref).epsilon(1e-9));
        }
        CHECK(power_difference(y, 0.5, gamma) ==
              doctest::Approx(std::pow(1.8, gamma) - std::pow(1.3, gamma)).epsilon(1e-14));
    }
}
