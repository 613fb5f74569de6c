#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "gwtheta/rng.hpp"
#include "gwtheta/stats.hpp"

using namespace gwtheta;

TEST_CASE("kolmogorov distribution") {
    CHECK(kolmogorov_cdf(0.0) == 0.0);
    CHECK(kolmogorov_cdf(1.0) == doctest::Approx(0.7300003283).epsilon(1e-8));
    CHECK(kolmogorov_cdf(0.5) == doctest::Approx(0.0360547563).epsilon(1e-7));
    CHECK(kolmogorov_quantile(0.95) == doctest::Approx(1.3580986).epsilon(1e-6));
    CHECK(kolmogorov_quantile(0.999) == doctest::Approx(1.9495).epsilon(1e-4));
    for (double p : {0.1, 0.5, 0.9, 0.99}) CHECK(kolmogorov_cdf(kolmogorov_quantile(p)) == doctest::Approx(p));
    CHECK(ks_critical_value(10000, 0.05) == doctest::Approx(1.3581 / 100.0).epsilon(0.01));
}

TEST_CASE("ks statistic") {
    auto uniform = [](double x) { return std::clamp(x, 0.0, 1.0); };
    const std::vector<double> one = {0.5};
    CHECK(ks_statistic(one, uniform) == doctest::Approx(0.5));
    const std::vector<double> three = {0.7, 0.1, 0.4};
    CHECK(ks_statistic(three, uniform) == doctest::Approx(0.3));
}

TEST_CASE("ks test holds its level") {
    auto uniform = [](double x) { return std::clamp(x, 0.0, 1.0); };
    CounterRng rng(2024);
    const int trials = 1000, n = 200;
    int rejected = 0;
    const double crit = ks_critical_value(n, 0.05);
    for (int t = 0; t < trials; ++t) {
        std::vector<double> xs(n);
        for (double& x : xs) x = rng.uniform();
        rejected += ks_statistic(xs, uniform) > crit;
    }
    // binomial(1000, 0.05): mean 50, sd 6.9
    CHECK(rejected > 22);
    CHECK(rejected < 78);
}

TEST_CASE("total variation") {
    const std::vector<double> p = {0.5, 0.5, 0.0}, q = {0.25, 0.25, 0.5};
    CHECK(total_variation(p, q) == doctest::Approx(0.5));
    CHECK(total_variation(p, p) == 0.0);
}

TEST_CASE("chi-square homogeneity") {
    const std::vector<double> a = {50, 50}, b = {70, 30};
    // pooled 120/80 over 200: expected 60/40 in each row
    const double stat = 2 * (100.0 / 60 + 100.0 / 40);
    const ChiSquareResult r = chi_square_homogeneity(a, b);
    CHECK(r.statistic == doctest::Approx(stat));
    CHECK(r.dof == 1.0);
    CHECK(r.p_value == doctest::Approx(std::erfc(std::sqrt(stat / 2.0))).epsilon(1e-9));

    const std::vector<double> same = {100, 200, 300};
    const ChiSquareResult s = chi_square_homogeneity(same, same);
    CHECK(s.statistic == doctest::Approx(0.0));
    CHECK(s.p_value == doctest::Approx(1.0));
}

TEST_CASE("mean and standard error") {
    const std::vector<double> xs = {1, 2, 3, 4};
    const MeanSe m = mean_and_se(xs);
    CHECK(m.mean == doctest::Approx(2.5));
    CHECK(m.se == doctest::Approx(std::sqrt(5.0 / 3.0 / 4.0)));
}
