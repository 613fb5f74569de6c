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

#include "gwtheta/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <boost/math/distributions/chi_squared.hpp>

namespace gwtheta {

double ks_statistic(std::span<const double> samples, const std::function<double(double)>& cdf) {
    std::vector<double> xs(samples.begin(), samples.end());
    std::sort(xs.begin(), xs.end());
    const double n = static_cast<double>(xs.size());
    double d = 0.0;
    std::size_t i = 0;
    while (i < xs.size()) {
        std::size_t j = i;
        while (j < xs.size() && xs[j] == xs[i]) ++j;
        const double x = xs[i];
        const double f = cdf(x);
        const double f_left =
            std::isinf(x) && x < 0 ? 0.0 : cdf(std::nextafter(x, -std::numeric_limits<double>::infinity()));
        d = std::max({d, std::abs(j / n - f), std::abs(i / n - f_left)});
        i = j;
    }
    return d;
}

double kolmogorov_cdf(double x) {
    if (x <= 0.0) return 0.0;
    if (x < 0.3) {
        // Small-x form: sqrt(2 pi)/x sum exp(-(2k-1)^2 pi^2 / (8 x^2)).
        const double pi = 3.14159265358979323846;
        double s = 0.0;
        for (int k = 1; k <= 20; ++k) {
            const double t = (2.0 * k - 1.0) * pi;
            s += std::exp(-t * t / (8.0 * x * x));
        }
        return std::sqrt(2.0 * pi) / x * s;
    }
    double s = 0.0;
    for (int k = 1; k <= 100; ++k) {
        const double term = std::exp(-2.0 * k * k * x * x);
        s += (k % 2 == 1 ? term : -term);
        if (term < 1e-18) break;
    }
    return 1.0 - 2.0 * s;
}

double kolmogorov_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) throw std::domain_error("quantile level must lie in (0, 1)");
    double lo = 0.0;
    double hi = 10.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        (kolmogorov_cdf(mid) < p ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

double ks_critical_value(std::size_t n, double alpha) {
    const double rn = std::sqrt(static_cast<double>(n));
    return kolmogorov_quantile(1.0 - alpha) / (rn + 0.12 + 0.11 / rn);
}

double total_variation(std::span<const double> p, std::span<const double> q) {
    const std::size_t len = std::max(p.size(), q.size());
    double s = 0.0;
    for (std::size_t i = 0; i < len; ++i) {
        const double a = i < p.size() ? p[i] : 0.0;
        const double b = i < q.size() ? q[i] : 0.0;
        s += std::abs(a - b);
    }
    return 0.5 * s;
}

ChiSquareResult chi_square_homogeneity(std::span<const double> counts_a,
                                       std::span<const double> counts_b) {
    if (counts_a.size() != counts_b.size()) throw std::invalid_argument("bin counts differ in length");
    double na = 0.0, nb = 0.0;
    for (double c : counts_a) na += c;
    for (double c : counts_b) nb += c;
    const double total = na + nb;
    ChiSquareResult out;
    if (na == 0.0 || nb == 0.0) return out;

    std::vector<std::pair<double, double>> bins;
    double pa = 0.0, pb = 0.0;
    for (std::size_t i = 0; i < counts_a.size(); ++i) {
        pa += counts_a[i];
        pb += counts_b[i];
        const double pooled = pa + pb;
        if (std::min(pooled * na / total, pooled * nb / total) >= 5.0) {
            bins.emplace_back(pa, pb);
            pa = pb = 0.0;
        }
    }
    if (pa + pb > 0.0) {
        if (bins.empty()) return out;
        bins.back().first += pa;
        bins.back().second += pb;
    }
    if (bins.size() < 2) return out;
    for (const auto& [a, b] : bins) {
        const double ea = (a + b) * na / total;
        const double eb = (a + b) * nb / total;
        out.statistic += (a - ea) * (a - ea) / ea + (b - eb) * (b - eb) / eb;
    }
    out.dof = static_cast<double>(bins.size() - 1);
    out.p_value = boost::math::cdf(boost::math::complement(boost::math::chi_squared(out.dof), out.statistic));
    return out;
}

MeanSe mean_and_se(std::span<const double> xs) {
    MeanSe out;
    if (xs.empty()) return out;
    const double n = static_cast<double>(xs.size());
    double s = 0.0;
    for (double x : xs) s += x;
    out.mean = s / n;
    if (xs.size() < 2) return out;
    double ss = 0.0;
    for (double x : xs) ss += (x - out.mean) * (x - out.mean);
    out.se = std::sqrt(ss / (n - 1.0) / n);
    return out;
}

}  // namespace gwtheta
