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
#include <functional>
#include <span>
#include <vector>

namespace gwtheta {

/// sup_x |F_n(x) - F(x)| for a possibly discontinuous F. Samples may
/// contain -inf (an atom below every finite value); F(-inf) is then read
/// as the mass of that atom.
double ks_statistic(std::span<const double> samples, const std::function<double(double)>& cdf);

/// Kolmogorov distribution P(K <= x) = 1 - 2 sum_{k>=1} (-1)^(k-1) exp(-2 k^2 x^2).
double kolmogorov_cdf(double x);
double kolmogorov_quantile(double p);

/// Critical KS distance at level alpha for n samples (Stephens' finite-n
/// adjustment of the asymptotic quantile).
double ks_critical_value(std::size_t n, double alpha);

double total_variation(std::span<const double> p, std::span<const double> q);

struct ChiSquareResult {
    double statistic = 0.0;
    double dof = 0.0;
    double p_value = 1.0;
};

/// Two-sample homogeneity test on count vectors of equal length; bins with
/// expected count below 5 are pooled into their right neighbour.
ChiSquareResult chi_square_homogeneity(std::span<const double> counts_a,
                                       std::span<const double> counts_b);

struct MeanSe {
    double mean = 0.0;
    double se = 0.0;
};

MeanSe mean_and_se(std::span<const double> xs);

}  // namespace gwtheta
