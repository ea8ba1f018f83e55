// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace gwperc {

struct EmpiricalSummary {
  std::size_t count = 0;
  double mean = 0.0;
  double variance = 0.0;  // unbiased; 0 for a single point
  double std_error = 0.0;
  std::vector<double> sorted;
};

EmpiricalSummary summarize(std::span<const double> sample);

using Cdf = std::function<double(double)>;

/// sup_x |F_n(x) - F(x)| evaluated on both sides of every sample point.
double ks_distance(std::span<const double> sample, const Cdf& cdf);
/// Same, for an already sorted sample.
double ks_distance_sorted(std::span<const double> sorted, const Cdf& cdf);

/// F(x) = 1 - exp(-lambda x).
Cdf exp_cdf(double lambda);
/// G(x) = 1 - exp(-lambda x)(1 + lambda x), the Gamma(2, rate lambda) law.
Cdf gamma2_cdf(double lambda);

struct DecayFit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;  // root mean square of the log residuals
  std::size_t points = 0;
};

/// Least squares of log y on x. All y must be positive.
DecayFit decay_fit(std::span<const double> x, std::span<const double> y);

}  // namespace gwperc
