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


#include "stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "error.hpp"

namespace gwperc {

EmpiricalSummary summarize(std::span<const double> sample) {
  require(!sample.empty(), ErrorKind::invalid_argument, "empty sample");
  EmpiricalSummary s;
  s.count = sample.size();
  s.sorted.assign(sample.begin(), sample.end());
  std::sort(s.sorted.begin(), s.sorted.end());
  // summing in sorted order keeps the result independent of sample order
  s.mean = std::accumulate(s.sorted.begin(), s.sorted.end(), 0.0) / static_cast<double>(s.count);
  if (s.count > 1) {
    double ss = 0.0;
    for (double v : s.sorted) ss += (v - s.mean) * (v - s.mean);
    s.variance = ss / static_cast<double>(s.count - 1);
  }
  s.std_error = std::sqrt(s.variance / static_cast<double>(s.count));
  return s;
}

double ks_distance_sorted(std::span<const double> sorted, const Cdf& cdf) {
  require(!sorted.empty(), ErrorKind::invalid_argument, "KS distance of an empty sample");
  const double n = static_cast<double>(sorted.size());
  double d = 0.0;
  std::size_t i = 0;
  while (i < sorted.size()) {
    // ties: the empirical cdf jumps once over the whole run
    std::size_t j = i;
    while (j + 1 < sorted.size() && sorted[j + 1] == sorted[i]) ++j;
    const double f = cdf(sorted[i]);
    d = std::max({d, std::abs(f - static_cast<double>(i) / n), std::abs(static_cast<double>(j + 1) / n - f)});
    i = j + 1;
  }
  return std::clamp(d, 0.0, 1.0);
}

double ks_distance(std::span<const double> sample, const Cdf& cdf) {
  std::vector<double> s(sample.begin(), sample.end());
  std::sort(s.begin(), s.end());
  return ks_distance_sorted(s, cdf);
}

Cdf exp_cdf(double lambda) {
  require(lambda > 0.0, ErrorKind::invalid_argument, "rate must be positive");
  return [lambda](double x) { return x <= 0.0 ? 0.0 : -std::expm1(-lambda * x); };
}

Cdf gamma2_cdf(double lambda) {
  require(lambda > 0.0, ErrorKind::invalid_argument, "rate must be positive");
  return [lambda](double x) {
    if (x <= 0.0) return 0.0;
    const double t = lambda * x;
    return -std::expm1(-t) - t * std::exp(-t);
  };
}

DecayFit decay_fit(std::span<const double> x, std::span<const double> y) {
  require(x.size() == y.size(), ErrorKind::invalid_argument, "x and y differ in length");
  require(x.size() >= 2, ErrorKind::invalid_argument, "need at least two points to fit");
  const std::size_t n = x.size();
  std::vector<double> ly(n);
  for (std::size_t i = 0; i < n; ++i) {
    require(y[i] > 0.0 && std::isfinite(y[i]), ErrorKind::invalid_argument,
            "decay fit needs positive finite values");
    ly[i] = std::log(y[i]);
  }
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(n);
  const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (ly[i] - my);
  }
  require(sxx > 0.0, ErrorKind::invalid_argument, "decay fit needs distinct x values");
  DecayFit f;
  f.points = n;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double rss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = ly[i] - (f.intercept + f.slope * x[i]);
    rss += r * r;
  }
  f.residual = std::sqrt(rss / static_cast<double>(n));
  return f;
}

}  // namespace gwperc
