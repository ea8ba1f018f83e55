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


#include "martingale.hpp"

#include <cmath>

#include "error.hpp"
#include "parallel.hpp"

namespace gwperc {

double m_statistic(const MomentTable& moments, const CriticalParams& params, int n, int k) {
  require(k >= 1 && n >= 0, ErrorKind::invalid_argument, "need k >= 1 and n >= 0");
  require(k <= moments.k && n <= moments.n, ErrorKind::precondition,
          "moment table does not cover (n, k) = (" + std::to_string(n) + ", " + std::to_string(k) + ")");
  require(k <= params.k_max, ErrorKind::precondition,
          "c_{k,j} tabulated only up to k = " + std::to_string(params.k_max));
  double m = moments.at(n, k);
  for (int i = 1; i < k; ++i) {
    double s = 0.0;
    for (int j = 0; j < n; ++j) s += moments.at(j, i);
    m -= params.c_kj(k, i) * s;
  }
  return m;
}

MartingaleTrace martingale_trace(const GWTree& tree, const CriticalParams& params, int n_max, int k) {
  const MomentTable moments = factorial_moments_exact(tree, n_max, k);
  MartingaleTrace t;
  t.k = k;
  t.tree_seed = tree.seed();
  t.values.resize(n_max + 1);
  // running sums avoid the quadratic rescan of m_statistic
  std::vector<double> partial(k, 0.0);
  for (int n = 0; n <= n_max; ++n) {
    double m = moments.at(n, k);
    for (int i = 1; i < k; ++i) m -= params.c_kj(k, i) * partial[i];
    t.values[n] = m;
    for (int i = 1; i < k; ++i) partial[i] += moments.at(n, i);
  }
  return t;
}

std::uint64_t study_tree_seed(std::uint64_t seed, std::uint64_t r) {
  return derive_stream(seed, StreamTag::martingale, r);
}

IncrementStudy increment_study(const OffspringSpec& spec, int k, int n_max, std::uint64_t trees,
                               std::uint64_t seed, int threads) {
  require(trees >= 100, ErrorKind::invalid_argument, "increment study needs at least 100 trees");
  require(n_max >= 1, ErrorKind::invalid_argument, "n_max must be at least 1");
  const CriticalParams params = derive_params(spec, std::max(4, k));
  std::vector<double> inc(trees * static_cast<std::uint64_t>(n_max));
  parallel_for(0, trees, resolve_threads(threads), [&](std::uint64_t r, int) {
    const GWTree tree = GWTree::generate(spec, study_tree_seed(seed, r), n_max);
    const MartingaleTrace t = martingale_trace(tree, params, n_max, k);
    for (int n = 0; n < n_max; ++n) inc[r * n_max + n] = t.values[n + 1] - t.values[n];
  });

  IncrementStudy s;
  s.k = k;
  s.n_max = n_max;
  s.trees = trees;
  s.seed = seed;
  s.mean.resize(n_max);
  s.std_error.resize(n_max);
  s.l2.resize(n_max);
  const double count = static_cast<double>(trees);
  for (int n = 0; n < n_max; ++n) {
    double sum = 0.0, sq = 0.0;
    for (std::uint64_t r = 0; r < trees; ++r) {
      const double v = inc[r * n_max + n];
      sum += v;
      sq += v * v;
    }
    const double mean = sum / count;
    const double var = std::max(0.0, (sq - count * mean * mean) / (count - 1.0));
    s.mean[n] = mean;
    s.std_error[n] = std::sqrt(var / count);
    s.l2[n] = std::sqrt(sq / count);
  }

  std::vector<double> x, y;
  for (int n = 3; n < n_max; ++n) {
    if (!(s.l2[n] > 1e-12)) {  // rounding-level increments: nothing to fit
      x.clear();
      break;
    }
    x.push_back(n);
    y.push_back(s.l2[n]);
  }
  if (x.size() >= 2) s.fit = decay_fit(x, y);
  return s;
}

}  // namespace gwperc
