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

#include <cstdint>
#include <optional>
#include <vector>

#include "offspring.hpp"
#include "percolation.hpp"
#include "stats.hpp"
#include "tree.hpp"

namespace gwperc {

/// M_n^(k) = E_T[binom(|Y_n|, k)] - sum_{i<k} c_{k,i} sum_{j<n} E_T[binom(|Y_j|, i)].
double m_statistic(const MomentTable& moments, const CriticalParams& params, int n, int k);

struct MartingaleTrace {
  int k = 0;
  std::uint64_t tree_seed = 0;
  std::vector<double> values;  // n = 0..n_max
};

MartingaleTrace martingale_trace(const GWTree& tree, const CriticalParams& params, int n_max, int k);

/// Integrated martingale check over independent trees: per n, the mean and
/// standard error of M_{n+1} - M_n and its L2 norm sqrt(E[(M_{n+1} - M_n)^2]).
struct IncrementStudy {
  int k = 0;
  int n_max = 0;
  std::uint64_t trees = 0;
  std::uint64_t seed = 0;
  std::vector<double> mean;       // index n = 0..n_max-1
  std::vector<double> std_error;
  std::vector<double> l2;
  std::optional<DecayFit> fit;    // log l2 against n over n >= 3; absent when increments vanish (<= 1e-12)
};

IncrementStudy increment_study(const OffspringSpec& spec, int k, int n_max, std::uint64_t trees,
                               std::uint64_t seed, int threads = 0);

/// Seed of tree r in a study: stream (seed, martingale, r).
std::uint64_t study_tree_seed(std::uint64_t seed, std::uint64_t r);

}  // namespace gwperc
