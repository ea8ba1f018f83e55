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
#include <span>
#include <vector>

#include "rng.hpp"
#include "tree.hpp"

namespace gwperc {

/// Y_n: depth-n vertices joined to the root by open edges.
struct PercolationOutcome {
  int n = 0;
  std::vector<VertexKey> y_n;
  std::size_t size() const noexcept { return y_n.size(); }
};

/// q[j] = P_T[|Y_j| > 0] for j = 0..n.
struct SurvivalCurve {
  std::vector<double> q;
};

/// values[j * (k + 1) + i] = E_T[binom(|Y_j|, i)] for j <= n, i <= k.
struct MomentTable {
  int n = 0;
  int k = 0;
  std::vector<double> values;
  bool precision_warning = false;  // set above k = 6

  double at(int j, int i) const;
  /// E_T[|Y_j|^2] = E|Y_j| + 2 E binom(|Y_j|, 2)
  double second_moment(int j) const { return at(j, 1) + 2.0 * at(j, 2); }
};

struct SandwichBounds {
  double lower = 0.0;  // Paley-Zygmund: n (E|Y_n|)^2 / E|Y_n|^2
  double value = 0.0;  // n P_T[|Y_n| > 0]
  double upper = 0.0;  // 2 w_bar / (1 - pc)
  bool holds() const noexcept;
};

/// Exact survival probabilities by one bottom-up sweep that carries, for
/// each vertex v at depth d, the curve t -> P[v reaches depth d + t].
/// Needs n <= tree.depth(); regular trees are collapsed to one vertex per level.
SurvivalCurve survival_exact(const GWTree& tree, int n);

/// Exact factorial moments E_T[binom(|Y_j|, i)] for all j <= n, i <= k_max.
///
/// For each vertex the generating polynomial of binom(|Y|, .) restricted to
/// its subtree is the truncated product over children of
/// 1 + pc * sum_{i >= 1} f_child(i) x^i; summing over subsets of depth-n
/// vertices this counts pc^(edges of the Steiner tree of S and the root).
MomentTable factorial_moments_exact(const GWTree& tree, int n, int k_max);

/// Paley-Zygmund lower bound and resistance upper bound around n q_n.
/// Throws ErrorKind::internal when the inequality fails beyond rounding.
SandwichBounds sandwich_check(const GWTree& tree, int n, const SurvivalCurve& curve,
                              const MomentTable& moments);

/// Sandwich built from sample moments; Cauchy-Schwarz makes the lower side
/// exact for the empirical law as well.
SandwichBounds sandwich_from_estimates(int n, double mean_size, double mean_size_sq,
                                       double survival, double w_bar, double pc);

/// An edge kept open regardless of the coin (the IIC spine).
struct ForcedEdge {
  VertexKey parent = 0;
  std::uint32_t child = 0;
};

/// Keeps each child of each frontier vertex independently with probability p.
/// A forced edge, if given, is kept without drawing a coin.
void advance_open_level(const GWTree& tree, double p, std::span<const VertexKey> frontier,
                        std::vector<VertexKey>& next, SplitMix64& rng,
                        const ForcedEdge* forced = nullptr);

/// One critical percolation run to depth n, walking the tree lazily.
PercolationOutcome percolate_once(const GWTree& tree, int n, SplitMix64& rng);

/// Monte Carlo survival with first and second size moments per depth.
struct SurvivalEstimate {
  std::uint64_t replicates = 0;
  std::vector<std::uint64_t> survived;  // per depth
  std::vector<std::uint64_t> size_sum;
  std::vector<std::uint64_t> size_sq_sum;

  double q(int j) const;
  double std_error(int j) const;
  double mean_size(int j) const;
  double mean_size_sq(int j) const;
};

SurvivalEstimate survival_mc(const GWTree& tree, int n, std::uint64_t replicates,
                             std::uint64_t seed, int threads = 0);

constexpr std::uint64_t kDefaultAttemptCap = 1'000'000'000ULL;

struct ConditionedSample {
  int n = 0;
  std::vector<std::uint64_t> sizes;  // |Y_n| of accepted runs, in replicate order
  std::uint64_t attempts = 0;
  double acceptance_rate() const noexcept;
};

/// Rejection sampling of |Y_n| given |Y_n| > 0. Replicate i always uses the
/// stream (seed, perc, i), so the sample is independent of `threads`.
ConditionedSample conditioned_sizes(const GWTree& tree, int n, std::uint64_t accepted,
                                    std::uint64_t seed, int threads = 0,
                                    std::uint64_t max_attempts = kDefaultAttemptCap);

struct SpreadDiagnostics {
  int n = 0;
  int m = 0;                       // ceil(log n / (4 log mu)), at least 1
  std::uint64_t accepted = 0;
  std::uint64_t attempts = 0;
  double p_multi = 0.0;            // P[root reaches T_n via >= 2 depth-m vertices | survival]
  double p_max = 0.0;              // max_v P[v in Y_n | survival] = pc^n / q_n
  double p_max_empirical = 0.0;    // largest empirical hit frequency of a single vertex
  double frequency_sum = 0.0;      // sum_v of empirical hit frequencies
  double mean_size = 0.0;          // mean |Y_n| over accepted runs
  bool low_confidence = false;     // fewer than 100 accepted runs
};

int spread_depth(int n, double mu);

SpreadDiagnostics spread_diagnostics(const GWTree& tree, int n, std::uint64_t accepted,
                                     std::uint64_t seed, int threads = 0,
                                     std::uint64_t max_attempts = kDefaultAttemptCap);

}  // namespace gwperc
