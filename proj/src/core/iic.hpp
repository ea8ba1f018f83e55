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
#include <unordered_map>
#include <vector>

#include "percolation.hpp"
#include "rng.hpp"
#include "stats.hpp"
#include "tree.hpp"

namespace gwperc {

constexpr int kDefaultLookahead = 20;

struct IICOptions {
  int lookahead = kDefaultLookahead;
  /// false: W-hat(v) = W_m(v) for every vertex (local lookahead).
  /// true:  W-hat(v) = W_{m + n - depth(v)}(v), so that W-hat obeys
  ///        W-hat(v) = pc * sum_children W-hat(w) exactly above depth n.
  bool horizon = false;
  bool record_cluster = false;
};

struct IICSample {
  int n = 0;
  std::vector<VertexKey> spine;               // depth 0..n
  std::vector<std::uint32_t> spine_choice;    // child index taken at depth 0..n-1
  std::vector<std::vector<VertexKey>> cluster;  // per depth, when recorded
  std::uint64_t c_n = 0;
};

/// Memo of W-hat values; one per worker.
using WeightCache = std::unordered_map<VertexKey, double>;

/// Quenched IIC on a fixed tree by the size-biased spine: from u the spine
/// moves to child w with probability W-hat(w) / sum_siblings W-hat, spine
/// edges are open, every other edge to depth n is open with probability pc.
class IICSampler {
 public:
  IICSampler(const GWTree& tree, int n, IICOptions options = {});

  int depth() const noexcept { return n_; }
  const IICOptions& options() const noexcept { return opts_; }

  double weight(VertexKey v, int depth, WeightCache* cache = nullptr) const;
  /// Spine transition probabilities out of u; they sum to one.
  std::vector<double> transitions(VertexKey u, int depth, WeightCache* cache = nullptr) const;

  IICSample sample(SplitMix64& rng, WeightCache* cache = nullptr) const;

 private:
  const GWTree& tree_;
  int n_;
  IICOptions opts_;
};

/// Exact IIC marginal on depth-n cluster shapes:
///   (sum_{v in t_n} W-hat(v) / W-hat(root)) pc^|E(t)| (1 - pc)^|boundary(t)|
/// with horizon weights, so the values sum to one over all shapes.
class IICExact {
 public:
  IICExact(const GWTree& tree, int n, int lookahead = kDefaultLookahead);

  /// `shape` lists global arena ids. Ids outside levels 0..n are an error;
  /// a set that is not a root-containing subtree, or misses depth n, has weight 0.
  double marginal(std::span<const std::uint64_t> shape) const;
  /// pc^|E(t)| (1 - pc)^|boundary(t)|, the percolation probability of the shape.
  double cluster_probability(std::span<const std::uint64_t> shape) const;

  double root_weight() const noexcept { return root_weight_; }

 private:
  bool valid_subtree(std::span<const std::uint64_t> shape, std::vector<std::uint64_t>& sorted) const;

  const GWTree& tree_;
  int n_;
  std::vector<double> w_hat_;  // by rank on level n
  double root_weight_ = 0.0;
  std::vector<std::uint64_t> parent_;  // global id -> parent global id, levels 1..n
};

double iic_marginal_exact(const GWTree& tree, std::span<const std::uint64_t> shape, int n,
                          int lookahead = kDefaultLookahead);

struct IICExperiment {
  int n = 0;
  int lookahead = 0;
  std::uint64_t seed = 0;
  std::vector<double> scaled;  // c_n / n in replicate order
  std::uint64_t min_c_n = 0;
};

/// Independent IIC samples on one fixed tree; replicate r uses stream (seed, iic, r).
IICExperiment iic_size_experiment(const GWTree& tree, int n, std::uint64_t replicates,
                                  std::uint64_t seed, IICOptions options = {}, int threads = 0);

/// Spine transition probabilities under local lookahead m at the first
/// vertex with two or more children on the leftmost path from the root.
/// Used for lookahead sensitivity reports.
std::vector<double> branch_transitions(const GWTree& tree, int lookahead);

}  // namespace gwperc
