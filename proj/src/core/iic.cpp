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


#include "iic.hpp"

#include <algorithm>
#include <cmath>

#include "error.hpp"
#include "parallel.hpp"

namespace gwperc {
namespace {

constexpr int kCacheDepth = 24;

double mu_power(double mu, int k) {
  double r = 1.0;
  for (int i = 0; i < k; ++i) r *= mu;
  return r;
}

}  // namespace

IICSampler::IICSampler(const GWTree& tree, int n, IICOptions options)
    : tree_(tree), n_(n), opts_(options) {
  require(n >= 0, ErrorKind::invalid_argument, "depth must be non-negative");
  require(options.lookahead >= 0, ErrorKind::invalid_argument, "lookahead must be non-negative");
}

double IICSampler::weight(VertexKey v, int depth, WeightCache* cache) const {
  if (tree_.regular()) return 1.0;
  const bool cached = cache && depth <= kCacheDepth;
  if (cached) {
    auto it = cache->find(v);
    if (it != cache->end()) return it->second;
  }
  const int m = opts_.horizon ? opts_.lookahead + std::max(0, n_ - depth) : opts_.lookahead;
  const double w = tree_.descendant_count_lazy(v, m) / mu_power(tree_.mu(), m);
  if (cached) cache->emplace(v, w);
  return w;
}

std::vector<double> IICSampler::transitions(VertexKey u, int depth, WeightCache* cache) const {
  const std::uint32_t c = tree_.child_count(u);
  std::vector<double> t(c);
  double total = 0.0;
  for (std::uint32_t j = 0; j < c; ++j) {
    t[j] = weight(child_key(u, j), depth + 1, cache);
    total += t[j];
  }
  require(total > 0.0, ErrorKind::internal, "zero total child weight on the spine");
  for (double& x : t) x /= total;
  return t;
}

IICSample IICSampler::sample(SplitMix64& rng, WeightCache* cache) const {
  IICSample s;
  s.n = n_;
  s.spine.reserve(n_ + 1);
  s.spine_choice.reserve(n_);
  s.spine.push_back(root_key(tree_.seed()));
  std::vector<double> w;
  for (int d = 0; d < n_; ++d) {
    const VertexKey u = s.spine.back();
    const std::uint32_t c = tree_.child_count(u);
    w.resize(c);
    double total = 0.0;
    for (std::uint32_t j = 0; j < c; ++j) {
      w[j] = weight(child_key(u, j), d + 1, cache);
      total += w[j];
    }
    require(total > 0.0, ErrorKind::internal, "zero total child weight on the spine");
    const double x = rng.uniform() * total;
    std::uint32_t j = 0;
    double acc = w[0];
    while (j + 1 < c && x >= acc) acc += w[++j];
    s.spine_choice.push_back(j);
    s.spine.push_back(child_key(u, j));
  }

  const double p = 1.0 / tree_.mu();
  std::vector<VertexKey> cur{s.spine[0]}, next;
  if (opts_.record_cluster) s.cluster.push_back(cur);
  for (int d = 0; d < n_; ++d) {
    const ForcedEdge forced{s.spine[d], s.spine_choice[d]};
    advance_open_level(tree_, p, cur, next, rng, &forced);
    cur.swap(next);
    if (opts_.record_cluster) s.cluster.push_back(cur);
  }
  s.c_n = cur.size();
  return s;
}

IICExact::IICExact(const GWTree& tree, int n, int lookahead) : tree_(tree), n_(n) {
  require(n >= 0 && lookahead >= 0, ErrorKind::invalid_argument,
          "depth and lookahead must be non-negative");
  require(n <= tree.arena_depth(), ErrorKind::precondition,
          "exact IIC marginals need the tree materialized to depth " + std::to_string(n));
  const std::uint64_t size = tree.level_size(n);
  w_hat_.resize(size);
  const double scale = mu_power(tree.mu(), lookahead);
  double total = 0.0;
  for (std::uint64_t r = 0; r < size; ++r) {
    w_hat_[r] = tree.descendant_count(n, r, lookahead) / scale;
    total += w_hat_[r];
  }
  root_weight_ = total / mu_power(tree.mu(), n);

  parent_.assign(tree.level_offset(n) + size, 0);
  for (int d = 0; d < n; ++d) {
    const auto first = tree.first_child(d);
    for (std::uint64_t i = 0; i < tree.level_size(d); ++i)
      for (std::uint32_t c = first[i]; c < first[i + 1]; ++c)
        parent_[tree.level_offset(d + 1) + c] = tree.level_offset(d) + i;
  }
}

bool IICExact::valid_subtree(std::span<const std::uint64_t> shape,
                             std::vector<std::uint64_t>& sorted) const {
  sorted.assign(shape.begin(), shape.end());
  std::sort(sorted.begin(), sorted.end());
  require(std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end(),
          ErrorKind::invalid_argument, "shape lists a vertex twice");
  for (std::uint64_t id : sorted)
    require(id < parent_.size(), ErrorKind::invalid_argument,
            "vertex id " + std::to_string(id) + " is not in the tree to depth " + std::to_string(n_));
  if (sorted.empty() || sorted.front() != 0) return false;
  for (std::size_t i = 1; i < sorted.size(); ++i)
    if (!std::binary_search(sorted.begin(), sorted.end(), parent_[sorted[i]])) return false;
  return true;
}

double IICExact::cluster_probability(std::span<const std::uint64_t> shape) const {
  std::vector<std::uint64_t> t;
  if (!valid_subtree(shape, t)) return 0.0;
  const double p = 1.0 / tree_.mu();
  std::uint64_t edges = t.size() - 1, out = 0;
  for (std::uint64_t id : t) {
    int d = 0;
    while (d < n_ && id >= tree_.level_offset(d + 1)) ++d;
    if (d < n_) out += tree_.child_counts(d)[id - tree_.level_offset(d)];
  }
  const std::uint64_t boundary = out - edges;
  return std::pow(p, static_cast<double>(edges)) * std::pow(1.0 - p, static_cast<double>(boundary));
}

double IICExact::marginal(std::span<const std::uint64_t> shape) const {
  std::vector<std::uint64_t> t;
  if (!valid_subtree(shape, t)) return 0.0;
  const std::uint64_t base = tree_.level_offset(n_);
  double reach = 0.0;
  for (auto it = std::lower_bound(t.begin(), t.end(), base); it != t.end(); ++it)
    reach += w_hat_[*it - base];
  if (reach == 0.0) return 0.0;
  return reach / root_weight_ * cluster_probability(t);
}

double iic_marginal_exact(const GWTree& tree, std::span<const std::uint64_t> shape, int n,
                          int lookahead) {
  return IICExact(tree, n, lookahead).marginal(shape);
}

IICExperiment iic_size_experiment(const GWTree& tree, int n, std::uint64_t replicates,
                                  std::uint64_t seed, IICOptions options, int threads) {
  require(n >= 1, ErrorKind::invalid_argument, "IIC size experiment needs n >= 1");
  require(replicates >= 1000, ErrorKind::invalid_argument,
          "IIC size experiment needs at least 1000 replicates");
  options.record_cluster = false;
  const IICSampler sampler(tree, n, options);
  const int workers = resolve_threads(threads);
  std::vector<WeightCache> caches(workers);
  std::vector<std::uint64_t> c(replicates);
  parallel_for(0, replicates, workers, [&](std::uint64_t r, int w) {
    SplitMix64 rng = make_stream(seed, StreamTag::iic, r);
    c[r] = sampler.sample(rng, &caches[w]).c_n;
  });
  IICExperiment e;
  e.n = n;
  e.lookahead = options.lookahead;
  e.seed = seed;
  e.scaled.resize(replicates);
  e.min_c_n = *std::min_element(c.begin(), c.end());
  for (std::uint64_t r = 0; r < replicates; ++r)
    e.scaled[r] = static_cast<double>(c[r]) / static_cast<double>(n);
  return e;
}

std::vector<double> branch_transitions(const GWTree& tree, int lookahead) {
  IICOptions o;
  o.lookahead = lookahead;
  VertexKey v = root_key(tree.seed());
  int d = 0;
  for (; d < 1000 && tree.child_count(v) < 2; ++d) v = child_key(v, 0);
  return IICSampler(tree, d + 1, o).transitions(v, d);
}

}  // namespace gwperc
