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


#include "oracle.hpp"

#include <bit>
#include <cmath>
#include <map>

#include "error.hpp"

namespace gwperc::oracle {
namespace {

struct Flat {
  std::vector<std::uint64_t> parent;  // by arena id; parent[0] unused
  std::vector<int> depth;
};

Flat flatten(const GWTree& tree, int n) {
  require(n >= 0 && n <= tree.arena_depth(), ErrorKind::precondition,
          "brute force needs the tree materialized to depth n");
  Flat f;
  f.parent.push_back(0);
  f.depth.push_back(0);
  std::uint64_t level_start = 0;
  for (int d = 0; d < n; ++d) {
    const auto counts = tree.child_counts(d);
    const std::uint64_t next_start = f.parent.size();
    for (std::uint64_t i = 0; i < counts.size(); ++i)
      for (std::uint32_t j = 0; j < counts[i]; ++j) {
        f.parent.push_back(level_start + i);
        f.depth.push_back(d + 1);
      }
    level_start = next_start;
  }
  require(f.parent.size() - 1 <= kMaxEdges, ErrorKind::budget,
          "brute force limited to " + std::to_string(kMaxEdges) + " edges");
  return f;
}

double binom(std::uint64_t a, int k) {
  if (a < static_cast<std::uint64_t>(k)) return 0.0;
  double r = 1.0;
  for (int i = 0; i < k; ++i) r *= static_cast<double>(a - i) / (i + 1);
  return r;
}

template <class Fn>
void enumerate(const GWTree& tree, const Flat& f, Fn&& fn) {
  const std::size_t e = f.parent.size() - 1;
  const double p = 1.0 / tree.mu();
  std::vector<char> on(f.parent.size());
  for (std::uint64_t mask = 0; mask < (1ULL << e); ++mask) {
    const int open = std::popcount(mask);
    const double prob = std::pow(p, open) * std::pow(1.0 - p, static_cast<double>(e - open));
    on[0] = 1;
    std::uint64_t cluster = 1;
    for (std::size_t v = 1; v < f.parent.size(); ++v) {
      on[v] = on[f.parent[v]] && ((mask >> (v - 1)) & 1);
      if (on[v]) cluster |= 1ULL << v;
    }
    fn(prob, cluster);
  }
}

}  // namespace

std::uint64_t edge_count(const GWTree& tree, int n) {
  std::uint64_t e = 0;
  for (int d = 1; d <= n; ++d) e += tree.level_size(d);
  return e;
}

MomentTable brute_force_moments(const GWTree& tree, int n, int k_max) {
  const Flat f = flatten(tree, n);
  MomentTable t;
  t.n = n;
  t.k = k_max;
  t.values.assign(static_cast<std::size_t>(n + 1) * (k_max + 1), 0.0);
  std::vector<std::uint64_t> size(n + 1);
  enumerate(tree, f, [&](double prob, std::uint64_t cluster) {
    std::fill(size.begin(), size.end(), 0);
    for (std::size_t v = 0; v < f.depth.size(); ++v)
      if ((cluster >> v) & 1) ++size[f.depth[v]];
    for (int j = 0; j <= n; ++j)
      for (int i = 0; i <= k_max; ++i) t.values[j * (k_max + 1) + i] += prob * binom(size[j], i);
  });
  return t;
}

std::vector<double> brute_force_survival(const GWTree& tree, int n) {
  const Flat f = flatten(tree, n);
  std::vector<double> q(n + 1, 0.0);
  std::vector<char> hit(n + 1);
  enumerate(tree, f, [&](double prob, std::uint64_t cluster) {
    std::fill(hit.begin(), hit.end(), 0);
    for (std::size_t v = 0; v < f.depth.size(); ++v)
      if ((cluster >> v) & 1) hit[f.depth[v]] = 1;
    for (int j = 0; j <= n; ++j)
      if (hit[j]) q[j] += prob;
  });
  return q;
}

std::vector<std::pair<std::uint64_t, double>> cluster_law(const GWTree& tree, int n) {
  const Flat f = flatten(tree, n);
  std::map<std::uint64_t, double> law;
  enumerate(tree, f, [&](double prob, std::uint64_t cluster) { law[cluster] += prob; });
  return {law.begin(), law.end()};
}

std::vector<std::uint64_t> mask_to_ids(std::uint64_t mask) {
  std::vector<std::uint64_t> ids;
  for (std::uint64_t v = 0; mask; ++v, mask >>= 1)
    if (mask & 1) ids.push_back(v);
  return ids;
}

}  // namespace gwperc::oracle
