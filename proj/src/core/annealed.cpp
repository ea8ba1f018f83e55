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


#include "annealed.hpp"

#include <algorithm>
#include <cmath>

#include "error.hpp"
#include "parallel.hpp"
#include "tree.hpp"

namespace gwperc {
namespace {

constexpr std::uint64_t kBlock = 1ULL << 14;

std::uint32_t draw(const std::vector<double>& cdf, double u) {
  const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
  return static_cast<std::uint32_t>(std::min<std::ptrdiff_t>(it - cdf.begin(), cdf.size() - 1));
}

}  // namespace

std::vector<double> annealed_survival_exact(const OffspringSpec& spec, int n_max) {
  require(n_max >= 1, ErrorKind::invalid_argument, "n_max must be at least 1");
  const AnnealedLaw law = annealed_offspring(spec);
  std::vector<double> q(n_max + 1, 1.0);
  for (int n = 1; n <= n_max; ++n) {
    // 1 - f(1 - q) = sum_k P[Z~=k] (1 - (1 - q)^k)
    const double l = std::log1p(-q[n - 1]);
    double s = 0.0;
    for (std::size_t k = law.pmf.size() - 1; k >= 1; --k) s += law.pmf[k] * -std::expm1(k * l);
    q[n] = s;
  }
  return q;
}

double AnnealedYaglom::acceptance_rate() const noexcept {
  return attempts ? static_cast<double>(scaled.size()) / static_cast<double>(attempts) : 0.0;
}

AnnealedYaglom annealed_yaglom(const OffspringSpec& spec, int n, std::uint64_t accepted,
                               std::uint64_t seed, int threads, std::uint64_t max_attempts) {
  require(n >= 1, ErrorKind::invalid_argument, "depth must be at least 1");
  require(accepted >= 1000, ErrorKind::invalid_argument,
          "annealed Yaglom sample needs at least 1000 accepted runs");
  const AnnealedLaw law = annealed_offspring(spec);
  std::vector<double> cdf(law.pmf.size());
  double acc = 0.0;
  for (std::size_t k = 0; k < cdf.size(); ++k) cdf[k] = acc += law.pmf[k];
  const int workers = resolve_threads(threads);
  std::vector<std::uint64_t> block(kBlock);

  AnnealedYaglom out;
  out.n = n;
  std::uint64_t start = 0;
  while (out.scaled.size() < accepted) {
    require(start < max_attempts, ErrorKind::budget,
            "attempt cap of " + std::to_string(max_attempts) + " reached");
    const std::uint64_t len = std::min(kBlock, max_attempts - start);
    parallel_for(0, len, workers, [&](std::uint64_t i, int) {
      SplitMix64 rng = make_stream(seed, StreamTag::annealed, start + i);
      std::uint64_t z = 1;
      for (int l = 0; l < n && z > 0; ++l) {
        std::uint64_t next = 0;
        for (std::uint64_t v = 0; v < z; ++v) next += draw(cdf, rng.uniform());
        require(next <= kPopulationCap, ErrorKind::budget, "population cap exceeded");
        z = next;
      }
      block[i] = z;
    });
    for (std::uint64_t i = 0; i < len && out.scaled.size() < accepted; ++i) {
      if (block[i] == 0) continue;
      out.scaled.push_back(static_cast<double>(block[i]) / n);
      out.attempts = start + i + 1;
    }
    if (out.scaled.size() < accepted) out.attempts = start + len;
    start += len;
  }
  return out;
}

IICExperiment annealed_iic_sizes(const OffspringSpec& spec, int n, std::uint64_t replicates,
                                 std::uint64_t seed, int lookahead, int threads) {
  require(n >= 1, ErrorKind::invalid_argument, "depth must be at least 1");
  require(replicates >= 1, ErrorKind::invalid_argument, "need at least one replicate");
  IICOptions opts;
  opts.lookahead = lookahead;
  std::vector<std::uint64_t> c(replicates);
  parallel_for(0, replicates, resolve_threads(threads), [&](std::uint64_t r, int) {
    const std::uint64_t tree_seed = derive_stream(seed, StreamTag::annealed_iic, r);
    const GWTree tree = GWTree::generate(spec, tree_seed, 0);
    SplitMix64 rng = make_stream(tree_seed, StreamTag::iic, 0);
    WeightCache cache;
    c[r] = IICSampler(tree, n, opts).sample(rng, &cache).c_n;
  });
  IICExperiment e;
  e.n = n;
  e.lookahead = lookahead;
  e.seed = seed;
  e.scaled.resize(replicates);
  e.min_c_n = *std::min_element(c.begin(), c.end());
  for (std::uint64_t r = 0; r < replicates; ++r) e.scaled[r] = static_cast<double>(c[r]) / n;
  return e;
}

}  // namespace gwperc
