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

#include "percolation.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "error.hpp"
#include "parallel.hpp"

namespace gwperc {
namespace {

constexpr std::uint64_t kBlock = 1ULL << 14;

void require_exact_depth(const GWTree& tree, int n) {
  require(n >= 0, ErrorKind::invalid_argument, "depth must be non-negative");
  require(n <= tree.depth(), ErrorKind::precondition,
          "exact computation to depth " + std::to_string(n) + " needs the tree generated to that depth (it has " +
              std::to_string(tree.depth()) + ")");
}

// 1 - prod(1 - p q_i) computed without cancellation.
double survive_any(double log_all_fail) { return -std::expm1(log_all_fail); }

// out = a * b truncated to degree k; all arrays have k + 1 entries.
void poly_mul_trunc(const double* a, const double* b, double* out, int k) {
  for (int i = 0; i <= k; ++i) {
    double acc = 0.0;
    for (int j = 0; j <= i; ++j) acc += a[j] * b[i - j];
    out[i] = acc;
  }
}

bool within_rounding(double small, double large) {
  return small <= large + 1e-12 * std::max({1.0, std::abs(small), std::abs(large)});
}

}  // namespace

double MomentTable::at(int j, int i) const {
  require(j >= 0 && j <= n && i >= 0 && i <= k, ErrorKind::precondition,
          "moment (" + std::to_string(j) + ", " + std::to_string(i) + ") not in table");
  return values[static_cast<std::size_t>(j) * (k + 1) + i];
}

bool SandwichBounds::holds() const noexcept {
  return within_rounding(lower, value) && within_rounding(value, upper);
}

SurvivalCurve survival_exact(const GWTree& tree, int n) {
  require_exact_depth(tree, n);
  const double p = 1.0 / tree.mu();
  SurvivalCurve out;
  out.q.assign(n + 1, 1.0);
  if (tree.regular()) {
    const double d = static_cast<double>(tree.spec().max_support());
    for (int t = 1; t <= n; ++t) out.q[t] = survive_any(d * std::log1p(-p * out.q[t - 1]));
    return out;
  }

  // below[i * width + t]: survival curve of vertex i on level l + 1
  std::vector<double> below(tree.level_size(n), 1.0);
  for (int l = n - 1; l >= 0; --l) {
    const int width_below = n - l;  // curve length on level l + 1
    const int width = n - l + 1;
    const auto first = tree.first_child(l);
    const std::size_t size = tree.level_size(l);
    std::vector<double> cur(size * width);
    for (std::size_t i = 0; i < size; ++i) {
      double* q = &cur[i * width];
      q[0] = 1.0;
      for (int t = 1; t < width; ++t) {
        double log_fail = 0.0;
        for (std::uint32_t c = first[i]; c < first[i + 1]; ++c)
          log_fail += std::log1p(-p * below[static_cast<std::size_t>(c) * width_below + t - 1]);
        q[t] = survive_any(log_fail);
      }
    }
    below = std::move(cur);
  }
  std::copy(below.begin(), below.begin() + n + 1, out.q.begin());
  return out;
}

MomentTable factorial_moments_exact(const GWTree& tree, int n, int k_max) {
  require_exact_depth(tree, n);
  require(k_max >= 1 && k_max <= 16, ErrorKind::invalid_argument, "k_max must lie in [1, 16]");
  const double p = 1.0 / tree.mu();
  const int K = k_max + 1;
  MomentTable out;
  out.n = n;
  out.k = k_max;
  out.precision_warning = k_max > 6;
  out.values.assign(static_cast<std::size_t>(n + 1) * K, 0.0);

  std::vector<double> factor(K), acc(K), tmp(K);

  if (tree.regular()) {
    const int d = tree.spec().max_support();
    std::vector<double> f(K, 0.0);
    f[0] = f[1] = 1.0;
    std::copy(f.begin(), f.end(), out.values.begin());
    for (int t = 1; t <= n; ++t) {
      factor[0] = 1.0;
      for (int i = 1; i < K; ++i) factor[i] = p * f[i];
      std::fill(acc.begin(), acc.end(), 0.0);
      acc[0] = 1.0;
      for (int c = 0; c < d; ++c) {
        poly_mul_trunc(acc.data(), factor.data(), tmp.data(), k_max);
        acc.swap(tmp);
      }
      f = acc;
      std::copy(f.begin(), f.end(), out.values.begin() + static_cast<std::ptrdiff_t>(t) * K);
    }
    return out;
  }

  // below holds, for each vertex on level l + 1, curves t = 0..n-l-1 of K coefficients
  std::vector<double> below(tree.level_size(n) * K, 0.0);
  for (std::size_t i = 0; i < tree.level_size(n); ++i) below[i * K] = below[i * K + 1] = 1.0;
  for (int l = n - 1; l >= 0; --l) {
    const int width_below = n - l;
    const int width = n - l + 1;
    const auto first = tree.first_child(l);
    const std::size_t size = tree.level_size(l);
    std::vector<double> cur(size * width * K, 0.0);
    for (std::size_t i = 0; i < size; ++i) {
      double* f = &cur[i * width * K];
      f[0] = f[1] = 1.0;
      for (int t = 1; t < width; ++t) {
        std::fill(acc.begin(), acc.end(), 0.0);
        acc[0] = 1.0;
        for (std::uint32_t c = first[i]; c < first[i + 1]; ++c) {
          const double* g = &below[(static_cast<std::size_t>(c) * width_below + t - 1) * K];
          factor[0] = 1.0;
          for (int r = 1; r < K; ++r) factor[r] = p * g[r];
          poly_mul_trunc(acc.data(), factor.data(), tmp.data(), k_max);
          acc.swap(tmp);
        }
        std::copy(acc.begin(), acc.end(), f + static_cast<std::ptrdiff_t>(t) * K);
      }
    }
    below = std::move(cur);
  }
  std::copy(below.begin(), below.begin() + static_cast<std::ptrdiff_t>(n + 1) * K,
            out.values.begin());
  return out;
}

SandwichBounds sandwich_from_estimates(int n, double mean_size, double mean_size_sq,
                                       double survival, double w_bar, double pc) {
  SandwichBounds b;
  b.lower = mean_size_sq > 0.0 ? n * mean_size * mean_size / mean_size_sq : 0.0;
  b.value = n * survival;
  b.upper = 2.0 * w_bar / (1.0 - pc);
  return b;
}

SandwichBounds sandwich_check(const GWTree& tree, int n, const SurvivalCurve& curve,
                              const MomentTable& moments) {
  require(n >= 0 && n < static_cast<int>(curve.q.size()) && n <= moments.n && moments.k >= 2,
          ErrorKind::precondition, "sandwich needs the survival curve and moments up to k = 2 at depth n");
  const SandwichBounds b = sandwich_from_estimates(n, moments.at(n, 1), moments.second_moment(n),
                                                   curve.q[n], tree.w_bar(), 1.0 / tree.mu());
  if (!b.holds())
    fail(ErrorKind::internal, "sandwich violated at depth " + std::to_string(n) + ": " +
                                  std::to_string(b.lower) + " <= " + std::to_string(b.value) +
                                  " <= " + std::to_string(b.upper) + " fails");
  return b;
}

void advance_open_level(const GWTree& tree, double p, std::span<const VertexKey> frontier,
                        std::vector<VertexKey>& next, SplitMix64& rng, const ForcedEdge* forced) {
  next.clear();
  for (VertexKey v : frontier) {
    const std::uint32_t c = tree.child_count(v);
    const bool has_forced = forced && forced->parent == v;
    for (std::uint32_t j = 0; j < c; ++j) {
      if (has_forced && forced->child == j) {
        next.push_back(child_key(v, j));
        continue;
      }
      if (rng.bernoulli(p)) next.push_back(child_key(v, j));
    }
  }
}

PercolationOutcome percolate_once(const GWTree& tree, int n, SplitMix64& rng) {
  require(n >= 0, ErrorKind::invalid_argument, "depth must be non-negative");
  const double p = 1.0 / tree.mu();
  std::vector<VertexKey> cur{root_key(tree.seed())}, next;
  for (int l = 0; l < n && !cur.empty(); ++l) {
    advance_open_level(tree, p, cur, next, rng);
    cur.swap(next);
  }
  return PercolationOutcome{n, std::move(cur)};
}

double SurvivalEstimate::q(int j) const {
  return static_cast<double>(survived.at(j)) / static_cast<double>(replicates);
}

double SurvivalEstimate::std_error(int j) const {
  const double pj = q(j);
  return std::sqrt(pj * (1.0 - pj) / static_cast<double>(replicates));
}

double SurvivalEstimate::mean_size(int j) const {
  return static_cast<double>(size_sum.at(j)) / static_cast<double>(replicates);
}

double SurvivalEstimate::mean_size_sq(int j) const {
  return static_cast<double>(size_sq_sum.at(j)) / static_cast<double>(replicates);
}

SurvivalEstimate survival_mc(const GWTree& tree, int n, std::uint64_t replicates,
                             std::uint64_t seed, int threads) {
  require(n >= 0, ErrorKind::invalid_argument, "depth must be non-negative");
  require(replicates >= 1, ErrorKind::invalid_argument, "need at least one replicate");
  const int workers = resolve_threads(threads);
  const double p = 1.0 / tree.mu();
  struct Acc {
    std::vector<std::uint64_t> survived, sum, sq;
    std::vector<VertexKey> cur, next;
  };
  std::vector<Acc> acc(workers);
  for (auto& a : acc) {
    a.survived.assign(n + 1, 0);
    a.sum.assign(n + 1, 0);
    a.sq.assign(n + 1, 0);
  }
  parallel_for(0, replicates, workers, [&](std::uint64_t r, int w) {
    Acc& a = acc[w];
    SplitMix64 rng = make_stream(seed, StreamTag::perc, r);
    a.cur.assign(1, root_key(tree.seed()));
    for (int l = 0;; ++l) {
      const std::uint64_t s = a.cur.size();
      a.survived[l] += 1;
      a.sum[l] += s;
      a.sq[l] += s * s;
      if (l == n) break;
      advance_open_level(tree, p, a.cur, a.next, rng);
      a.cur.swap(a.next);
      if (a.cur.empty()) break;
    }
  });
  SurvivalEstimate out;
  out.replicates = replicates;
  out.survived.assign(n + 1, 0);
  out.size_sum.assign(n + 1, 0);
  out.size_sq_sum.assign(n + 1, 0);
  for (const auto& a : acc)
    for (int j = 0; j <= n; ++j) {
      out.survived[j] += a.survived[j];
      out.size_sum[j] += a.sum[j];
      out.size_sq_sum[j] += a.sq[j];
    }
  return out;
}

double ConditionedSample::acceptance_rate() const noexcept {
  return attempts ? static_cast<double>(sizes.size()) / static_cast<double>(attempts) : 0.0;
}

ConditionedSample conditioned_sizes(const GWTree& tree, int n, std::uint64_t accepted,
                                    std::uint64_t seed, int threads, std::uint64_t max_attempts) {
  require(n >= 0, ErrorKind::invalid_argument, "depth must be non-negative");
  require(accepted >= 1, ErrorKind::invalid_argument, "need at least one accepted sample");
  if (n <= tree.depth() && (tree.regular() || n <= 24)) {
    const double qn = survival_exact(tree, n).q[n];
    require(qn >= 1e-6, ErrorKind::precondition,
            "P_T[|Y_n| > 0] = " + std::to_string(qn) + " is below 1e-6; rejection sampling is hopeless");
  }
  const int workers = resolve_threads(threads);
  const double p = 1.0 / tree.mu();
  struct Scratch {
    std::vector<VertexKey> cur, next;
  };
  std::vector<Scratch> scratch(workers);
  std::vector<std::uint32_t> block(kBlock);

  ConditionedSample out;
  out.n = n;
  out.sizes.reserve(accepted);
  std::uint64_t start = 0;
  while (out.sizes.size() < accepted) {
    require(start < max_attempts, ErrorKind::budget,
            "attempt cap of " + std::to_string(max_attempts) + " reached with " +
                std::to_string(out.sizes.size()) + " accepted samples");
    const std::uint64_t len = std::min(kBlock, max_attempts - start);
    parallel_for(0, len, workers, [&](std::uint64_t i, int w) {
      Scratch& s = scratch[w];
      SplitMix64 rng = make_stream(seed, StreamTag::perc, start + i);
      s.cur.assign(1, root_key(tree.seed()));
      for (int l = 0; l < n && !s.cur.empty(); ++l) {
        advance_open_level(tree, p, s.cur, s.next, rng);
        s.cur.swap(s.next);
      }
      block[i] = static_cast<std::uint32_t>(s.cur.size());
    });
    for (std::uint64_t i = 0; i < len && out.sizes.size() < accepted; ++i) {
      if (block[i] > 0) {
        out.sizes.push_back(block[i]);
        out.attempts = start + i + 1;
      }
    }
    if (out.sizes.size() < accepted) out.attempts = start + len;
    start += len;
  }
  return out;
}

int spread_depth(int n, double mu) {
  require(n >= 1, ErrorKind::invalid_argument, "spread diagnostics need n >= 1");
  const int m = static_cast<int>(std::ceil(std::log(static_cast<double>(n)) / (4.0 * std::log(mu))));
  return std::clamp(m, 1, n);
}

SpreadDiagnostics spread_diagnostics(const GWTree& tree, int n, std::uint64_t accepted,
                                     std::uint64_t seed, int threads, std::uint64_t max_attempts) {
  require(accepted >= 1, ErrorKind::invalid_argument, "need at least one accepted sample");
  SpreadDiagnostics out;
  out.n = n;
  out.m = spread_depth(n, tree.mu());
  const int m = out.m;
  const int workers = resolve_threads(threads);
  const double p = 1.0 / tree.mu();

  struct Node {
    VertexKey key;
    std::uint32_t label;  // rank of the depth-m ancestor within the depth-m frontier
  };
  struct Scratch {
    std::vector<Node> cur, next;
  };
  struct Result {
    bool multi = false;
    std::vector<VertexKey> y;
  };
  std::vector<Scratch> scratch(workers);
  std::vector<Result> block(kBlock);
  std::unordered_map<VertexKey, std::uint64_t> hits;
  std::uint64_t multi = 0, size_total = 0;

  std::uint64_t start = 0;
  while (out.accepted < accepted && start < max_attempts) {
    const std::uint64_t len = std::min(kBlock, max_attempts - start);
    parallel_for(0, len, workers, [&](std::uint64_t i, int w) {
      Scratch& s = scratch[w];
      SplitMix64 rng = make_stream(seed, StreamTag::spread, start + i);
      s.cur.assign(1, Node{root_key(tree.seed()), 0});
      for (int l = 0; l < n && !s.cur.empty(); ++l) {
        s.next.clear();
        for (const Node& v : s.cur) {
          const std::uint32_t c = tree.child_count(v.key);
          for (std::uint32_t j = 0; j < c; ++j)
            if (rng.bernoulli(p)) s.next.push_back(Node{child_key(v.key, j), v.label});
        }
        s.cur.swap(s.next);
        if (l + 1 == m)
          for (std::size_t r = 0; r < s.cur.size(); ++r) s.cur[r].label = static_cast<std::uint32_t>(r);
      }
      Result& res = block[i];
      res.y.clear();
      res.multi = false;
      if (s.cur.empty()) return;
      // breadth-first order keeps labels sorted, so two labels differ iff the ends differ
      res.multi = s.cur.front().label != s.cur.back().label;
      for (const Node& v : s.cur) res.y.push_back(v.key);
    });
    for (std::uint64_t i = 0; i < len && out.accepted < accepted; ++i) {
      const Result& res = block[i];
      if (res.y.empty()) continue;
      ++out.accepted;
      out.attempts = start + i + 1;
      multi += res.multi ? 1 : 0;
      size_total += res.y.size();
      for (VertexKey v : res.y) ++hits[v];
    }
    if (out.accepted < accepted) out.attempts = start + len;
    start += len;
  }

  out.low_confidence = out.accepted < 100;
  if (out.accepted == 0) return out;
  const double acc = static_cast<double>(out.accepted);
  out.p_multi = static_cast<double>(multi) / acc;
  out.mean_size = static_cast<double>(size_total) / acc;
  std::uint64_t max_hits = 0, hit_total = 0;
  for (const auto& [key, count] : hits) {
    max_hits = std::max(max_hits, count);
    hit_total += count;
  }
  out.p_max_empirical = static_cast<double>(max_hits) / acc;
  out.frequency_sum = static_cast<double>(hit_total) / acc;
  // every depth-n vertex sits at the end of an n-edge path: P_T[v in Y_n] = pc^n
  const double q_hat = acc / static_cast<double>(out.attempts);
  out.p_max = std::exp(n * std::log(p) - std::log(q_hat));
  return out;
}

}  // namespace gwperc
