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


#include "acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <optional>
#include <unordered_map>

#include "annealed.hpp"
#include "error.hpp"
#include "iic.hpp"
#include "martingale.hpp"
#include "offspring.hpp"
#include "oracle.hpp"
#include "percolation.hpp"
#include "stats.hpp"
#include "tree.hpp"

namespace gwperc::acceptance {
namespace {

constexpr std::uint64_t kDeepSeeds[] = {1, 2, 3, 4, 5};
constexpr std::uint64_t kFixedTreeSeed = 1;
constexpr int kArenaDepth = 20;
constexpr int kIICLookahead = 10;

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

struct DeepTree {
  std::uint64_t seed = 0;
  GWTree tree;
  SurvivalEstimate estimate;
};

struct Context {
  Budget budget;
  int threads;
  std::vector<DeepTree> deep;

  bool full() const { return budget == Budget::full; }
  std::uint64_t pick(std::uint64_t smoke, std::uint64_t full_count) const {
    return full() ? full_count : smoke;
  }
};

const OffspringSpec& det2() {
  static const OffspringSpec s = OffspringSpec::deterministic(2);
  return s;
}

const OffspringSpec& unif13() {
  static const OffspringSpec s = OffspringSpec::uniform_range(1, 3);
  return s;
}

void metric(CriterionResult& r, std::string name, double v) { r.metrics.emplace_back(std::move(name), v); }

void append(std::string& s, const std::string& part) {
  if (!s.empty()) s += "; ";
  s += part;
}

// 1. Annealed Kolmogorov estimate by exact pgf iteration.
void annealed_kolmogorov(Context&, CriterionResult& r) {
  constexpr int n = 10'000;
  bool ok = true;
  for (const OffspringSpec* spec : {&det2(), &unif13()}) {
    const double lambda = derive_params(*spec).lambda;
    const double q = annealed_survival_exact(*spec, n)[n];
    const double err = n * q / lambda - 1.0;
    ok = ok && std::abs(err) < 0.02;
    metric(r, spec->name() + ".rel_err", err);
    append(r.detail, spec->name() + " n*q/lambda - 1 = " + fmt("%.5f", err));
  }
  r.pass = ok;
}

// 2. Annealed and quenched survival agree on the regular tree.
void deterministic_consistency(Context&, CriterionResult& r) {
  constexpr int n = 512;
  const GWTree tree = GWTree::generate(det2(), 0, n);
  const auto quenched = survival_exact(tree, n).q;
  const auto annealed = annealed_survival_exact(det2(), n);
  double worst = 0.0;
  for (int j = 0; j <= n; ++j) worst = std::max(worst, std::abs(quenched[j] - annealed[j]));
  metric(r, "max_abs_diff", worst);
  r.detail = "max |q~_n - q_n| over n <= 512 = " + fmt("%.3g", worst);
  r.pass = worst < 1e-12;
}

void ensure_deep_trees(Context& ctx) {
  if (!ctx.deep.empty()) return;
  const std::uint64_t reps = ctx.pick(100'000, 400'000);
  for (std::uint64_t seed : kDeepSeeds) {
    GWTree tree = GWTree::generate(unif13(), seed, kArenaDepth);
    SurvivalEstimate est = survival_mc(tree, 512, reps, 1000 + seed, ctx.threads);
    ctx.deep.push_back(DeepTree{seed, std::move(tree), std::move(est)});
  }
}

// 3. Quenched Kolmogorov estimate on fixed trees.
void quenched_kolmogorov(Context& ctx, CriterionResult& r) {
  constexpr int n = 512;
  ensure_deep_trees(ctx);
  const double lambda = derive_params(unif13()).lambda;
  bool ok = true;
  for (const DeepTree& d : ctx.deep) {
    const double w = d.tree.w(kArenaDepth);
    const double ratio = n * d.estimate.q(n) / (lambda * w);
    const double rse = d.estimate.std_error(n) / d.estimate.q(n);
    ok = ok && ratio >= 0.85 && ratio <= 1.15;
    metric(r, "seed" + std::to_string(d.seed) + ".ratio", ratio);
    metric(r, "seed" + std::to_string(d.seed) + ".rel_se", rse);
    append(r.detail, "seed " + std::to_string(d.seed) + ": " + fmt("%.3f", ratio) + " (+-" +
                         fmt("%.3f", ratio * rse) + ")");
  }
  r.detail += "; W_n read at depth " + std::to_string(kArenaDepth) + ", q_512 by Monte Carlo with " +
              std::to_string(ctx.deep.front().estimate.replicates) + " runs per tree";
  r.pass = ok;
}

// 4. Quenched Yaglom limit.
void quenched_yaglom(Context& ctx, CriterionResult& r) {
  constexpr int n = 256;
  const std::uint64_t accepted = ctx.pick(2'000, 5'000);
  bool ok = true;
  for (const OffspringSpec* spec : {&unif13(), &det2()}) {
    const double lambda = derive_params(*spec).lambda;
    const GWTree tree = GWTree::generate(*spec, kFixedTreeSeed, spec->is_deterministic() ? n : 0);
    const ConditionedSample s = conditioned_sizes(tree, n, accepted, 4000, ctx.threads);
    std::vector<double> x(s.sizes.size());
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = static_cast<double>(s.sizes[i]) / n;
    const double ks = ks_distance(x, exp_cdf(lambda));
    const double mean = summarize(x).mean;
    ok = ok && ks < 0.05;
    metric(r, spec->name() + ".ks", ks);
    metric(r, spec->name() + ".mean_times_lambda", mean * lambda);
    append(r.detail, spec->name() + " KS = " + fmt("%.4f", ks) + ", lambda*mean = " + fmt("%.3f", mean * lambda));
  }
  r.pass = ok;
}

// 5. Quenched IIC size law.
void quenched_iic(Context& ctx, CriterionResult& r) {
  constexpr int n = 256;
  const std::uint64_t reps = ctx.pick(2'000, 5'000);
  bool ok = true;
  for (const OffspringSpec* spec : {&det2(), &unif13()}) {
    const double lambda = derive_params(*spec).lambda;
    const GWTree tree = GWTree::generate(*spec, kFixedTreeSeed, 0);
    IICOptions opts;
    opts.lookahead = kIICLookahead;
    const IICExperiment e = iic_size_experiment(tree, n, reps, 5000, opts, ctx.threads);
    const EmpiricalSummary s = summarize(e.scaled);
    const double ks = ks_distance_sorted(s.sorted, gamma2_cdf(lambda));
    const double mean_err = s.mean / (2.0 / lambda) - 1.0;
    ok = ok && ks < 0.05 && std::abs(mean_err) < 0.05 && e.min_c_n >= 1;
    metric(r, spec->name() + ".ks", ks);
    metric(r, spec->name() + ".mean_rel_err", mean_err);
    append(r.detail, spec->name() + " KS = " + fmt("%.4f", ks) + ", mean/(2/lambda) - 1 = " + fmt("%.4f", mean_err));
  }
  // lookahead sensitivity at the first branching spine step
  const GWTree tree = GWTree::generate(unif13(), kFixedTreeSeed, 0);
  const auto a = branch_transitions(tree, kIICLookahead);
  const auto b = branch_transitions(tree, 20);
  double diff = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) diff = std::max(diff, std::abs(a[j] - b[j]));
  metric(r, "branch_transition_diff_m10_m20", diff);
  append(r.detail, "lookahead " + std::to_string(kIICLookahead) + "; first branching transitions m=10 vs m=20 differ by " + fmt("%.2g", diff));
  r.pass = ok;
}

// 6. Moment DP against brute-force enumeration.
void moment_oracle(Context&, CriterionResult& r) {
  const OffspringSpec specs[] = {unif13(), OffspringSpec::finite_pmf({0.5, 0.5}),
                                 OffspringSpec::geometric_shifted(0.6), OffspringSpec::poisson_positive(1.5)};
  double worst = 0.0;
  int trees = 0;
  std::uint64_t max_edges = 0;
  for (std::uint64_t seed = 1; trees < 20; ++seed) {
    const OffspringSpec& spec = specs[seed % 4];
    const int n = 1 + static_cast<int>(mix64(seed) % 4);
    GWTree tree = GWTree::generate(spec, seed, n);
    const std::uint64_t edges = oracle::edge_count(tree, n);
    if (edges > 20) continue;
    ++trees;
    max_edges = std::max(max_edges, edges);
    const MomentTable dp = factorial_moments_exact(tree, n, 3);
    const MomentTable bf = oracle::brute_force_moments(tree, n, 3);
    for (std::size_t i = 0; i < dp.values.size(); ++i) worst = std::max(worst, std::abs(dp.values[i] - bf.values[i]));
  }
  metric(r, "max_abs_err", worst);
  r.detail = "20 trees (up to " + std::to_string(max_edges) + " edges), k <= 3: max error " + fmt("%.3g", worst);
  r.pass = worst < 1e-12;
}

// 7. IIC sampler against the exact marginal on small trees.
void iic_marginals(Context& ctx, CriterionResult& r) {
  constexpr int n = 2;
  constexpr int m = 20;
  constexpr std::uint64_t samples = 100'000;
  double worst_tv = 0.0, worst_sum = 0.0, worst_consistency = 0.0;
  int trees = 0;
  for (std::uint64_t seed = 1; trees < 10; ++seed) {
    const GWTree tree = GWTree::generate(unif13(), seed, n);
    if (oracle::edge_count(tree, n) > 9) continue;
    ++trees;
    const IICExact exact(tree, n, m);
    const IICExact exact1(tree, 1, m + 1);
    std::map<std::uint64_t, double> law;
    std::map<std::uint64_t, double> induced;
    const std::uint64_t depth1_mask = (1ULL << (1 + tree.level_size(1))) - 1;
    double total = 0.0;
    for (const auto& [mask, prob] : oracle::cluster_law(tree, n)) {
      const double v = exact.marginal(oracle::mask_to_ids(mask));
      if (v > 0.0) law[mask] = v;
      total += v;
      induced[mask & depth1_mask] += v;
    }
    worst_sum = std::max(worst_sum, std::abs(total - 1.0));
    for (const auto& [mask, v] : induced)
      worst_consistency = std::max(worst_consistency, std::abs(v - exact1.marginal(oracle::mask_to_ids(mask))));

    std::unordered_map<VertexKey, std::uint64_t> id_of;
    for (int d = 0; d <= n; ++d) {
      const auto keys = tree.keys(d);
      for (std::uint64_t i = 0; i < keys.size(); ++i) id_of[keys[i]] = tree.level_offset(d) + i;
    }
    IICOptions opts;
    opts.lookahead = m;
    opts.horizon = true;
    opts.record_cluster = true;
    const IICSampler sampler(tree, n, opts);
    WeightCache cache;
    std::map<std::uint64_t, std::uint64_t> counts;
    for (std::uint64_t i = 0; i < samples; ++i) {
      SplitMix64 rng = make_stream(7000 + seed, StreamTag::iic, i);
      const IICSample s = sampler.sample(rng, &cache);
      std::uint64_t mask = 0;
      for (const auto& level : s.cluster)
        for (VertexKey k : level) mask |= 1ULL << id_of.at(k);
      ++counts[mask];
    }
    double tv = 0.0;
    for (const auto& [mask, v] : law) {
      const auto it = counts.find(mask);
      const double f = it == counts.end() ? 0.0 : static_cast<double>(it->second) / samples;
      tv += std::abs(f - v);
    }
    for (const auto& [mask, c] : counts)
      if (!law.count(mask)) tv += static_cast<double>(c) / samples;
    worst_tv = std::max(worst_tv, 0.5 * tv);
  }
  (void)ctx;
  metric(r, "max_tv", worst_tv);
  metric(r, "max_sum_err", worst_sum);
  metric(r, "max_consistency_err", worst_consistency);
  r.detail = "10 trees: max TV " + fmt("%.4f", worst_tv) + ", |sum - 1| " + fmt("%.2g", worst_sum) +
             ", depth consistency " + fmt("%.2g", worst_consistency);
  r.pass = worst_tv < 0.02 && worst_sum < 1e-9 && worst_consistency < 1e-9;
}

// 8. Martingale property and increment decay.
void martingale_decay(Context& ctx, CriterionResult& r) {
  const std::uint64_t trees = ctx.pick(2'000, 10'000);
  const IncrementStudy s = increment_study(unif13(), 2, 12, trees, 8000, ctx.threads);
  double worst_z = 0.0;
  for (int n = 0; n < s.n_max; ++n)
    if (s.std_error[n] > 0.0) worst_z = std::max(worst_z, std::abs(s.mean[n]) / s.std_error[n]);
  const bool all_zero_ok = std::all_of(s.std_error.begin(), s.std_error.end(), [](double e) { return e > 0.0; });
  metric(r, "max_abs_z", worst_z);
  r.detail = std::to_string(trees) + " trees: max |mean| / se = " + fmt("%.2f", worst_z);
  if (s.fit) {
    metric(r, "slope", s.fit->slope);
    r.detail += ", log-L2 slope " + fmt("%.4f", s.fit->slope);
  } else {
    r.detail += ", no decay fit (vanishing increments)";
  }
  r.pass = all_zero_ok && worst_z <= 4.0 && s.fit && s.fit->slope < -0.05;
}

// 9. Sandwich bounds on the trees of criteria 3 to 5.
void sandwich(Context& ctx, CriterionResult& r) {
  std::uint64_t checks = 0;
  double min_lower_gap = 1e300, min_upper_gap = 1e300;
  bool ok = true;
  auto record = [&](const SandwichBounds& b) {
    ++checks;
    ok = ok && b.holds();
    min_lower_gap = std::min(min_lower_gap, b.value - b.lower);
    min_upper_gap = std::min(min_upper_gap, b.upper - b.value);
  };
  {
    constexpr int n = 512;
    const GWTree tree = GWTree::generate(det2(), kFixedTreeSeed, n);
    const SurvivalCurve q = survival_exact(tree, n);
    const MomentTable m = factorial_moments_exact(tree, n, 2);
    for (int j = 0; j <= n; ++j) record(sandwich_check(tree, j, q, m));
  }
  ensure_deep_trees(ctx);
  for (const DeepTree& d : ctx.deep) {
    const SurvivalCurve q = survival_exact(d.tree, kArenaDepth);
    const MomentTable m = factorial_moments_exact(d.tree, kArenaDepth, 2);
    for (int j = 0; j <= kArenaDepth; ++j) record(sandwich_check(d.tree, j, q, m));
    const double pc = 1.0 / d.tree.mu();
    for (int j = kArenaDepth + 1; j <= 512; ++j)
      record(sandwich_from_estimates(j, d.estimate.mean_size(j), d.estimate.mean_size_sq(j),
                                     d.estimate.q(j), d.tree.w_bar(), pc));
  }
  metric(r, "checks", static_cast<double>(checks));
  metric(r, "min_lower_gap", min_lower_gap);
  metric(r, "min_upper_gap", min_upper_gap);
  r.detail = std::to_string(checks) + " (tree, depth) pairs; exact to depth " + std::to_string(kArenaDepth) +
             " (512 on det:2), Monte Carlo estimates beyond";
  r.pass = ok;
}

// 10. Spread diagnostics over a doubling sequence.
void spread(Context& ctx, CriterionResult& r) {
  const std::uint64_t accepted = ctx.pick(2'000, 10'000);
  const GWTree tree = GWTree::generate(unif13(), kFixedTreeSeed, 0);
  std::vector<SpreadDiagnostics> rows;
  bool ok = true;
  for (int n : {64, 128, 256}) {
    rows.push_back(spread_diagnostics(tree, n, accepted, 10'000 + n, ctx.threads));
    const SpreadDiagnostics& d = rows.back();
    ok = ok && !d.low_confidence && std::abs(d.frequency_sum - d.mean_size) <= 1e-9 * d.mean_size;
    metric(r, "n" + std::to_string(n) + ".p_multi", d.p_multi);
    metric(r, "n" + std::to_string(n) + ".p_max", d.p_max);
    append(r.detail, "n=" + std::to_string(n) + " m=" + std::to_string(d.m) + " p_multi " + fmt("%.4f", d.p_multi) +
                         " p_max " + fmt("%.3g", d.p_max));
  }
  for (std::size_t i = 1; i < rows.size(); ++i)
    ok = ok && rows[i].p_multi < rows[i - 1].p_multi && rows[i].p_max < rows[i - 1].p_max;
  r.pass = ok;
}

struct Entry {
  const char* name;
  double limit;
  void (*run)(Context&, CriterionResult&);
};

const Entry kEntries[kCriteria] = {
    {"annealed Kolmogorov estimate", 1.0, annealed_kolmogorov},
    {"deterministic-tree consistency", 1.0, deterministic_consistency},
    {"quenched Kolmogorov estimate", 60.0, quenched_kolmogorov},
    {"quenched Yaglom limit", 600.0, quenched_yaglom},
    {"quenched IIC size law", 600.0, quenched_iic},
    {"moment DP vs brute force", 60.0, moment_oracle},
    {"IIC sampler vs exact marginal", 300.0, iic_marginals},
    {"martingale property and decay", 300.0, martingale_decay},
    {"sandwich bounds", 0.0, sandwich},
    {"spread diagnostics", 600.0, spread},
};

CriterionResult run_one(int id, Context& ctx) {
  require(id >= 1 && id <= kCriteria, ErrorKind::invalid_argument, "criterion id must lie in 1..10");
  const Entry& e = kEntries[id - 1];
  CriterionResult r;
  r.id = id;
  r.name = e.name;
  r.limit_seconds = e.limit;
  const auto start = std::chrono::steady_clock::now();
  try {
    e.run(ctx, r);
  } catch (const std::exception& ex) {
    r.pass = false;
    append(r.detail, std::string("error: ") + ex.what());
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (e.limit > 0.0 && r.seconds > e.limit) {
    r.pass = false;
    append(r.detail, "runtime " + fmt("%.1f", r.seconds) + " s over the " + fmt("%.0f", e.limit) + " s limit");
  }
  return r;
}

}  // namespace

CriterionResult run_criterion(int id, Budget budget, int threads) {
  Context ctx{budget, threads, {}};
  return run_one(id, ctx);
}

std::vector<CriterionResult> run_all(Budget budget, int threads, const Reporter& report) {
  Context ctx{budget, threads, {}};
  std::vector<CriterionResult> out;
  for (int id = 1; id <= kCriteria; ++id) {
    out.push_back(run_one(id, ctx));
    if (report) report(out.back());
  }
  return out;
}

}  // namespace gwperc::acceptance
