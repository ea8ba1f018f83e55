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


#include "gwperc/gwperc.h"

#include <algorithm>
#include <cstring>
#include <memory>
#include <new>
#include <string>

#include "acceptance.hpp"
#include "annealed.hpp"
#include "error.hpp"
#include "iic.hpp"
#include "martingale.hpp"
#include "offspring.hpp"
#include "percolation.hpp"
#include "stats.hpp"
#include "tree.hpp"

struct gwp_offspring {
  gwperc::OffspringSpec spec;
};

struct gwp_tree {
  gwperc::GWTree tree;
};

namespace {

thread_local std::string last_error;

gwp_status status_of(gwperc::ErrorKind kind) {
  switch (kind) {
    case gwperc::ErrorKind::invalid_argument: return GWP_E_INVALID_ARGUMENT;
    case gwperc::ErrorKind::precondition: return GWP_E_PRECONDITION;
    case gwperc::ErrorKind::parse: return GWP_E_PARSE;
    case gwperc::ErrorKind::budget: return GWP_E_BUDGET;
    case gwperc::ErrorKind::io: return GWP_E_IO;
    case gwperc::ErrorKind::internal: return GWP_E_INTERNAL;
  }
  return GWP_E_INTERNAL;
}

gwp_status set_error(gwp_status s, const std::string& what) {
  last_error = what;
  return s;
}

template <class Fn>
gwp_status guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const gwperc::Error& e) {
    return set_error(status_of(e.kind()), e.what());
  } catch (const std::bad_alloc&) {
    return set_error(GWP_E_BUDGET, "out of memory");
  } catch (const std::exception& e) {
    return set_error(GWP_E_INTERNAL, e.what());
  } catch (...) {
    return set_error(GWP_E_INTERNAL, "unknown exception");
  }
}

#define GWP_REQUIRE_PTR(p) \
  if (!(p)) return set_error(GWP_E_INVALID_ARGUMENT, "null argument: " #p)

gwp_status copy_string(const std::string& s, char* buf, size_t cap, size_t* needed) {
  if (needed) *needed = s.size() + 1;
  if (!buf) return needed ? GWP_OK : set_error(GWP_E_INVALID_ARGUMENT, "null buffer");
  if (cap < s.size() + 1) {
    if (cap > 0) {
      std::memcpy(buf, s.data(), cap - 1);
      buf[cap - 1] = '\0';
    }
    return set_error(GWP_E_BUFFER_TOO_SMALL, "buffer holds " + std::to_string(cap) + " bytes, " +
                                                 std::to_string(s.size() + 1) + " needed");
  }
  std::memcpy(buf, s.c_str(), s.size() + 1);
  return GWP_OK;
}

void fill_fit(const std::optional<gwperc::DecayFit>& f, gwp_fit* out) {
  if (!out) return;
  *out = gwp_fit{0.0, 0.0, 0.0, 0};
  if (f) *out = gwp_fit{f->slope, f->intercept, f->residual, 1};
}

void fill_sandwich(const gwperc::SandwichBounds& b, gwp_sandwich* out) {
  *out = gwp_sandwich{b.lower, b.value, b.upper, b.holds() ? 1 : 0};
}

gwperc::Cdf make_cdf(gwp_cdf cdf, double lambda) {
  switch (cdf) {
    case GWP_CDF_EXP: return gwperc::exp_cdf(lambda);
    case GWP_CDF_GAMMA2: return gwperc::gamma2_cdf(lambda);
  }
  gwperc::fail(gwperc::ErrorKind::invalid_argument, "unknown cdf");
}

void report(const gwperc::acceptance::CriterionResult& r, gwp_criterion_callback cb, void* user) {
  if (!cb) return;
  std::vector<const char*> names;
  std::vector<double> values;
  for (const auto& [k, v] : r.metrics) {
    names.push_back(k.c_str());
    values.push_back(v);
  }
  const gwp_criterion c{r.id, r.name.c_str(), r.pass ? 1 : 0, r.seconds, r.limit_seconds,
                        r.detail.c_str(), names.size(), names.data(), values.data()};
  cb(&c, user);
}

}  // namespace

extern "C" {

const char* gwp_version(void) { return "0.1.0"; }

const char* gwp_last_error(void) { return last_error.c_str(); }

const char* gwp_status_name(gwp_status status) {
  switch (status) {
    case GWP_OK: return "ok";
    case GWP_E_INVALID_ARGUMENT: return "invalid argument";
    case GWP_E_PRECONDITION: return "precondition violated";
    case GWP_E_PARSE: return "parse error";
    case GWP_E_BUDGET: return "budget exceeded";
    case GWP_E_IO: return "i/o error";
    case GWP_E_INTERNAL: return "internal error";
    case GWP_E_BUFFER_TOO_SMALL: return "buffer too small";
  }
  return "unknown status";
}

gwp_status gwp_offspring_parse(const char* spec, gwp_offspring** out) {
  GWP_REQUIRE_PTR(spec);
  GWP_REQUIRE_PTR(out);
  return guarded([&] {
    *out = new gwp_offspring{gwperc::OffspringSpec::parse(spec)};
    return GWP_OK;
  });
}

void gwp_offspring_free(gwp_offspring* law) { delete law; }

gwp_status gwp_offspring_name(const gwp_offspring* law, char* buf, size_t cap, size_t* needed) {
  GWP_REQUIRE_PTR(law);
  return copy_string(law->spec.name(), buf, cap, needed);
}

gwp_status gwp_offspring_params(const gwp_offspring* law, int k_max, gwp_params* out, double* c, double* m) {
  GWP_REQUIRE_PTR(law);
  GWP_REQUIRE_PTR(out);
  return guarded([&] {
    const gwperc::CriticalParams p = gwperc::derive_params(law->spec, k_max);
    *out = gwp_params{p.mu, p.pc, p.phi2, p.lambda, p.lambda_alt};
    if (c) std::copy(p.c.begin(), p.c.end(), c);
    if (m) std::copy(p.m.begin(), p.m.end(), m);
    return GWP_OK;
  });
}

gwp_status gwp_offspring_sample(const gwp_offspring* law, uint64_t* rng_state, uint32_t* out) {
  GWP_REQUIRE_PTR(law);
  GWP_REQUIRE_PTR(rng_state);
  GWP_REQUIRE_PTR(out);
  gwperc::SplitMix64 rng(*rng_state);
  *out = law->spec.sample(rng);
  *rng_state = rng.state();
  return GWP_OK;
}

gwp_status gwp_annealed_offspring(const gwp_offspring* law, double* pmf, size_t cap, size_t* len) {
  GWP_REQUIRE_PTR(law);
  return guarded([&] {
    const gwperc::AnnealedLaw a = gwperc::annealed_offspring(law->spec);
    if (len) *len = a.pmf.size();
    if (!pmf) return GWP_OK;
    if (cap < a.pmf.size()) return set_error(GWP_E_BUFFER_TOO_SMALL, "pmf buffer too small");
    std::copy(a.pmf.begin(), a.pmf.end(), pmf);
    return GWP_OK;
  });
}

gwp_status gwp_tree_generate(const gwp_offspring* law, uint64_t seed, int depth, gwp_tree** out) {
  GWP_REQUIRE_PTR(law);
  GWP_REQUIRE_PTR(out);
  return guarded([&] {
    *out = new gwp_tree{gwperc::GWTree::generate(law->spec, seed, depth)};
    return GWP_OK;
  });
}

gwp_status gwp_tree_deepen(gwp_tree* tree, int new_depth) {
  GWP_REQUIRE_PTR(tree);
  return guarded([&] {
    tree->tree.deepen(new_depth);
    return GWP_OK;
  });
}

void gwp_tree_free(gwp_tree* tree) { delete tree; }

gwp_status gwp_tree_info_get(const gwp_tree* tree, gwp_tree_info* out) {
  GWP_REQUIRE_PTR(tree);
  GWP_REQUIRE_PTR(out);
  const gwperc::GWTree& t = tree->tree;
  *out = gwp_tree_info{t.depth(), t.arena_depth(), t.seed(), t.mu(), t.w_bar(), t.arena_size()};
  return GWP_OK;
}

gwp_status gwp_tree_spec(const gwp_tree* tree, char* buf, size_t cap, size_t* needed) {
  GWP_REQUIRE_PTR(tree);
  return copy_string(tree->tree.spec().name(), buf, cap, needed);
}

gwp_status gwp_tree_z(const gwp_tree* tree, int n, double* out) {
  GWP_REQUIRE_PTR(tree);
  GWP_REQUIRE_PTR(out);
  return guarded([&] {
    *out = tree->tree.z(n);
    return GWP_OK;
  });
}

gwp_status gwp_tree_w(const gwp_tree* tree, int n, double* out) {
  GWP_REQUIRE_PTR(tree);
  GWP_REQUIRE_PTR(out);
  return guarded([&] {
    *out = tree->tree.w(n);
    return GWP_OK;
  });
}

gwp_status gwp_tree_w_estimate(const gwp_tree* tree, int depth, uint64_t rank, int lookahead, double* out) {
  GWP_REQUIRE_PTR(tree);
  GWP_REQUIRE_PTR(out);
  return guarded([&] {
    const gwperc::GWTree& t = tree->tree;
    gwperc::require(depth >= 0 && depth <= t.arena_depth(), gwperc::ErrorKind::precondition,
                    "vertex depth outside the materialized tree");
    *out = t.w_estimate(t.vertex(depth, rank), lookahead);
    return GWP_OK;
  });
}

gwp_status gwp_tree_audit(const gwp_tree* tree) {
  GWP_REQUIRE_PTR(tree);
  return guarded([&] {
    tree->tree.audit();
    return GWP_OK;
  });
}

gwp_status gwp_tree_save(const gwp_tree* tree, const char* path) {
  GWP_REQUIRE_PTR(tree);
  GWP_REQUIRE_PTR(path);
  return guarded([&] {
    tree->tree.save(path);
    return GWP_OK;
  });
}

gwp_status gwp_tree_load(const char* path, gwp_tree** out) {
  GWP_REQUIRE_PTR(path);
  GWP_REQUIRE_PTR(out);
  return guarded([&] {
    *out = new gwp_tree{gwperc::GWTree::load(path)};
    return GWP_OK;
  });
}

gwp_status gwp_tree_serialize(const gwp_tree* tree, char* buf, size_t cap, size_t* needed) {
  GWP_REQUIRE_PTR(tree);
  return guarded([&] { return copy_string(tree->tree.serialize(), buf, cap, needed); });
}

gwp_status gwp_tree_deserialize(const char* text, gwp_tree** out) {
  GWP_REQUIRE_PTR(text);
  GWP_REQUIRE_PTR(out);
  return guarded([&] {
    *out = new gwp_tree{gwperc::GWTree::deserialize(text)};
    return GWP_OK;
  });
}

gwp_status gwp_survival_exact(const gwp_tree* tree, int n, double* q) {
  GWP_REQUIRE_PTR(tree);
  GWP_REQUIRE_PTR(q);
  return guarded([&] {
    const auto c = gwperc::survival_exact(tree->tree, n);
    std::copy(c.q.begin(), c.q.end(), q);
    return GWP_OK;
  });
}

gwp_status gwp_moments_exact(const gwp_tree* tree, int n, int k, double* values, int* precision_warning) {
  GWP_REQUIRE_PTR(tree);
  GWP_REQUIRE_PTR(values);
  return guarded([&] {
    const auto t = gwperc::factorial_moments_exact(tree->tree, n, k);
    std::copy(t.values.begin(), t.values.end(), values);
    if (precision_warning) *precision_warning = t.precision_warning ? 1 : 0;
    return GWP_OK;
  });
}

gwp_status gwp_sandwich_check(const gwp_tree* tree, int n, gwp_sandwich* out) {
  GWP_REQUIRE_PTR(tree);
  GWP_REQUIRE_PTR(out);
  return guarded([&] {
    const auto q = gwperc::survival_exact(tree->tree, n);
    const auto m = gwperc::factorial_moments_exact(tree->tree, n, 2);
    fill_sandwich(gwperc::sandwich_check(tree->tree, n, q, m), out);
    return GWP_OK;
  });
}

gwp_status gwp_sandwich_from_estimates(int n, double mean_size, double mean_size_sq, double survival,
                                       double w_bar, double pc, gwp_sandwich* out) {
  GWP_REQUIRE_PTR(out);
  fill_sandwich(gwperc::sandwich_from_estimates(n, mean_size, mean_size_sq, survival, w_bar, pc), out);
  return GWP_OK;
}

gwp_status gwp_percolate_once(const gwp_tree* tree, int n, uint64_t* rng_state, uint64_t* size) {
  GWP_REQUIRE_PTR(tree);
  GWP_REQUIRE_PTR(rng_state);
  GWP_REQUIRE_PTR(size);
  return guarded([&] {
    gwperc::SplitMix64 rng(*rng_state);
    *size = gwperc::percolate_once(tree->tree, n, rng).size();
    *rng_state = rng.state();
    return GWP_OK;
  });
}

gwp_status gwp_survival_mc(const gwp_tree* tree, int n, uint64_t replicates, uint64_t seed, int threads,
                           double* q, double* std_error, double* mean_size, double* mean_size_sq) {
  GWP_REQUIRE_PTR(tree);
  return guarded([&] {
    const auto e = gwperc::survival_mc(tree->tree, n, replicates, seed, threads);
    for (int j = 0; j <= n; ++j) {
      if (q) q[j] = e.q(j);
      if (std_error) std_error[j] = e.std_error(j);
      if (mean_size) mean_size[j] = e.mean_size(j);
      if (mean_size_sq) mean_size_sq[j] = e.mean_size_sq(j);
    }
    return GWP_OK;
  });
}

gwp_status gwp_conditioned_sizes(const gwp_tree* tree, int n, uint64_t accepted, uint64_t seed, int threads,
                                 uint64_t max_attempts, uint64_t* sizes, uint64_t* attempts) {
  GWP_REQUIRE_PTR(tree);
  GWP_REQUIRE_PTR(sizes);
  return guarded([&] {
    const auto s = gwperc::conditioned_sizes(tree->tree, n, accepted, seed, threads,
                                             max_attempts ? max_attempts : gwperc::kDefaultAttemptCap);
    std::copy(s.sizes.begin(), s.sizes.end(), sizes);
    if (attempts) *attempts = s.attempts;
    return GWP_OK;
  });
}

gwp_status gwp_spread_diagnostics(const gwp_tree* tree, int n, uint64_t accepted, uint64_t seed, int threads,
                                  uint64_t max_attempts, gwp_spread* out) {
  GWP_REQUIRE_PTR(tree);
  GWP_REQUIRE_PTR(out);
  return guarded([&] {
    const auto d = gwperc::spread_diagnostics(tree->tree, n, accepted, seed, threads,
                                              max_attempts ? max_attempts : gwperc::kDefaultAttemptCap);
    *out = gwp_spread{d.n, d.m, d.accepted, d.attempts, d.p_multi, d.p_max, d.p_max_empirical,
                      d.frequency_sum, d.mean_size, d.low_confidence ? 1 : 0};
    return GWP_OK;
  });
}

gwp_status gwp_martingale_trace(const gwp_tree* tree, int n_max, int k, double* values) {
  GWP_REQUIRE_PTR(tree);
  GWP_REQUIRE_PTR(values);
  return guarded([&] {
    const auto params = gwperc::derive_params(tree->tree.spec(), std::max(4, k));
    const auto t = gwperc::martingale_trace(tree->tree, params, n_max, k);
    std::copy(t.values.begin(), t.values.end(), values);
    return GWP_OK;
  });
}

gwp_status gwp_increment_study(const gwp_offspring* law, int k, int n_max, uint64_t trees, uint64_t seed,
                               int threads, double* mean, double* std_error, double* l2, gwp_fit* fit) {
  GWP_REQUIRE_PTR(law);
  return guarded([&] {
    const auto s = gwperc::increment_study(law->spec, k, n_max, trees, seed, threads);
    if (mean) std::copy(s.mean.begin(), s.mean.end(), mean);
    if (std_error) std::copy(s.std_error.begin(), s.std_error.end(), std_error);
    if (l2) std::copy(s.l2.begin(), s.l2.end(), l2);
    fill_fit(s.fit, fit);
    return GWP_OK;
  });
}

gwp_status gwp_iic_sample(const gwp_tree* tree, int n, int lookahead, int horizon, uint64_t* rng_state,
                          uint64_t* spine, uint64_t* c_n) {
  GWP_REQUIRE_PTR(tree);
  GWP_REQUIRE_PTR(rng_state);
  GWP_REQUIRE_PTR(c_n);
  return guarded([&] {
    gwperc::IICOptions o;
    o.lookahead = lookahead;
    o.horizon = horizon != 0;
    gwperc::SplitMix64 rng(*rng_state);
    const auto s = gwperc::IICSampler(tree->tree, n, o).sample(rng);
    *rng_state = rng.state();
    if (spine) std::copy(s.spine.begin(), s.spine.end(), spine);
    *c_n = s.c_n;
    return GWP_OK;
  });
}

gwp_status gwp_iic_experiment(const gwp_tree* tree, int n, uint64_t replicates, uint64_t seed, int lookahead,
                              int threads, double* scaled, uint64_t* min_c_n) {
  GWP_REQUIRE_PTR(tree);
  GWP_REQUIRE_PTR(scaled);
  return guarded([&] {
    gwperc::IICOptions o;
    o.lookahead = lookahead;
    const auto e = gwperc::iic_size_experiment(tree->tree, n, replicates, seed, o, threads);
    std::copy(e.scaled.begin(), e.scaled.end(), scaled);
    if (min_c_n) *min_c_n = e.min_c_n;
    return GWP_OK;
  });
}

gwp_status gwp_iic_marginal_exact(const gwp_tree* tree, const uint64_t* shape, size_t len, int n,
                                  int lookahead, double* out) {
  GWP_REQUIRE_PTR(tree);
  GWP_REQUIRE_PTR(out);
  if (len > 0) GWP_REQUIRE_PTR(shape);
  return guarded([&] {
    *out = gwperc::iic_marginal_exact(tree->tree, std::span<const std::uint64_t>(shape, len), n, lookahead);
    return GWP_OK;
  });
}

gwp_status gwp_iic_branch_transitions(const gwp_tree* tree, int lookahead, double* probs, size_t cap,
                                      size_t* len) {
  GWP_REQUIRE_PTR(tree);
  return guarded([&] {
    const auto t = gwperc::branch_transitions(tree->tree, lookahead);
    if (len) *len = t.size();
    if (!probs) return GWP_OK;
    if (cap < t.size()) return set_error(GWP_E_BUFFER_TOO_SMALL, "transition buffer too small");
    std::copy(t.begin(), t.end(), probs);
    return GWP_OK;
  });
}

gwp_status gwp_annealed_survival(const gwp_offspring* law, int n_max, double* q) {
  GWP_REQUIRE_PTR(law);
  GWP_REQUIRE_PTR(q);
  return guarded([&] {
    const auto v = gwperc::annealed_survival_exact(law->spec, n_max);
    std::copy(v.begin(), v.end(), q);
    return GWP_OK;
  });
}

gwp_status gwp_annealed_yaglom(const gwp_offspring* law, int n, uint64_t accepted, uint64_t seed, int threads,
                               double* scaled, uint64_t* attempts) {
  GWP_REQUIRE_PTR(law);
  GWP_REQUIRE_PTR(scaled);
  return guarded([&] {
    const auto y = gwperc::annealed_yaglom(law->spec, n, accepted, seed, threads);
    std::copy(y.scaled.begin(), y.scaled.end(), scaled);
    if (attempts) *attempts = y.attempts;
    return GWP_OK;
  });
}

gwp_status gwp_annealed_iic(const gwp_offspring* law, int n, uint64_t replicates, uint64_t seed, int lookahead,
                            int threads, double* scaled, uint64_t* min_c_n) {
  GWP_REQUIRE_PTR(law);
  GWP_REQUIRE_PTR(scaled);
  return guarded([&] {
    const auto e = gwperc::annealed_iic_sizes(law->spec, n, replicates, seed, lookahead, threads);
    std::copy(e.scaled.begin(), e.scaled.end(), scaled);
    if (min_c_n) *min_c_n = e.min_c_n;
    return GWP_OK;
  });
}

gwp_status gwp_cdf_eval(gwp_cdf cdf, double lambda, double x, double* out) {
  GWP_REQUIRE_PTR(out);
  return guarded([&] {
    *out = make_cdf(cdf, lambda)(x);
    return GWP_OK;
  });
}

gwp_status gwp_ks_distance(const double* sample, size_t len, gwp_cdf cdf, double lambda, double* out) {
  GWP_REQUIRE_PTR(out);
  if (len > 0) GWP_REQUIRE_PTR(sample);
  return guarded([&] {
    *out = gwperc::ks_distance(std::span<const double>(sample, len), make_cdf(cdf, lambda));
    return GWP_OK;
  });
}

gwp_status gwp_summary(const double* sample, size_t len, double* mean, double* variance, double* std_error) {
  if (len > 0) GWP_REQUIRE_PTR(sample);
  return guarded([&] {
    const auto s = gwperc::summarize(std::span<const double>(sample, len));
    if (mean) *mean = s.mean;
    if (variance) *variance = s.variance;
    if (std_error) *std_error = s.std_error;
    return GWP_OK;
  });
}

gwp_status gwp_decay_fit(const double* x, const double* y, size_t len, gwp_fit* out) {
  GWP_REQUIRE_PTR(out);
  if (len > 0) {
    GWP_REQUIRE_PTR(x);
    GWP_REQUIRE_PTR(y);
  }
  return guarded([&] {
    fill_fit(gwperc::decay_fit(std::span<const double>(x, len), std::span<const double>(y, len)), out);
    return GWP_OK;
  });
}

gwp_status gwp_verify_all(gwp_budget budget, int threads, gwp_criterion_callback callback, void* user,
                          int* all_pass) {
  return guarded([&] {
    const auto b = budget == GWP_BUDGET_FULL ? gwperc::acceptance::Budget::full
                                             : gwperc::acceptance::Budget::smoke;
    const auto results = gwperc::acceptance::run_all(
        b, threads, [&](const gwperc::acceptance::CriterionResult& r) { report(r, callback, user); });
    if (all_pass)
      *all_pass = std::all_of(results.begin(), results.end(), [](const auto& r) { return r.pass; }) ? 1 : 0;
    return GWP_OK;
  });
}

gwp_status gwp_verify_one(int id, gwp_budget budget, int threads, gwp_criterion_callback callback, void* user,
                          int* pass) {
  return guarded([&] {
    const auto b = budget == GWP_BUDGET_FULL ? gwperc::acceptance::Budget::full
                                             : gwperc::acceptance::Budget::smoke;
    const auto r = gwperc::acceptance::run_criterion(id, b, threads);
    report(r, callback, user);
    if (pass) *pass = r.pass ? 1 : 0;
    return GWP_OK;
  });
}

}  // extern "C"
