/*
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/* Exercises the shared library through its C header only. */

#include <math.h>
#include <stdio.h>
#include <stdlib.h>
#include <string.h>

#include <gwperc/gwperc.h>

static int failures = 0;

#define CHECK(cond)                                                  \
  do {                                                               \
    if (!(cond)) {                                                   \
      fprintf(stderr, "%s:%d: CHECK(%s) failed\n", __FILE__, __LINE__, #cond); \
      ++failures;                                                    \
    }                                                                \
  } while (0)

#define CHECK_OK(call) CHECK((call) == GWP_OK)

static void offspring(void) {
  gwp_offspring* law = NULL;
  CHECK_OK(gwp_offspring_parse("unif:1:3", &law));
  gwp_params p;
  double c[9];
  double m[5];
  CHECK_OK(gwp_offspring_params(law, 2, &p, c, m));
  CHECK(fabs(p.lambda - 3.0) < 1e-14);
  CHECK(fabs(p.pc - 0.5) < 1e-14);
  CHECK(fabs(c[2 * 3 + 1] - 0.25 * 8.0 / 3.0 / 2.0) < 1e-14);

  char small[4];
  size_t needed = 0;
  CHECK(gwp_offspring_name(law, small, sizeof small, &needed) == GWP_E_BUFFER_TOO_SMALL);
  CHECK(needed == strlen("unif:1:3") + 1);
  char name[32];
  CHECK_OK(gwp_offspring_name(law, name, sizeof name, NULL));
  CHECK(strcmp(name, "unif:1:3") == 0);

  uint64_t state = 5;
  uint32_t z = 0;
  for (int i = 0; i < 100; ++i) {
    CHECK_OK(gwp_offspring_sample(law, &state, &z));
    CHECK(z >= 1 && z <= 3);
  }

  double pmf[8];
  size_t len = 0;
  CHECK_OK(gwp_annealed_offspring(law, pmf, 8, &len));
  CHECK(len == 4);
  CHECK(fabs(pmf[0] - 7.0 / 24.0) < 1e-14);
  gwp_offspring_free(law);

  gwp_offspring* bad = NULL;
  CHECK(gwp_offspring_parse("bogus", &bad) == GWP_E_PARSE);
  CHECK(bad == NULL);
  CHECK(strlen(gwp_last_error()) > 0);
  CHECK(gwp_offspring_parse(NULL, &bad) == GWP_E_INVALID_ARGUMENT);
  CHECK(strcmp(gwp_status_name(GWP_E_BUDGET), "budget exceeded") == 0);
}

static void trees(void) {
  gwp_offspring* law = NULL;
  CHECK_OK(gwp_offspring_parse("unif:1:3", &law));
  gwp_tree* t = NULL;
  CHECK_OK(gwp_tree_generate(law, 42, 5, &t));
  double w = 0.0;
  CHECK_OK(gwp_tree_w(t, 5, &w));
  CHECK(w == 2.03125);
  CHECK(gwp_tree_w(t, 6, &w) == GWP_E_PRECONDITION);
  CHECK_OK(gwp_tree_audit(t));

  size_t needed = 0;
  CHECK_OK(gwp_tree_serialize(t, NULL, 0, &needed)); /* size query */
  CHECK(needed > 1);
  char* text = malloc(needed);
  CHECK_OK(gwp_tree_serialize(t, text, needed, NULL));
  gwp_tree* back = NULL;
  CHECK_OK(gwp_tree_deserialize(text, &back));
  gwp_tree_info info;
  CHECK_OK(gwp_tree_info_get(back, &info));
  CHECK(info.depth == 5 && info.seed == 42);
  CHECK_OK(gwp_tree_deepen(back, 7));
  CHECK(gwp_tree_deepen(back, 7) == GWP_E_PRECONDITION);
  text[0] = 'x';
  gwp_tree* broken = NULL;
  CHECK(gwp_tree_deserialize(text, &broken) == GWP_E_PARSE);
  free(text);
  gwp_tree_free(back);
  CHECK(gwp_tree_load("/nonexistent/dir/tree.txt", &broken) == GWP_E_IO);

  double est = 0.0;
  CHECK_OK(gwp_tree_w_estimate(t, 0, 0, 5, &est));
  CHECK(est == 2.03125);
  gwp_tree_free(t);
  gwp_offspring_free(law);
}

static void percolation(void) {
  gwp_offspring* law = NULL;
  CHECK_OK(gwp_offspring_parse("det:2", &law));
  gwp_tree* t = NULL;
  CHECK_OK(gwp_tree_generate(law, 1, 2, &t));
  double q[3];
  CHECK_OK(gwp_survival_exact(t, 2, q));
  CHECK(q[1] == 0.75 && q[2] == 0.609375);
  double mom[9];
  int warn = 1;
  CHECK_OK(gwp_moments_exact(t, 2, 2, mom, &warn));
  CHECK(mom[1 * 3 + 2] == 0.25 && mom[2 * 3 + 2] == 0.5 && warn == 0);
  gwp_sandwich s;
  CHECK_OK(gwp_sandwich_check(t, 2, &s));
  CHECK(s.holds && s.upper == 4.0);

  double qm[3], se[3];
  CHECK_OK(gwp_survival_mc(t, 2, 100000, 3, 1, qm, se, NULL, NULL));
  CHECK(fabs(qm[2] - 39.0 / 64.0) < 4 * se[2]);

  uint64_t sizes[1000], attempts = 0;
  CHECK_OK(gwp_conditioned_sizes(t, 2, 1000, 3, 1, 0, sizes, &attempts));
  CHECK(attempts >= 1000);
  for (int i = 0; i < 1000; ++i) CHECK(sizes[i] >= 1 && sizes[i] <= 4);

  gwp_spread sp;
  CHECK_OK(gwp_spread_diagnostics(t, 2, 1000, 3, 1, 0, &sp));
  CHECK(sp.m == 1 && sp.p_max <= 1.0 && !sp.low_confidence);

  uint64_t state = 1, size = 0;
  CHECK_OK(gwp_percolate_once(t, 2, &state, &size));
  CHECK(size <= 4);
  gwp_tree_free(t);
  gwp_offspring_free(law);
}

static void martingale_iic_annealed(void) {
  gwp_offspring* law = NULL;
  CHECK_OK(gwp_offspring_parse("det:2", &law));
  gwp_tree* t = NULL;
  CHECK_OK(gwp_tree_generate(law, 1, 1, &t));

  double vals[4];
  CHECK_OK(gwp_martingale_trace(t, 1, 2, vals));
  CHECK(fabs(vals[1]) < 1e-15);
  double mean[4], se[4], l2[4];
  gwp_fit fit;
  CHECK_OK(gwp_increment_study(law, 2, 4, 100, 1, 1, mean, se, l2, &fit));
  CHECK(!fit.has_fit);
  CHECK(gwp_increment_study(law, 2, 4, 10, 1, 1, mean, se, l2, &fit) == GWP_E_INVALID_ARGUMENT);

  const uint64_t shape[] = {0, 1, 2};
  double mg = 0.0;
  CHECK_OK(gwp_iic_marginal_exact(t, shape, 3, 1, 10, &mg));
  CHECK(fabs(mg - 0.5) < 1e-15);
  uint64_t state = 2, spine[9], c_n = 0;
  CHECK_OK(gwp_iic_sample(t, 8, 10, 0, &state, spine, &c_n));
  CHECK(c_n >= 1);
  double* scaled = malloc(sizeof(double) * 1000);
  uint64_t min_c = 0;
  CHECK_OK(gwp_iic_experiment(t, 8, 1000, 3, 10, 1, scaled, &min_c));
  CHECK(min_c >= 1);
  double probs[2];
  size_t len = 0;
  CHECK_OK(gwp_iic_branch_transitions(t, 10, probs, 2, &len));
  CHECK(len == 2 && probs[0] == 0.5);

  double q[3];
  CHECK_OK(gwp_annealed_survival(law, 2, q));
  CHECK(q[2] == 0.609375);
  uint64_t attempts = 0;
  CHECK_OK(gwp_annealed_yaglom(law, 8, 1000, 4, 1, scaled, &attempts));
  CHECK(attempts >= 1000);
  CHECK_OK(gwp_annealed_iic(law, 8, 1000, 4, 10, 1, scaled, &min_c));
  CHECK(min_c >= 1);
  free(scaled);
  gwp_tree_free(t);
  gwp_offspring_free(law);
}

static void statistics(void) {
  double g = 0.0;
  CHECK_OK(gwp_cdf_eval(GWP_CDF_GAMMA2, 4.0, 0.5, &g));
  CHECK(fabs(g - (1.0 - 3.0 * exp(-2.0))) < 1e-14);
  CHECK(gwp_cdf_eval(GWP_CDF_EXP, 0.0, 1.0, &g) == GWP_E_INVALID_ARGUMENT);
  const double x[] = {log(2.0)};
  double d = 0.0;
  CHECK_OK(gwp_ks_distance(x, 1, GWP_CDF_EXP, 1.0, &d));
  CHECK(fabs(d - 0.5) < 1e-12);
  CHECK(gwp_ks_distance(x, 0, GWP_CDF_EXP, 1.0, &d) == GWP_E_INVALID_ARGUMENT);
  const double a[] = {1, 2, 3, 4};
  double mean = 0, var = 0, se = 0;
  CHECK_OK(gwp_summary(a, 4, &mean, &var, &se));
  CHECK(mean == 2.5);
  const double xs[] = {0, 1, 2}, ys[] = {1, exp(-1.0), exp(-2.0)};
  gwp_fit fit;
  CHECK_OK(gwp_decay_fit(xs, ys, 3, &fit));
  CHECK(fabs(fit.slope + 1.0) < 1e-12 && fit.has_fit);
}

static void on_result(const gwp_criterion* r, void* user) {
  int* seen = user;
  ++*seen;
  CHECK(r->id == 1);
  CHECK(r->name != NULL && r->detail != NULL);
}

static void acceptance(void) {
  int seen = 0, pass = 0;
  CHECK_OK(gwp_verify_one(1, GWP_BUDGET_SMOKE, 1, on_result, &seen, &pass));
  CHECK(seen == 1 && pass == 1);
  CHECK(gwp_verify_one(11, GWP_BUDGET_SMOKE, 1, NULL, NULL, &pass) == GWP_E_INVALID_ARGUMENT);
}

int main(void) {
  CHECK(strlen(gwp_version()) > 0);
  offspring();
  trees();
  percolation();
  martingale_iic_annealed();
  statistics();
  acceptance();
  if (failures) {
    fprintf(stderr, "%d check(s) failed\n", failures);
    return 1;
  }
  printf("C API: all checks passed\n");
  return 0;
}
