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


#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "gwperc/gwperc.h"

using json = nlohmann::ordered_json;

namespace {

constexpr int kExitCriterion = 1;
constexpr int kExitUsage = 2;
constexpr int kExitPrecondition = 3;

struct Failure {
  std::string message;
};

// Flag combinations CLI11 cannot express; reported like parse errors.
struct Usage {
  std::string message;
};

void check(gwp_status s) {
  if (s != GWP_OK) throw Failure{std::string(gwp_status_name(s)) + ": " + gwp_last_error()};
}

struct LawDeleter {
  void operator()(gwp_offspring* p) const { gwp_offspring_free(p); }
};
struct TreeDeleter {
  void operator()(gwp_tree* p) const { gwp_tree_free(p); }
};
using Law = std::unique_ptr<gwp_offspring, LawDeleter>;
using Tree = std::unique_ptr<gwp_tree, TreeDeleter>;

Law parse_law(const std::string& spec) {
  gwp_offspring* p = nullptr;
  check(gwp_offspring_parse(spec.c_str(), &p));
  return Law(p);
}

gwp_params params_of(const gwp_offspring* law) {
  gwp_params p{};
  check(gwp_offspring_params(law, 4, &p, nullptr, nullptr));
  return p;
}

std::string tree_spec(const gwp_tree* t) {
  size_t need = 0;
  check(gwp_tree_spec(t, nullptr, 0, &need));
  std::string s(need, '\0');
  check(gwp_tree_spec(t, s.data(), s.size(), nullptr));
  s.pop_back();
  return s;
}

gwp_tree_info info_of(const gwp_tree* t) {
  gwp_tree_info i{};
  check(gwp_tree_info_get(t, &i));
  return i;
}

// Options shared by every command that runs on one fixed tree.
struct TreeSource {
  std::string file;
  std::string dist;
  std::uint64_t tree_seed = 1;

  void add(CLI::App* app) {
    auto* f = app->add_option("--tree", file, "tree file written by gen-tree");
    auto* d = app->add_option("--dist", dist, "offspring law; the tree is generated from --tree-seed");
    f->excludes(d);
    app->add_option("--tree-seed", tree_seed, "tree seed with --dist")->capture_default_str();
  }

  Tree open(int depth) const {
    gwp_tree* t = nullptr;
    if (!file.empty()) {
      check(gwp_tree_load(file.c_str(), &t));
    } else {
      if (dist.empty()) throw Usage{"one of --tree or --dist is required"};
      const Law law = parse_law(dist);
      check(gwp_tree_generate(law.get(), tree_seed, depth, &t));
    }
    return Tree(t);
  }
};

struct Output {
  std::string json_path;
  std::string csv_path;
  int threads = 0;

  void add(CLI::App* app) {
    app->add_option("--json", json_path, "write machine-readable results to this file");
    app->add_option("--csv", csv_path, "write the main table as CSV to this file");
    app->add_option("--threads", threads, "worker threads (0: all cores)")->capture_default_str();
  }
};

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  void print(std::ostream& os) const {
    for (const auto& h : header) os << std::setw(16) << h;
    os << '\n';
    char buf[64];
    for (const auto& r : rows) {
      for (double v : r) {
        if (v == std::floor(v) && std::abs(v) < 1e15)
          std::snprintf(buf, sizeof buf, "%.0f", v);
        else
          std::snprintf(buf, sizeof buf, "%.10g", v);
        os << std::setw(16) << buf;
      }
      os << '\n';
    }
  }

  void write_csv(const std::string& path) const {
    std::ofstream os(path);
    if (!os) throw Failure{"cannot write " + path};
    for (std::size_t i = 0; i < header.size(); ++i) os << (i ? "," : "") << header[i];
    os << '\n';
    char buf[64];
    for (const auto& r : rows) {
      for (std::size_t i = 0; i < r.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g", r[i]);
        os << (i ? "," : "") << buf;
      }
      os << '\n';
    }
  }

  json to_json() const {
    json rows_j = json::array();
    for (const auto& r : rows) {
      json o;
      for (std::size_t i = 0; i < header.size(); ++i) {
        if (r[i] == std::floor(r[i]) && std::abs(r[i]) < 9e15)
          o[header[i]] = static_cast<std::int64_t>(r[i]);
        else
          o[header[i]] = r[i];
      }
      rows_j.push_back(o);
    }
    return rows_j;
  }
};

class Run {
 public:
  Run(std::string command, const Output& out) : out_(out) {
    doc_["artifact"] = "gwperc";
    doc_["version"] = gwp_version();
    doc_["command"] = std::move(command);
    start_ = std::chrono::steady_clock::now();
  }

  json& operator[](const char* key) { return doc_[key]; }

  void finish(const Table* table) {
    doc_["wall_time_s"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    if (table) {
      doc_["table"] = table->to_json();
      if (!out_.csv_path.empty()) table->write_csv(out_.csv_path);
    }
    if (!out_.json_path.empty()) {
      std::ofstream os(out_.json_path);
      if (!os) throw Failure{"cannot write " + out_.json_path};
      os << doc_.dump(2) << '\n';
    }
  }

 private:
  json doc_;
  const Output& out_;
  std::chrono::steady_clock::time_point start_;
};

void print_fit_line(const char* label, double ks, double mean, double target_mean) {
  std::printf("%s KS distance %.5f, sample mean %.5f (target %.5f)\n", label, ks, mean, target_mean);
}

json sample_summary(const std::vector<double>& x, gwp_cdf cdf, double lambda) {
  double mean = 0, var = 0, se = 0, ks = 0;
  check(gwp_summary(x.data(), x.size(), &mean, &var, &se));
  check(gwp_ks_distance(x.data(), x.size(), cdf, lambda, &ks));
  return json{{"count", x.size()}, {"mean", mean}, {"variance", var}, {"std_error", se}, {"ks", ks}};
}

// ---- commands ----

struct GenTree {
  std::string dist, out;
  std::uint64_t seed = 1;
  int depth = 0;
  Output o;

  void add(CLI::App& app) {
    auto* c = app.add_subcommand("gen-tree", "generate a tree and write it to a file");
    c->add_option("--dist", dist, "offspring law")->required();
    c->add_option("--seed", seed, "tree seed")->capture_default_str();
    c->add_option("--depth", depth, "depth")->required();
    c->add_option("--out", out, "output file")->required();
    o.add(c);
    c->callback([this] { run(); });
  }

  void run() {
    Run r("gen-tree", o);
    const Law law = parse_law(dist);
    gwp_tree* raw = nullptr;
    check(gwp_tree_generate(law.get(), seed, depth, &raw));
    const Tree t(raw);
    check(gwp_tree_save(t.get(), out.c_str()));
    const auto i = info_of(t.get());
    double z = 0, w = 0;
    check(gwp_tree_z(t.get(), depth, &z));
    check(gwp_tree_w(t.get(), depth, &w));
    std::printf("wrote %s: %s seed %llu depth %d, Z_n = %.0f, W_n = %.10g, w_bar = %.10g\n", out.c_str(),
                tree_spec(t.get()).c_str(), static_cast<unsigned long long>(seed), depth, z, w, i.w_bar);
    r["spec"] = tree_spec(t.get());
    r["seeds"] = json{{"tree", seed}};
    r["parameters"] = json{{"depth", depth}, {"out", out}};
    r["results"] = json{{"z_n", z}, {"w_n", w}, {"w_bar", i.w_bar}};
    r.finish(nullptr);
  }
};

struct Survival {
  TreeSource src;
  int depth = 0;
  bool exact = false;
  std::uint64_t mc = 0, seed = 1;
  int arena = 20;
  Output o;

  void add(CLI::App& app) {
    auto* c = app.add_subcommand("survival", "survival probabilities q_n per depth");
    src.add(c);
    c->add_option("--depth", depth, "largest depth n")->required();
    auto* e = c->add_flag("--exact", exact, "exact bottom-up computation");
    auto* m = c->add_option("--mc", mc, "Monte Carlo with this many runs");
    e->excludes(m);
    c->add_option("--seed", seed, "percolation seed for --mc")->capture_default_str();
    c->add_option("--arena", arena, "with --dist and --mc, levels materialized for W_n")->capture_default_str();
    o.add(c);
    c->callback([this] { run(); });
  }

  void run() {
    if (!exact && mc == 0) exact = true;
    Run r("survival", o);
    const Tree t = src.open(exact ? depth : std::min(depth, arena));
    const auto info = info_of(t.get());
    const std::string spec = tree_spec(t.get());
    const Law law = parse_law(spec);
    const double lambda = params_of(law.get()).lambda;

    std::vector<double> q(depth + 1), se(depth + 1, 0.0);
    if (exact)
      check(gwp_survival_exact(t.get(), depth, q.data()));
    else
      check(gwp_survival_mc(t.get(), depth, mc, seed, o.threads, q.data(), se.data(), nullptr, nullptr));

    Table tab;
    tab.header = {"n", "q_n", "n*q_n", "lambda*W_n"};
    if (!exact) tab.header.push_back("std_error");
    for (int n = 0; n <= depth; ++n) {
      double w = 0;
      check(gwp_tree_w(t.get(), std::min(n, info.depth), &w));
      std::vector<double> row{double(n), q[n], n * q[n], lambda * w};
      if (!exact) row.push_back(se[n]);
      tab.rows.push_back(row);
    }
    if (!exact && depth > info.depth)
      std::printf("# W_n beyond depth %d is read at depth %d\n", info.depth, info.depth);
    tab.print(std::cout);
    r["spec"] = spec;
    r["seeds"] = json{{"tree", info.seed}, {"percolation", exact ? json(nullptr) : json(seed)}};
    r["parameters"] = json{{"depth", depth}, {"method", exact ? "exact" : "mc"}, {"replicates", mc},
                           {"lambda", lambda}, {"tree_depth", info.depth}};
    r.finish(&tab);
  }
};

struct Moments {
  TreeSource src;
  int depth = 0, k = 2;
  Output o;

  void add(CLI::App& app) {
    auto* c = app.add_subcommand("moments", "exact factorial moments and the martingale trace M_n^(k)");
    src.add(c);
    c->add_option("--depth", depth, "largest depth n")->required();
    c->add_option("--k", k, "largest order")->capture_default_str();
    o.add(c);
    c->callback([this] { run(); });
  }

  void run() {
    Run r("moments", o);
    const Tree t = src.open(depth);
    std::vector<double> v(static_cast<std::size_t>(depth + 1) * (k + 1));
    int warn = 0;
    check(gwp_moments_exact(t.get(), depth, k, v.data(), &warn));
    std::vector<double> trace(depth + 1);
    check(gwp_martingale_trace(t.get(), depth, k, trace.data()));
    Table tab;
    tab.header.push_back("n");
    for (int i = 0; i <= k; ++i) tab.header.push_back("E_binom_" + std::to_string(i));
    tab.header.push_back("M_n^(" + std::to_string(k) + ")");
    for (int n = 0; n <= depth; ++n) {
      std::vector<double> row{double(n)};
      for (int i = 0; i <= k; ++i) row.push_back(v[n * (k + 1) + i]);
      row.push_back(trace[n]);
      tab.rows.push_back(row);
    }
    if (warn) std::printf("# warning: orders above 6 lose relative precision\n");
    tab.print(std::cout);
    const auto info = info_of(t.get());
    r["spec"] = tree_spec(t.get());
    r["seeds"] = json{{"tree", info.seed}};
    r["parameters"] = json{{"depth", depth}, {"k", k}};
    r["results"] = json{{"precision_warning", warn != 0}};
    r.finish(&tab);
  }
};

struct MartingaleDecay {
  std::string dist;
  int k = 2, nmax = 12;
  std::uint64_t trees = 10000, seed = 1;
  Output o;

  void add(CLI::App& app) {
    auto* c = app.add_subcommand("martingale-decay", "martingale increments over independent trees");
    c->add_option("--dist", dist, "offspring law")->required();
    c->add_option("--k", k, "order")->capture_default_str();
    c->add_option("--nmax", nmax, "largest depth")->capture_default_str();
    c->add_option("--trees", trees, "number of trees")->capture_default_str();
    c->add_option("--seed", seed, "seed of the tree family")->capture_default_str();
    o.add(c);
    c->callback([this] { run(); });
  }

  void run() {
    Run r("martingale-decay", o);
    const Law law = parse_law(dist);
    std::vector<double> mean(nmax), se(nmax), l2(nmax);
    gwp_fit fit{};
    check(gwp_increment_study(law.get(), k, nmax, trees, seed, o.threads, mean.data(), se.data(), l2.data(), &fit));
    Table tab;
    tab.header = {"n", "mean_increment", "std_error", "z", "l2"};
    for (int n = 0; n < nmax; ++n)
      tab.rows.push_back({double(n), mean[n], se[n], se[n] > 0 ? mean[n] / se[n] : 0.0, l2[n]});
    tab.print(std::cout);
    if (fit.has_fit)
      std::printf("log-L2 slope %.6f (intercept %.4f, rms residual %.4f) over n >= 3\n", fit.slope, fit.intercept,
                  fit.residual);
    else
      std::printf("increments vanish; no decay fit\n");
    r["spec"] = dist;
    r["seeds"] = json{{"trees", seed}};
    r["parameters"] = json{{"k", k}, {"nmax", nmax}, {"trees", trees}};
    r["results"] = fit.has_fit ? json{{"slope", fit.slope}, {"intercept", fit.intercept}, {"residual", fit.residual}}
                               : json{{"slope", nullptr}};
    r.finish(&tab);
  }
};

struct Yaglom {
  TreeSource src;
  int depth = 0;
  std::uint64_t accepted = 5000, seed = 1;
  Output o;

  void add(CLI::App& app) {
    auto* c = app.add_subcommand("yaglom", "|Y_n|/n given survival on a fixed tree, against Exp(mean 1/lambda)");
    src.add(c);
    c->add_option("--depth", depth, "depth n")->required();
    c->add_option("--accepted", accepted, "accepted samples")->capture_default_str();
    c->add_option("--seed", seed, "percolation seed")->capture_default_str();
    o.add(c);
    c->callback([this] { run(); });
  }

  void run() {
    Run r("yaglom", o);
    const Tree t = src.open(0);
    const std::string spec = tree_spec(t.get());
    const double lambda = params_of(parse_law(spec).get()).lambda;
    std::vector<std::uint64_t> sizes(accepted);
    std::uint64_t attempts = 0;
    check(gwp_conditioned_sizes(t.get(), depth, accepted, seed, o.threads, 0, sizes.data(), &attempts));
    std::vector<double> x(sizes.size());
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = static_cast<double>(sizes[i]) / depth;
    const json s = sample_summary(x, GWP_CDF_EXP, lambda);
    std::printf("acceptance rate %.6f (%llu attempts)\n", double(accepted) / attempts,
                static_cast<unsigned long long>(attempts));
    print_fit_line("Exp(mean 1/lambda):", s["ks"], s["mean"], 1.0 / lambda);
    Table tab;
    tab.header = {"index", "size", "size_over_n"};
    for (std::size_t i = 0; i < x.size(); ++i) tab.rows.push_back({double(i), double(sizes[i]), x[i]});
    r["spec"] = spec;
    r["seeds"] = json{{"tree", info_of(t.get()).seed}, {"percolation", seed}};
    r["parameters"] = json{{"depth", depth}, {"accepted", accepted}, {"lambda", lambda}};
    r["results"] = json{{"attempts", attempts}, {"acceptance_rate", double(accepted) / attempts}, {"summary", s}};
    r.finish(&tab);
  }
};

std::vector<int> parse_lookaheads(const std::string& s) {
  std::vector<int> out;
  if (s == "none" || s.empty()) return out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(std::stoi(item));
  return out;
}

struct IIC {
  TreeSource src;
  int depth = 0, lookahead = 20;
  std::uint64_t reps = 5000, seed = 1;
  std::string sensitivity = "10,20";
  Output o;

  void add(CLI::App& app) {
    auto* c = app.add_subcommand("iic", "IIC cluster size C_n/n on a fixed tree, against Gamma(2, lambda)");
    src.add(c);
    c->add_option("--depth", depth, "depth n")->required();
    c->add_option("--reps", reps, "IIC samples")->capture_default_str();
    c->add_option("--lookahead", lookahead, "lookahead m of the W estimates")->capture_default_str();
    c->add_option("--seed", seed, "sampling seed")->capture_default_str();
    c->add_option("--sensitivity", sensitivity, "lookaheads for the transition sensitivity report, or none")
        ->capture_default_str();
    o.add(c);
    c->callback([this] { run(); });
  }

  void run() {
    Run r("iic", o);
    const Tree t = src.open(0);
    const std::string spec = tree_spec(t.get());
    const double lambda = params_of(parse_law(spec).get()).lambda;
    std::vector<double> x(reps);
    std::uint64_t min_c = 0;
    check(gwp_iic_experiment(t.get(), depth, reps, seed, lookahead, o.threads, x.data(), &min_c));
    const json s = sample_summary(x, GWP_CDF_GAMMA2, lambda);
    print_fit_line("Gamma(2, lambda):", s["ks"], s["mean"], 2.0 / lambda);
    std::printf("min c_n = %llu\n", static_cast<unsigned long long>(min_c));
    json sens = json::array();
    for (int m : parse_lookaheads(sensitivity)) {
      size_t len = 0;
      check(gwp_iic_branch_transitions(t.get(), m, nullptr, 0, &len));
      std::vector<double> p(len);
      check(gwp_iic_branch_transitions(t.get(), m, p.data(), p.size(), &len));
      std::printf("first branching spine step, lookahead %d:", m);
      for (double v : p) std::printf(" %.6f", v);
      std::printf("\n");
      sens.push_back(json{{"lookahead", m}, {"transitions", p}});
    }
    Table tab;
    tab.header = {"index", "c_n_over_n"};
    for (std::size_t i = 0; i < x.size(); ++i) tab.rows.push_back({double(i), x[i]});
    r["spec"] = spec;
    r["seeds"] = json{{"tree", info_of(t.get()).seed}, {"iic", seed}};
    r["parameters"] = json{{"depth", depth}, {"reps", reps}, {"lookahead", lookahead}, {"lambda", lambda}};
    r["results"] = json{{"min_c_n", min_c}, {"summary", s}, {"sensitivity", sens}};
    r.finish(&tab);
  }
};

struct Annealed {
  std::string dist;
  int depth = 0, lookahead = 10, every = 1;
  std::uint64_t accepted = 5000, reps = 5000, seed = 1;
  Output o;

  void add(CLI::App& app) {
    auto* a = app.add_subcommand("annealed", "annealed counterparts: survival, yaglom, iic");
    a->require_subcommand(1);
    auto* s = a->add_subcommand("survival", "exact pgf iteration of q~_n");
    s->add_option("--dist", dist, "offspring law")->required();
    s->add_option("--depth", depth, "largest depth")->required();
    s->add_option("--every", every, "print every k-th depth")->capture_default_str();
    o.add(s);
    s->callback([this] { survival(); });

    auto* y = a->add_subcommand("yaglom", "Z~_n/n given survival, against Exp(mean 1/lambda)");
    y->add_option("--dist", dist, "offspring law")->required();
    y->add_option("--depth", depth, "depth n")->required();
    y->add_option("--accepted", accepted, "accepted samples")->capture_default_str();
    y->add_option("--seed", seed, "seed")->capture_default_str();
    o.add(y);
    y->callback([this] { yaglom(); });

    auto* i = a->add_subcommand("iic", "IIC on a fresh tree per sample, against Gamma(2, lambda)");
    i->add_option("--dist", dist, "offspring law")->required();
    i->add_option("--depth", depth, "depth n")->required();
    i->add_option("--reps", reps, "samples")->capture_default_str();
    i->add_option("--lookahead", lookahead, "lookahead m")->capture_default_str();
    i->add_option("--seed", seed, "seed")->capture_default_str();
    o.add(i);
    i->callback([this] { iic(); });
  }

  void survival() {
    Run r("annealed survival", o);
    const Law law = parse_law(dist);
    const double lambda = params_of(law.get()).lambda;
    std::vector<double> q(depth + 1);
    check(gwp_annealed_survival(law.get(), depth, q.data()));
    Table tab;
    tab.header = {"n", "q_n", "n*q_n", "n*q_n/lambda"};
    for (int n = 0; n <= depth; ++n)
      if (n % std::max(1, every) == 0 || n == depth) tab.rows.push_back({double(n), q[n], n * q[n], n * q[n] / lambda});
    tab.print(std::cout);
    r["spec"] = dist;
    r["seeds"] = json::object();
    r["parameters"] = json{{"depth", depth}, {"lambda", lambda}};
    r.finish(&tab);
  }

  void yaglom() {
    Run r("annealed yaglom", o);
    const Law law = parse_law(dist);
    const double lambda = params_of(law.get()).lambda;
    std::vector<double> x(accepted);
    std::uint64_t attempts = 0;
    check(gwp_annealed_yaglom(law.get(), depth, accepted, seed, o.threads, x.data(), &attempts));
    const json s = sample_summary(x, GWP_CDF_EXP, lambda);
    std::printf("acceptance rate %.6f (%llu attempts)\n", double(accepted) / attempts,
                static_cast<unsigned long long>(attempts));
    print_fit_line("Exp(mean 1/lambda):", s["ks"], s["mean"], 1.0 / lambda);
    Table tab;
    tab.header = {"index", "size_over_n"};
    for (std::size_t i = 0; i < x.size(); ++i) tab.rows.push_back({double(i), x[i]});
    r["spec"] = dist;
    r["seeds"] = json{{"annealed", seed}};
    r["parameters"] = json{{"depth", depth}, {"accepted", accepted}, {"lambda", lambda}};
    r["results"] = json{{"attempts", attempts}, {"acceptance_rate", double(accepted) / attempts}, {"summary", s}};
    r.finish(&tab);
  }

  void iic() {
    Run r("annealed iic", o);
    const Law law = parse_law(dist);
    const double lambda = params_of(law.get()).lambda;
    std::vector<double> x(reps);
    std::uint64_t min_c = 0;
    check(gwp_annealed_iic(law.get(), depth, reps, seed, lookahead, o.threads, x.data(), &min_c));
    const json s = sample_summary(x, GWP_CDF_GAMMA2, lambda);
    print_fit_line("Gamma(2, lambda):", s["ks"], s["mean"], 2.0 / lambda);
    std::printf("min c_n = %llu\n", static_cast<unsigned long long>(min_c));
    Table tab;
    tab.header = {"index", "c_n_over_n"};
    for (std::size_t i = 0; i < x.size(); ++i) tab.rows.push_back({double(i), x[i]});
    r["spec"] = dist;
    r["seeds"] = json{{"annealed_iic", seed}};
    r["parameters"] = json{{"depth", depth}, {"reps", reps}, {"lookahead", lookahead}, {"lambda", lambda}};
    r["results"] = json{{"min_c_n", min_c}, {"summary", s}};
    r.finish(&tab);
  }
};

struct Spread {
  TreeSource src;
  int depth = 0, levels = 3;
  std::uint64_t reps = 2000, seed = 1;
  Output o;

  void add(CLI::App& app) {
    auto* c = app.add_subcommand("spread", "p_multi and p_max over a doubling sequence ending at --depth");
    src.add(c);
    c->add_option("--depth", depth, "largest depth n")->required();
    c->add_option("--levels", levels, "number of depths n, n/2, n/4, ...")->capture_default_str();
    c->add_option("--reps", reps, "accepted samples per depth")->capture_default_str();
    c->add_option("--seed", seed, "seed")->capture_default_str();
    o.add(c);
    c->callback([this] { run(); });
  }

  void run() {
    Run r("spread", o);
    const Tree t = src.open(0);
    std::vector<int> ns;
    for (int i = levels - 1; i >= 0; --i)
      if ((depth >> i) >= 1) ns.push_back(depth >> i);
    Table tab;
    tab.header = {"n", "m", "accepted", "attempts", "p_multi", "p_max", "p_max_empirical", "mean_size",
                  "low_confidence"};
    for (int n : ns) {
      gwp_spread d{};
      check(gwp_spread_diagnostics(t.get(), n, reps, seed + static_cast<std::uint64_t>(n), o.threads, 0, &d));
      tab.rows.push_back({double(d.n), double(d.m), double(d.accepted), double(d.attempts), d.p_multi, d.p_max,
                          d.p_max_empirical, d.mean_size, double(d.low_confidence)});
    }
    tab.print(std::cout);
    r["spec"] = tree_spec(t.get());
    r["seeds"] = json{{"tree", info_of(t.get()).seed}, {"spread", seed}};
    r["parameters"] = json{{"depth", depth}, {"levels", levels}, {"reps", reps}};
    r.finish(&tab);
  }
};

struct VerifyAll {
  std::string budget = "smoke";
  Output o;
  bool all_pass = false;

  void add(CLI::App& app) {
    auto* c = app.add_subcommand("verify-all", "run the acceptance suite");
    c->add_option("--budget", budget, "smoke or full")
        ->check(CLI::IsMember({"smoke", "full"}))
        ->capture_default_str();
    o.add(c);
    c->callback([this] { run(); });
  }

  static void on_result(const gwp_criterion* c, void* user) {
    auto* rows = static_cast<json*>(user);
    std::printf("[%s] %2d %-32s %8.1f s  %s\n", c->pass ? "PASS" : "FAIL", c->id, c->name, c->seconds, c->detail);
    std::fflush(stdout);
    json metrics = json::object();
    for (size_t i = 0; i < c->metric_count; ++i) metrics[c->metric_names[i]] = c->metric_values[i];
    rows->push_back(json{{"id", c->id}, {"name", c->name}, {"pass", c->pass != 0}, {"seconds", c->seconds},
                         {"limit_seconds", c->limit_seconds}, {"detail", c->detail}, {"metrics", metrics}});
  }

  void run() {
    Run r("verify-all", o);
    json rows = json::array();
    int pass = 0;
    check(gwp_verify_all(budget == "full" ? GWP_BUDGET_FULL : GWP_BUDGET_SMOKE, o.threads, on_result, &rows, &pass));
    all_pass = pass != 0;
    std::printf("%s\n", all_pass ? "all criteria passed" : "some criteria failed");
    r["parameters"] = json{{"budget", budget}};
    r["results"] = json{{"all_pass", all_pass}, {"criteria", rows}};
    r.finish(nullptr);
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gwperc: critical percolation on Galton-Watson trees"};
  app.set_version_flag("--version", gwp_version());
  app.require_subcommand(1);

  GenTree gen;
  Survival survival;
  Moments moments;
  MartingaleDecay decay;
  Yaglom yaglom;
  IIC iic;
  Annealed annealed;
  Spread spread;
  VerifyAll verify;
  gen.add(app);
  survival.add(app);
  moments.add(app);
  decay.add(app);
  yaglom.add(app);
  iic.add(app);
  annealed.add(app);
  spread.add(app);
  verify.add(app);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    std::cerr << app.help();
    return kExitUsage;
  } catch (const Usage& u) {
    std::cerr << "error: " << u.message << '\n';
    return kExitUsage;
  } catch (const Failure& f) {
    std::cerr << "error: " << f.message << '\n';
    return kExitPrecondition;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitPrecondition;
  }
  if (app.got_subcommand("verify-all") && !verify.all_pass) return kExitCriterion;
  return 0;
}
