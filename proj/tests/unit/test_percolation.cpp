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


#include <doctest.h>

#include <cmath>
#include <map>

#include "error.hpp"
#include "helpers.hpp"
#include "oracle.hpp"
#include "percolation.hpp"

using namespace gwperc;

namespace {

GWTree binary(int depth) { return GWTree::generate(OffspringSpec::parse("det:2"), 1, depth); }

// Small random trees with at most `max_edges` edges to depth n.
std::vector<GWTree> small_trees(std::uint64_t seed, int count, int n, std::uint64_t max_edges) {
  std::vector<GWTree> out;
  SplitMix64 rng(seed);
  while (static_cast<int>(out.size()) < count) {
    auto t = GWTree::generate(testing::random_law(rng), rng(), n);
    if (oracle::edge_count(t, n) <= max_edges) out.push_back(std::move(t));
  }
  return out;
}

}  // namespace

TEST_SUITE("percolation") {
  TEST_CASE("binary tree survival") {
    const auto q = survival_exact(binary(2), 2).q;
    CHECK(q[0] == 1.0);
    CHECK(q[1] == 0.75);
    CHECK(q[2] == 0.609375);
    CHECK_THROWS_AS(survival_exact(binary(2), 3), Error);
  }

  TEST_CASE("binary tree sandwich") {
    const auto t = binary(2);
    const auto curve = survival_exact(t, 2);
    const auto mom = factorial_moments_exact(t, 2, 2);
    const auto b2 = sandwich_check(t, 2, curve, mom);
    CHECK(b2.upper == 4.0);
    CHECK(b2.value == doctest::Approx(2 * 39.0 / 64.0).epsilon(1e-15));
    const auto b1 = sandwich_check(t, 1, curve, mom);
    CHECK(b1.lower == doctest::Approx(1.0 / 1.5).epsilon(1e-15));
    const auto b0 = sandwich_check(t, 0, curve, mom);
    CHECK(b0.value == 0.0);
    CHECK(b0.holds());
    SandwichBounds broken{2.0, 1.0, 3.0};
    CHECK_FALSE(broken.holds());
  }

  TEST_CASE("binary tree factorial moments") {
    const auto m = factorial_moments_exact(binary(2), 2, 3);
    CHECK(m.at(1, 1) == 1.0);
    CHECK(m.at(2, 1) == 1.0);
    CHECK(m.at(1, 2) == 0.25);
    CHECK(m.at(2, 2) == 0.5);
    CHECK(m.at(0, 0) == 1.0);
    CHECK(m.at(0, 1) == 1.0);
    CHECK(m.at(0, 2) == 0.0);
    CHECK_FALSE(m.precision_warning);
    CHECK(factorial_moments_exact(binary(2), 2, 7).precision_warning);
    CHECK_THROWS_AS(factorial_moments_exact(binary(2), 2, 17), Error);
    CHECK_THROWS_AS(m.at(3, 1), Error);
  }

  TEST_CASE("first factorial moment is W_n") {
    const auto t = GWTree::generate(OffspringSpec::parse("unif:1:3"), 42, 6);
    const auto m = factorial_moments_exact(t, 6, 2);
    for (int n = 0; n <= 6; ++n) CHECK(m.at(n, 1) == doctest::Approx(t.w(n)).epsilon(1e-13));
  }

  TEST_CASE("regular trees at large depth") {
    const auto t = binary(2000);
    const auto q = survival_exact(t, 2000).q;
    CHECK(2000 * q[2000] / 4.0 == doctest::Approx(1.0).epsilon(0.01));
    CHECK(t.w(2000) == 1.0);
  }

  TEST_CASE("one run on one level of the binary tree") {
    const auto t = binary(1);
    std::map<std::size_t, int> freq;
    SplitMix64 rng(3);
    const int reps = 200000;
    for (int i = 0; i < reps; ++i) ++freq[percolate_once(t, 1, rng).size()];
    const double expect[] = {0.25, 0.5, 0.25};
    for (int s = 0; s <= 2; ++s) {
      const double f = double(freq[s]) / reps;
      CHECK(testing::within_se(f, expect[s], std::sqrt(expect[s] * (1 - expect[s]) / reps), 4.0));
    }
    SplitMix64 a(8), b(8);
    CHECK(percolate_once(t, 1, a).y_n == percolate_once(t, 1, b).y_n);
  }

  TEST_CASE("Monte Carlo survival on the binary tree") {
    const auto e = survival_mc(binary(2), 2, 1'000'000, 17, 1);
    CHECK(testing::within_se(e.q(2), 39.0 / 64.0, e.std_error(2), 3.0));
    CHECK(e.q(0) == 1.0);
    CHECK(e.replicates == 1'000'000);
  }

  TEST_CASE("property: exact survival agrees with simulation") {
    const auto trees = small_trees(404, 10, 8, ~0ULL);
    for (const auto& t : trees) {
      const auto q = survival_exact(t, 8).q;
      const auto e = survival_mc(t, 8, 100'000, t.seed());
      for (int n = 1; n <= 8; ++n) {
        const double se = std::sqrt(q[n] * (1 - q[n]) / 1e5);
        CHECK(testing::within_se(e.q(n), q[n], se, 4.0));
      }
    }
  }

  TEST_CASE("property: dynamic programs agree with enumeration") {
    const auto trees = small_trees(505, 25, 3, 18);
    for (const auto& t : trees) {
      const int n = 3;
      const auto q = survival_exact(t, n).q;
      const auto qb = oracle::brute_force_survival(t, n);
      const auto m = factorial_moments_exact(t, n, 4);
      const auto mb = oracle::brute_force_moments(t, n, 4);
      for (int j = 0; j <= n; ++j) {
        CHECK(std::abs(q[j] - qb[j]) <= 1e-12);
        for (int i = 0; i <= 4; ++i) CHECK(std::abs(m.at(j, i) - mb.at(j, i)) <= 1e-12);
      }
    }
  }

  TEST_CASE("property: survival decreases and the sandwich holds at every depth") {
    SplitMix64 rng(606);
    for (int i = 0; i < 20; ++i) {
      const auto t = GWTree::generate(testing::random_law(rng), rng(), 12);
      const auto curve = survival_exact(t, 12);
      const auto mom = factorial_moments_exact(t, 12, 2);
      for (int n = 0; n <= 12; ++n) {
        if (n > 0) CHECK(curve.q[n] <= curve.q[n - 1]);
        CHECK(curve.q[n] >= 0.0);
        CHECK(curve.q[n] <= 1.0);
        CHECK_NOTHROW(sandwich_check(t, n, curve, mom));
      }
    }
  }

  TEST_CASE("conditioned sizes on one level of the binary tree") {
    const auto t = binary(1);
    const auto c = conditioned_sizes(t, 1, 100'000, 21, 1);
    REQUIRE(c.sizes.size() == 100'000);
    double ones = 0;
    for (auto s : c.sizes) {
      CHECK(s >= 1);
      ones += s == 1;
    }
    const double f = ones / 1e5;
    CHECK(testing::within_se(f, 2.0 / 3.0, std::sqrt(2.0 / 9.0 / 1e5), 4.0));
    const double rate = c.acceptance_rate();
    CHECK(testing::within_se(rate, 0.75, std::sqrt(0.75 * 0.25 / c.attempts), 3.0));
  }

  TEST_CASE("conditioned sizes refuse hopeless conditioning") {
    // q_n ~ 4/n on the binary tree
    const auto t = binary(5'000'000);
    try {
      conditioned_sizes(t, 5'000'000, 10, 1);
      FAIL("guard did not fire");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::precondition);
    }
    try {
      conditioned_sizes(binary(30), 30, 1000, 1, 1, 50);
      FAIL("attempt cap not enforced");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::budget);
    }
  }

  TEST_CASE("Monte Carlo output does not depend on the thread count") {
    const auto t = GWTree::generate(OffspringSpec::parse("unif:1:3"), 5, 4);
    const auto a = survival_mc(t, 20, 20'000, 9, 1);
    const auto b = survival_mc(t, 20, 20'000, 9, 3);
    CHECK(a.survived == b.survived);
    CHECK(a.size_sq_sum == b.size_sq_sum);
    const auto c1 = conditioned_sizes(t, 20, 500, 9, 1);
    const auto c3 = conditioned_sizes(t, 20, 500, 9, 3);
    CHECK(c1.sizes == c3.sizes);
    CHECK(c1.attempts == c3.attempts);
    const auto s1 = spread_diagnostics(t, 20, 500, 9, 1);
    const auto s3 = spread_diagnostics(t, 20, 500, 9, 3);
    CHECK(s1.p_multi == s3.p_multi);
    CHECK(s1.frequency_sum == s3.frequency_sum);
  }

  TEST_CASE("spread on one level of the binary tree") {
    CHECK(spread_depth(1, 2.0) == 1);
    CHECK(spread_depth(256, 2.0) == 2);
    CHECK(spread_depth(1 << 20, 2.0) == 5);
    const auto s = spread_diagnostics(binary(1), 1, 100'000, 4, 1);
    CHECK(testing::within_se(s.p_multi, 1.0 / 3.0, std::sqrt(2.0 / 9.0 / 1e5), 4.0));
    // P[v in Y_1 | survival] = (1/2) / (3/4)
    CHECK(s.p_max == doctest::Approx(2.0 / 3.0).epsilon(0.01));
    CHECK(s.p_max <= 1.0);
    CHECK_FALSE(s.low_confidence);
    CHECK(spread_diagnostics(binary(1), 1, 50, 4, 1).low_confidence);
  }

  TEST_CASE("spread frequencies sum to the mean cluster size") {
    const auto t = GWTree::generate(OffspringSpec::parse("unif:1:3"), 2, 4);
    const auto s = spread_diagnostics(t, 16, 2000, 3);
    CHECK(std::abs(s.frequency_sum - s.mean_size) <= 1e-9 * s.mean_size);
    CHECK(s.p_max_empirical <= 1.0);
    CHECK(s.p_multi >= 0.0);
    CHECK(s.p_multi <= 1.0);
  }
}
