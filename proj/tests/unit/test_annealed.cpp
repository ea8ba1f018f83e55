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

#include "annealed.hpp"
#include "error.hpp"
#include "helpers.hpp"
#include "percolation.hpp"
#include "stats.hpp"

using namespace gwperc;

TEST_SUITE("annealed") {
  TEST_CASE("binary tree") {
    const auto q = annealed_survival_exact(OffspringSpec::parse("det:2"), 2);
    CHECK(q[0] == 1.0);
    CHECK(q[1] == 0.75);
    CHECK(q[2] == 0.609375);
  }

  TEST_CASE("Kolmogorov asymptotics") {
    const int n = 10000;
    for (const char* s : {"det:2", "unif:1:3"}) {
      const auto spec = OffspringSpec::parse(s);
      const auto q = annealed_survival_exact(spec, n);
      CHECK(n * q[n] / derive_params(spec).lambda == doctest::Approx(1.0).epsilon(0.02));
      for (int j = 1; j <= n; ++j) CHECK(q[j] < q[j - 1]);
    }
    CHECK_THROWS_AS(annealed_survival_exact(OffspringSpec::parse("det:2"), 0), Error);
  }

  TEST_CASE("regular trees: annealed equals quenched") {
    const auto spec = OffspringSpec::parse("det:3");
    const auto qa = annealed_survival_exact(spec, 300);
    const auto qq = survival_exact(GWTree::generate(spec, 1, 300), 300).q;
    for (int n = 0; n <= 300; ++n) CHECK(std::abs(qa[n] - qq[n]) <= 1e-15);
  }

  TEST_CASE("conditioned population") {
    const auto spec = OffspringSpec::parse("unif:1:3");
    const int n = 16;
    const double qn = annealed_survival_exact(spec, n)[n];
    // acceptance rate against q~_n: z-scores over 20 seeds
    double z_sum = 0.0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
      const auto r = annealed_yaglom(spec, n, 1000, seed, 1);
      const double z = (r.acceptance_rate() - qn) / std::sqrt(qn * (1 - qn) / r.attempts);
      CHECK(std::abs(z) <= 4.0);
      z_sum += z;
    }
    CHECK(std::abs(z_sum / 20) <= 3.0 / std::sqrt(20.0));

    const auto y = annealed_yaglom(spec, n, 3000, 7, 1);
    REQUIRE(y.scaled.size() == 3000);
    // E[Z_n | Z_n > 0] = 1 / q_n for a critical process
    const auto sum = summarize(y.scaled);
    CHECK(testing::within_se(sum.mean, 1.0 / (n * qn), sum.std_error, 4.0));
    for (double x : y.scaled) CHECK(x >= 1.0 / n);
    CHECK(annealed_yaglom(spec, n, 1000, 7, 3).scaled == annealed_yaglom(spec, n, 1000, 7, 1).scaled);
    CHECK_THROWS_AS(annealed_yaglom(spec, n, 999, 7), Error);
    CHECK_THROWS_AS(annealed_yaglom(spec, 40, 1000, 7, 1, 100), Error);
  }

  TEST_CASE("annealed IIC on the binary tree") {
    const int n = 32;
    const auto e = annealed_iic_sizes(OffspringSpec::parse("det:2"), n, 3000, 9);
    const auto sum = summarize(e.scaled);
    CHECK(testing::within_se(sum.mean, 0.5 + 1.0 / n, sum.std_error, 4.0));
    CHECK(e.min_c_n >= 1);
  }

  TEST_CASE("annealed IIC on random trees") {
    const auto e = annealed_iic_sizes(OffspringSpec::parse("unif:1:3"), 24, 1000, 9, 8, 1);
    CHECK(e.scaled.size() == 1000);
    CHECK(e.min_c_n >= 1);
    CHECK(e.scaled == annealed_iic_sizes(OffspringSpec::parse("unif:1:3"), 24, 1000, 9, 8, 3).scaled);
  }
}
