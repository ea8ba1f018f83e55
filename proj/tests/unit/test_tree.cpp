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
#include <filesystem>
#include <string>

#include "error.hpp"
#include "helpers.hpp"
#include "stats.hpp"
#include "tree.hpp"

using namespace gwperc;

namespace {

ErrorKind kind_of_deserialize(const std::string& text) {
  try {
    GWTree::deserialize(text);
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("deserialize accepted corrupt input");
  return ErrorKind::internal;
}

}  // namespace

TEST_SUITE("tree") {
  TEST_CASE("regular binary tree") {
    const auto t = GWTree::generate(OffspringSpec::parse("det:2"), 1, 3);
    CHECK(t.z(3) == 8.0);
    CHECK(t.w(3) == 1.0);
    CHECK(t.w_bar() == 1.0);
    const auto deep = GWTree::generate(OffspringSpec::parse("det:2"), 1, 1000);
    CHECK(deep.w(1000) == doctest::Approx(1.0));
  }

  // Frozen from tests/oracles/tree_w5.py, an independent replay of the
  // key derivation.
  TEST_CASE("uniform tree, seed 42: level sizes match the reference replay") {
    const auto t = GWTree::generate(OffspringSpec::parse("unif:1:3"), 42, 5);
    const double expected[] = {1, 3, 6, 14, 32, 65};
    for (int n = 0; n <= 5; ++n) CHECK(t.z(n) == expected[n]);
    CHECK(t.w(5) == 2.03125);
  }

  TEST_CASE("same seed, same tree") {
    const auto spec = OffspringSpec::parse("unif:1:3");
    const auto a = GWTree::generate(spec, 9, 8);
    const auto b = GWTree::generate(spec, 9, 8);
    CHECK(a.serialize() == b.serialize());
    const auto c = GWTree::generate(spec, 10, 8);
    CHECK(a.serialize() != c.serialize());
  }

  TEST_CASE("deepen keeps the prefix and matches direct generation") {
    const auto spec = OffspringSpec::parse("unif:1:3");
    auto t = GWTree::generate(spec, 7, 3);
    const std::uint64_t size3 = t.arena_size();
    const auto keys2 = std::vector<VertexKey>(t.keys(2).begin(), t.keys(2).end());
    t.deepen(5);
    const auto direct = GWTree::generate(spec, 7, 5);
    CHECK(t.z(5) == direct.z(5));
    CHECK(t.serialize() == direct.serialize());
    CHECK(t.level_offset(4) == size3);
    CHECK(std::equal(keys2.begin(), keys2.end(), t.keys(2).begin()));

    auto r = GWTree::generate(OffspringSpec::parse("det:3"), 1, 2);
    r.deepen(4);
    CHECK(r.z(4) == 81.0);
    CHECK_THROWS_AS(r.deepen(4), Error);
  }

  TEST_CASE("arena and lazy views agree") {
    const auto t = GWTree::generate(OffspringSpec::parse("geom:0.6"), 3, 7);
    t.audit();
    for (int d = 0; d < t.arena_depth(); ++d) {
      const auto counts = t.child_counts(d);
      const auto keys = t.keys(d);
      for (std::size_t r = 0; r < keys.size(); ++r) {
        CHECK(t.child_count(keys[r]) == counts[r]);
        CHECK(t.descendant_count(d, r, 7 - d) == t.descendant_count_lazy(keys[r], 7 - d));
      }
    }
    CHECK(t.descendant_count(0, 0, 7) == t.z(7));
    CHECK(t.keys(0)[0] == root_key(3));
    CHECK(t.keys(1)[0] == child_key(root_key(3), 0));
  }

  TEST_CASE("lookahead estimates") {
    const auto d = GWTree::generate(OffspringSpec::parse("det:2"), 1, 3);
    CHECK(d.w_estimate(d.vertex(2, 1), 12) == 1.0);

    const auto spec = OffspringSpec::parse("unif:1:3");
    const auto t = GWTree::generate(spec, 42, 2);
    CHECK(t.w_estimate(t.vertex(0, 0), 5) == 2.03125);

    // Spread of W across trees, from W_10 over 1000 seeds.
    std::vector<double> w10;
    for (std::uint64_t s = 1; s <= 1000; ++s)
      w10.push_back(GWTree::generate(spec, s, 10).w(10));
    const double sd = std::sqrt(summarize(w10).variance);
    const auto v = t.vertex(2, 0);
    const double diff = std::abs(t.w_estimate(v, 10) - t.w_estimate(v, 20));
    CHECK(diff < 3.0 * sd / std::pow(2.0, 5));
  }

  TEST_CASE("property: W_n has mean one across seeds") {
    const auto spec = OffspringSpec::parse("unif:1:3");
    std::vector<double> w;
    for (std::uint64_t s = 0; s < 10000; ++s) w.push_back(GWTree::generate(spec, s, 8).w(8));
    const auto sum = summarize(w);
    CHECK(testing::within_se(sum.mean, 1.0, sum.std_error, 3.0));
  }

  TEST_CASE("property: random trees pass the structural audit") {
    SplitMix64 rng(77);
    for (int i = 0; i < 30; ++i) {
      const auto spec = testing::random_law(rng);
      const auto t = GWTree::generate(spec, rng(), 6);
      t.audit();
      double total = 0.0;
      for (int d = 0; d <= 6; ++d) {
        CHECK(static_cast<double>(t.level_size(d)) == t.z(d));
        total += t.z(d);
      }
      CHECK(static_cast<double>(t.arena_size()) == total);
      for (int d = 0; d < 6; ++d) {
        const auto fc = t.first_child(d);
        CHECK(fc.back() == t.level_size(d + 1));
      }
    }
  }

  TEST_CASE("serialization round trip") {
    const auto t = GWTree::generate(OffspringSpec::parse("poisplus:1.5"), 11, 9);
    const std::string text = t.serialize();
    auto back = GWTree::deserialize(text);
    CHECK(back.serialize() == text);
    CHECK(back.z(9) == t.z(9));
    back.deepen(11);
    CHECK(back.serialize() == GWTree::generate(t.spec(), 11, 11).serialize());

    const auto path = (std::filesystem::temp_directory_path() / "gwperc_unit_tree.txt").string();
    t.save(path);
    CHECK(GWTree::load(path).serialize() == text);
    std::filesystem::remove(path);
    CHECK_THROWS_AS(GWTree::load(path), Error);
  }

  TEST_CASE("corrupt tree files are rejected") {
    const std::string good = GWTree::generate(OffspringSpec::parse("unif:1:3"), 5, 4).serialize();
    CHECK(kind_of_deserialize("") == ErrorKind::parse);
    CHECK(kind_of_deserialize("gwtree v9" + good.substr(9)) == ErrorKind::parse);
    CHECK(kind_of_deserialize("xx" + good.substr(2)) == ErrorKind::parse);
    // drop the checksum line
    const auto cut = good.rfind("sum");
    CHECK(kind_of_deserialize(good.substr(0, cut)) == ErrorKind::parse);
    // wrong checksum
    CHECK(kind_of_deserialize(good.substr(0, cut) + "sum 1\n") == ErrorKind::parse);
    // a child count that disagrees with the seed
    std::string bent = good;
    const auto line2 = bent.find('\n', bent.find('\n') + 1) + 1;
    bent[line2] = bent[line2] == '1' ? '2' : '1';
    CHECK(kind_of_deserialize(bent) == ErrorKind::parse);
  }

  TEST_CASE("vertex budget") {
    try {
      GWTree::generate(OffspringSpec::parse("unif:1:3"), 1, 40, 1000);
      FAIL("budget not enforced");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::budget);
      CHECK(std::string(e.what()).find("depth") != std::string::npos);
    }
    CHECK_THROWS_AS(GWTree::generate(OffspringSpec::parse("unif:1:3"), 1, -1), Error);
    CHECK_THROWS_AS(GWTree::generate(OffspringSpec::parse("unif:1:3"), 1, 3).z(4), Error);
  }
}
