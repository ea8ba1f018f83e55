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

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "offspring.hpp"
#include "rng.hpp"

namespace gwperc {

/// Identity of a vertex, derived from its ancestral path. Every vertex of the
/// (infinite) tree has a key, whether or not it is materialized in the arena.
using VertexKey = std::uint64_t;

inline VertexKey root_key(std::uint64_t seed) noexcept {
  return derive_stream(seed, StreamTag::tree, 0);
}

inline VertexKey child_key(VertexKey parent, std::uint32_t j) noexcept {
  return mix64(parent ^ (0xD1B54A32D192ED03ULL * (static_cast<std::uint64_t>(j) + 1)));
}

/// Arena position: global breadth-first index plus depth.
struct VertexRef {
  std::uint64_t id = 0;
  int depth = 0;
};

/// A seeded Galton-Watson tree.
///
/// The tree is defined to every depth by its seed: the child count of a
/// vertex is a pure function of its key. The first `depth()` levels are
/// materialized breadth-first in an arena (child counts, first-child offsets
/// and keys per level), which is what the exact computations sweep. Monte
/// Carlo code walks deeper levels lazily through `child_count(key)`, and the
/// two views always agree.
///
/// Trees with deterministic offspring are regular: they are never
/// materialized beyond a small arena, and exact computations collapse them
/// level by level, so `depth()` may be arbitrarily large.
class GWTree {
 public:
  static constexpr std::uint64_t kDefaultVertexBudget = 1ULL << 25;

  static GWTree generate(const OffspringSpec& spec, std::uint64_t seed, int depth,
                         std::uint64_t vertex_budget = kDefaultVertexBudget);

  /// Extends the tree in place; the existing arena prefix is unchanged.
  void deepen(int new_depth);

  const OffspringSpec& spec() const noexcept { return spec_; }
  std::uint64_t seed() const noexcept { return seed_; }
  double mu() const noexcept { return mu_; }
  bool regular() const noexcept { return spec_.is_deterministic(); }
  std::uint64_t vertex_budget() const noexcept { return budget_; }

  int depth() const noexcept { return depth_; }
  int arena_depth() const noexcept { return static_cast<int>(levels_.size()) - 1; }

  /// Z_n, n <= depth(). A double so regular trees can report d^n at any depth.
  double z(int n) const;
  /// W_n = Z_n / mu^n.
  double w(int n) const;
  /// max over k <= depth() of W_k; a lower bound on sup_n W_n.
  double w_bar() const noexcept { return w_bar_; }
  std::span<const double> w_table() const noexcept { return w_; }

  // Arena access, valid for levels 0..arena_depth().
  std::uint64_t level_size(int d) const;
  std::uint64_t level_offset(int d) const;
  std::uint64_t arena_size() const noexcept;
  /// Child counts of level d, d < arena_depth().
  std::span<const std::uint32_t> child_counts(int d) const;
  /// First-child ranks in level d+1, with a trailing sentinel; d < arena_depth().
  std::span<const std::uint32_t> first_child(int d) const;
  std::span<const VertexKey> keys(int d) const;
  VertexRef vertex(int d, std::uint64_t rank) const;
  std::uint64_t rank_of(VertexRef v) const;
  VertexKey key_of(VertexRef v) const;

  /// Child count of any vertex, materialized or not.
  std::uint32_t child_count(VertexKey key) const noexcept {
    if (regular()) return static_cast<std::uint32_t>(spec_.max_support());
    return spec_.sample(to_unit(mix64(key ^ 0x5851F42D4C957F2DULL)));
  }

  /// Z_m(v) for the arena vertex (d, rank); lazily continues below the arena.
  double descendant_count(int d, std::uint64_t rank, int m) const;
  /// Z_m(v) for any vertex given only its key.
  double descendant_count_lazy(VertexKey key, int m) const;

  /// W_m(v) = Z_m(v) / mu^m, the lookahead estimate of W(v).
  double w_estimate(VertexRef v, int lookahead) const;

  /// Text format: header `gwtree v1 <spec> <seed> <depth>`, one line of
  /// child counts per level 0..depth-1 in breadth-first order, then
  /// `sum <total vertex count>`.
  std::string serialize() const;
  static GWTree deserialize(std::string_view text,
                            std::uint64_t vertex_budget = kDefaultVertexBudget);

  void save(const std::string& path) const;
  static GWTree load(const std::string& path,
                     std::uint64_t vertex_budget = kDefaultVertexBudget);

  /// Structural audit: level sums, offset tables and partition of the arena.
  /// Throws on inconsistency.
  void audit() const;

 private:
  struct Level {
    std::vector<std::uint32_t> counts;  // empty on the deepest level
    std::vector<std::uint32_t> first;   // counts.size() + 1 entries
    std::vector<VertexKey> keys;
  };

  GWTree(OffspringSpec spec, std::uint64_t seed, std::uint64_t budget);
  void grow_arena_to(int depth);
  void extend_tables_to(int depth);
  std::uint64_t lazy_count(VertexKey key, int m) const;

  OffspringSpec spec_;
  std::uint64_t seed_ = 0;
  std::uint64_t budget_ = kDefaultVertexBudget;
  double mu_ = 0.0;
  int depth_ = 0;
  std::vector<Level> levels_;
  std::vector<std::uint64_t> offsets_;
  std::vector<double> z_;
  std::vector<double> w_;
  double w_bar_ = 1.0;
};

}  // namespace gwperc
