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

#include "tree.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "error.hpp"

namespace gwperc {
namespace {

// Regular trees only need a small arena: exact work on them is collapsed.
constexpr std::uint64_t kRegularArenaCap = 1ULL << 16;

void append_uint(std::string& out, std::uint64_t v) {
  char buf[24];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, res.ptr);
}

class LineReader {
 public:
  explicit LineReader(std::string_view text) : text_(text) {}

  bool next(std::string_view& line) {
    if (pos_ >= text_.size()) return false;
    auto end = text_.find('\n', pos_);
    if (end == std::string_view::npos) end = text_.size();
    line = text_.substr(pos_, end - pos_);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    pos_ = end + 1;
    ++line_no_;
    return true;
  }

  int line_no() const { return line_no_; }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
  int line_no_ = 0;
};

std::vector<std::string_view> tokens(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && line[i] == ' ') ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ') ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

template <class T>
bool to_number(std::string_view s, T& out) {
  auto res = std::from_chars(s.data(), s.data() + s.size(), out);
  return res.ec == std::errc{} && res.ptr == s.data() + s.size();
}

}  // namespace

GWTree::GWTree(OffspringSpec spec, std::uint64_t seed, std::uint64_t budget)
    : spec_(std::move(spec)), seed_(seed), budget_(budget), mu_(spec_.mean()) {
  require(mu_ > 1.0, ErrorKind::invalid_argument,
          "offspring law '" + spec_.name() + "' is not supercritical");
  require(budget_ >= 1 && budget_ <= (1ULL << 32), ErrorKind::invalid_argument,
          "vertex budget must lie in [1, 2^32]");
  levels_.push_back(Level{{}, {}, {root_key(seed_)}});
  offsets_ = {0, 1};
  z_ = {1.0};
  w_ = {1.0};
}

GWTree GWTree::generate(const OffspringSpec& spec, std::uint64_t seed, int depth,
                        std::uint64_t vertex_budget) {
  require(depth >= 0, ErrorKind::invalid_argument, "depth must be non-negative");
  GWTree tree(spec, seed, vertex_budget);
  if (depth > 0) tree.deepen(depth);
  return tree;
}

void GWTree::deepen(int new_depth) {
  require(new_depth > depth_, ErrorKind::precondition,
          "deepen to " + std::to_string(new_depth) + " but the tree already has depth " +
              std::to_string(depth_));
  if (regular()) {
    const std::uint64_t cap = std::min(budget_, kRegularArenaCap);
    const auto d = static_cast<std::uint64_t>(spec_.max_support());
    int target = arena_depth();
    std::uint64_t total = arena_size();
    std::uint64_t next = level_size(target) * d;
    while (target < new_depth && total + next <= cap) {
      total += next;
      next *= d;
      ++target;
    }
    if (target > arena_depth()) grow_arena_to(target);
  } else {
    grow_arena_to(new_depth);
  }
  extend_tables_to(new_depth);
}

void GWTree::grow_arena_to(int depth) {
  while (arena_depth() < depth) {
    const int d = arena_depth();
    Level& cur = levels_[d];
    const std::size_t n = cur.keys.size();
    std::vector<std::uint32_t> counts(n);
    std::vector<std::uint32_t> first(n + 1);
    std::uint64_t next_size = 0;
    for (std::size_t i = 0; i < n; ++i) {
      counts[i] = child_count(cur.keys[i]);
      first[i] = static_cast<std::uint32_t>(std::min<std::uint64_t>(next_size, UINT32_MAX));
      next_size += counts[i];
    }
    if (arena_size() + next_size > budget_) {
      depth_ = std::max(depth_, arena_depth());
      extend_tables_to(depth_);
      fail(ErrorKind::budget, "memory budget exceeded at depth " + std::to_string(d + 1) +
                                  ": level holds " + std::to_string(next_size) +
                                  " vertices, arena budget is " + std::to_string(budget_));
    }
    first[n] = static_cast<std::uint32_t>(next_size);

    Level next;
    next.keys.reserve(next_size);
    for (std::size_t i = 0; i < n; ++i)
      for (std::uint32_t j = 0; j < counts[i]; ++j) next.keys.push_back(child_key(cur.keys[i], j));
    cur.counts = std::move(counts);
    cur.first = std::move(first);
    offsets_.push_back(offsets_.back() + next_size);
    levels_.push_back(std::move(next));
  }
}

void GWTree::extend_tables_to(int depth) {
  const double d = static_cast<double>(spec_.max_support());
  // repeated multiplication, so regular trees get W_n = 1 exactly
  double mu_pow = 1.0;
  for (std::size_t n = 1; n < z_.size(); ++n) mu_pow *= mu_;
  for (int n = static_cast<int>(z_.size()); n <= depth; ++n) {
    mu_pow *= mu_;
    double zn;
    if (n <= arena_depth())
      zn = static_cast<double>(level_size(n));
    else
      zn = z_.back() * d;
    z_.push_back(zn);
    // d^n overflows past n ~ 1000 on regular trees
    w_.push_back(regular() ? 1.0 : zn / mu_pow);
    w_bar_ = std::max(w_bar_, w_.back());
  }
  depth_ = std::max(depth_, depth);
}

double GWTree::z(int n) const {
  require(n >= 0 && n <= depth_, ErrorKind::precondition,
          "Z_" + std::to_string(n) + " requested but the tree has depth " + std::to_string(depth_));
  return z_[n];
}

double GWTree::w(int n) const {
  require(n >= 0 && n <= depth_, ErrorKind::precondition,
          "W_" + std::to_string(n) + " requested but the tree has depth " + std::to_string(depth_));
  return w_[n];
}

std::uint64_t GWTree::level_size(int d) const {
  require(d >= 0 && d <= arena_depth(), ErrorKind::precondition, "level outside the arena");
  return levels_[d].keys.size();
}

std::uint64_t GWTree::level_offset(int d) const {
  require(d >= 0 && d <= arena_depth(), ErrorKind::precondition, "level outside the arena");
  return offsets_[d];
}

std::uint64_t GWTree::arena_size() const noexcept { return offsets_.back(); }

std::span<const std::uint32_t> GWTree::child_counts(int d) const {
  require(d >= 0 && d < arena_depth(), ErrorKind::precondition,
          "child counts of level " + std::to_string(d) + " are not materialized");
  return levels_[d].counts;
}

std::span<const std::uint32_t> GWTree::first_child(int d) const {
  require(d >= 0 && d < arena_depth(), ErrorKind::precondition,
          "child offsets of level " + std::to_string(d) + " are not materialized");
  return levels_[d].first;
}

std::span<const VertexKey> GWTree::keys(int d) const {
  require(d >= 0 && d <= arena_depth(), ErrorKind::precondition, "level outside the arena");
  return levels_[d].keys;
}

VertexRef GWTree::vertex(int d, std::uint64_t rank) const {
  require(rank < level_size(d), ErrorKind::precondition, "rank outside level");
  return VertexRef{offsets_[d] + rank, d};
}

std::uint64_t GWTree::rank_of(VertexRef v) const {
  require(v.depth >= 0 && v.depth <= arena_depth(), ErrorKind::precondition,
          "vertex depth outside the arena");
  require(v.id >= offsets_[v.depth] && v.id < offsets_[v.depth + 1], ErrorKind::precondition,
          "vertex id " + std::to_string(v.id) + " is not on level " + std::to_string(v.depth));
  return v.id - offsets_[v.depth];
}

VertexKey GWTree::key_of(VertexRef v) const { return levels_[v.depth].keys[rank_of(v)]; }

std::uint64_t GWTree::lazy_count(VertexKey key, int m) const {
  const std::uint32_t c = child_count(key);
  if (m == 1) return c;
  std::uint64_t total = 0;
  for (std::uint32_t j = 0; j < c; ++j) total += lazy_count(child_key(key, j), m - 1);
  return total;
}

double GWTree::descendant_count_lazy(VertexKey key, int m) const {
  require(m >= 0, ErrorKind::invalid_argument, "lookahead must be non-negative");
  if (regular()) return std::pow(static_cast<double>(spec_.max_support()), m);
  if (m == 0) return 1.0;
  return static_cast<double>(lazy_count(key, m));
}

double GWTree::descendant_count(int d, std::uint64_t rank, int m) const {
  require(m >= 0, ErrorKind::invalid_argument, "lookahead must be non-negative");
  require(rank < level_size(d), ErrorKind::precondition, "rank outside level");
  if (regular()) return std::pow(static_cast<double>(spec_.max_support()), m);
  // descendants of a vertex form a contiguous range on every deeper level
  std::uint64_t lo = rank, hi = rank + 1;
  int l = d;
  for (; l < d + m && l < arena_depth(); ++l) {
    lo = levels_[l].first[lo];
    hi = levels_[l].first[hi];
  }
  if (l == d + m) return static_cast<double>(hi - lo);
  std::uint64_t total = 0;
  const auto& frontier = levels_[l].keys;
  for (std::uint64_t r = lo; r < hi; ++r) total += lazy_count(frontier[r], d + m - l);
  return static_cast<double>(total);
}

double GWTree::w_estimate(VertexRef v, int lookahead) const {
  const double count = descendant_count(v.depth, rank_of(v), lookahead);
  return count / std::pow(mu_, lookahead);
}

std::string GWTree::serialize() const {
  const bool synthesize = arena_depth() < depth_;
  if (synthesize) {
    double total = 0;
    for (int n = 0; n <= depth_; ++n) total += z_[n];
    require(total <= static_cast<double>(budget_), ErrorKind::budget,
            "tree of depth " + std::to_string(depth_) + " is too large to serialize");
  }
  std::string out = "gwtree v1 " + spec_.name() + " ";
  append_uint(out, seed_);
  out += ' ';
  append_uint(out, static_cast<std::uint64_t>(depth_));
  out += '\n';
  std::uint64_t total = 1;
  for (int l = 0; l < depth_; ++l) {
    if (l < arena_depth()) {
      const auto& counts = levels_[l].counts;
      for (std::size_t i = 0; i < counts.size(); ++i) {
        if (i) out += ' ';
        append_uint(out, counts[i]);
      }
    } else {
      const auto size = static_cast<std::uint64_t>(z_[l]);
      const auto d = static_cast<std::uint64_t>(spec_.max_support());
      for (std::uint64_t i = 0; i < size; ++i) {
        if (i) out += ' ';
        append_uint(out, d);
      }
    }
    out += '\n';
    total += static_cast<std::uint64_t>(z_[l + 1]);
  }
  out += "sum ";
  append_uint(out, total);
  out += '\n';
  return out;
}

GWTree GWTree::deserialize(std::string_view text, std::uint64_t vertex_budget) {
  LineReader reader(text);
  std::string_view line;
  require(reader.next(line), ErrorKind::parse, "tree file is empty");
  const auto head = tokens(line);
  require(head.size() == 5 && head[0] == "gwtree", ErrorKind::parse,
          "malformed header: expected 'gwtree v1 <spec> <seed> <depth>'");
  require(head[1] == "v1", ErrorKind::parse,
          "unsupported tree format version '" + std::string(head[1]) + "'");
  const OffspringSpec spec = OffspringSpec::parse(head[2]);
  std::uint64_t seed = 0;
  int depth = 0;
  require(to_number(head[3], seed), ErrorKind::parse, "malformed seed in header");
  require(to_number(head[4], depth) && depth >= 0, ErrorKind::parse, "malformed depth in header");

  std::vector<std::vector<std::uint32_t>> levels;
  std::uint64_t expected = 1, total = 1;
  for (int l = 0; l < depth; ++l) {
    require(reader.next(line), ErrorKind::parse,
            "truncated file: level " + std::to_string(l) + " is missing");
    std::vector<std::uint32_t> counts;
    counts.reserve(expected);
    std::uint64_t next = 0;
    for (auto tok : tokens(line)) {
      std::uint32_t c = 0;
      require(to_number(tok, c), ErrorKind::parse,
              "malformed child count on line " + std::to_string(reader.line_no()));
      counts.push_back(c);
      next += c;
    }
    require(counts.size() == expected, ErrorKind::parse,
            "truncated level " + std::to_string(l) + ": expected " + std::to_string(expected) +
                " child counts, found " + std::to_string(counts.size()));
    require(total + next <= vertex_budget, ErrorKind::budget,
            "tree file exceeds the vertex budget at depth " + std::to_string(l + 1));
    levels.push_back(std::move(counts));
    expected = next;
    total += next;
  }
  require(reader.next(line), ErrorKind::parse, "missing 'sum' checksum line");
  const auto tail = tokens(line);
  std::uint64_t sum = 0;
  require(tail.size() == 2 && tail[0] == "sum" && to_number(tail[1], sum), ErrorKind::parse,
          "malformed checksum line");
  require(sum == total, ErrorKind::parse,
          "checksum mismatch: file says " + std::to_string(sum) + " vertices, levels hold " +
              std::to_string(total));

  GWTree tree = generate(spec, seed, depth, vertex_budget);
  for (int l = 0; l < depth; ++l) {
    bool same;
    if (l < tree.arena_depth()) {
      const auto counts = tree.child_counts(l);
      same = std::equal(counts.begin(), counts.end(), levels[l].begin(), levels[l].end());
    } else {
      const auto d = static_cast<std::uint32_t>(spec.max_support());
      same = std::all_of(levels[l].begin(), levels[l].end(),
                         [d](std::uint32_t c) { return c == d; });
    }
    require(same, ErrorKind::parse,
            "level " + std::to_string(l) + " does not match the tree generated from the header seed");
  }
  return tree;
}

void GWTree::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  require(static_cast<bool>(out), ErrorKind::io, "cannot open '" + path + "' for writing");
  const std::string text = serialize();
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  require(static_cast<bool>(out), ErrorKind::io, "write to '" + path + "' failed");
}

GWTree GWTree::load(const std::string& path, std::uint64_t vertex_budget) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), ErrorKind::io, "cannot open tree file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return deserialize(buf.str(), vertex_budget);
}

void GWTree::audit() const {
  auto check = [](bool ok, const std::string& what) {
    if (!ok) fail(ErrorKind::internal, "tree audit failed: " + what);
  };
  check(offsets_.size() == levels_.size() + 1, "offset table size");
  check(offsets_[0] == 0, "offset table origin");
  for (int l = 0; l <= arena_depth(); ++l) {
    check(offsets_[l + 1] - offsets_[l] == levels_[l].keys.size(), "level ranges partition");
    check(z_[l] == static_cast<double>(levels_[l].keys.size()), "Z_n table");
    if (l == arena_depth()) break;
    const auto& lv = levels_[l];
    check(lv.counts.size() == lv.keys.size() && lv.first.size() == lv.keys.size() + 1,
          "level " + std::to_string(l) + " table sizes");
    std::uint64_t acc = 0;
    for (std::size_t i = 0; i < lv.counts.size(); ++i) {
      check(lv.first[i] == acc, "first-child offsets on level " + std::to_string(l));
      check(lv.counts[i] == child_count(lv.keys[i]), "child count replay");
      acc += lv.counts[i];
    }
    check(lv.first.back() == acc, "first-child sentinel");
    check(acc == levels_[l + 1].keys.size(), "Z_{n+1} = sum of child counts at level " +
                                                 std::to_string(l));
  }
  double mu_pow = 1.0, wbar = 1.0;
  for (int n = 0; n <= depth_; ++n) {
    if (n) mu_pow *= mu_;
    check(std::abs(w_[n] - z_[n] / mu_pow) <= 1e-12 * std::max(1.0, w_[n]), "W_n table");
    wbar = std::max(wbar, w_[n]);
  }
  check(wbar == w_bar_, "running max of W_n");
}

}  // namespace gwperc
