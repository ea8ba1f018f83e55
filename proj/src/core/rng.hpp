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
#include <limits>

namespace gwperc {

// SplitMix64 finalizer. Used both as a hash for
// deriving independent streams and as the state transition of the engine.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Named stream families. Every source of randomness in the library is keyed
// by (master seed, tag, index) so results never depend on scheduling order.
enum class StreamTag : std::uint64_t {
  tree = 0x7472656500000001ULL,
  perc = 0x7065726300000002ULL,
  iic = 0x6969630000000003ULL,
  martingale = 0x6d61727400000004ULL,
  annealed = 0x616e6e6500000005ULL,
  annealed_iic = 0x616e696900000006ULL,
  spread = 0x7370726500000007ULL,
};

constexpr std::uint64_t derive_stream(std::uint64_t seed, StreamTag tag,
                                      std::uint64_t index) noexcept {
  std::uint64_t h = mix64(seed);
  h = mix64(h ^ static_cast<std::uint64_t>(tag));
  return mix64(h + index);
}

// Maps the top 53 bits onto [0, 1).
constexpr double to_unit(std::uint64_t bits) noexcept {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

// SplitMix64 generator. Satisfies UniformRandomBitGenerator; the whole state
// is one word, so spawning a stream per replicate costs nothing.
class SplitMix64 {
 public:
  using result_type = std::uint64_t;

  explicit constexpr SplitMix64(std::uint64_t state) noexcept : state_(state) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

  constexpr result_type operator()() noexcept {
    state_ += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  constexpr double uniform() noexcept { return to_unit((*this)()); }

  constexpr bool bernoulli(double p) noexcept { return uniform() < p; }

  constexpr std::uint64_t state() const noexcept { return state_; }

 private:
  std::uint64_t state_;
};

inline SplitMix64 make_stream(std::uint64_t seed, StreamTag tag,
                              std::uint64_t index) noexcept {
  return SplitMix64(derive_stream(seed, tag, index));
}

}  // namespace gwperc
