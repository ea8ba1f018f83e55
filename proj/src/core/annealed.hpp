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
#include <vector>

#include "iic.hpp"
#include "offspring.hpp"

namespace gwperc {

/// q~_n for n = 0..n_max by q~_n = 1 - f(1 - q~_{n-1}), f the pgf of Bin(Z, pc).
std::vector<double> annealed_survival_exact(const OffspringSpec& spec, int n_max);

constexpr std::uint64_t kPopulationCap = 1'000'000'000ULL;

struct AnnealedYaglom {
  int n = 0;
  std::vector<double> scaled;  // Z~_n / n of accepted runs, in replicate order
  std::uint64_t attempts = 0;
  double acceptance_rate() const noexcept;
};

/// Critical branching process with offspring Bin(Z, pc), conditioned on
/// reaching depth n by rejection. Run r uses stream (seed, annealed, r).
AnnealedYaglom annealed_yaglom(const OffspringSpec& spec, int n, std::uint64_t accepted,
                               std::uint64_t seed, int threads = 0,
                               std::uint64_t max_attempts = 1'000'000'000ULL);

/// Annealed IIC: replicate r draws a fresh tree with seed (seed, annealed_iic, r)
/// and one IIC sample on it. Returns c_n / n per replicate.
IICExperiment annealed_iic_sizes(const OffspringSpec& spec, int n, std::uint64_t replicates,
                                 std::uint64_t seed, int lookahead = 10, int threads = 0);

}  // namespace gwperc
