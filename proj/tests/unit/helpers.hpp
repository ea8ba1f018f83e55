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

#include <cmath>
#include <cstdint>
#include <vector>

#include "offspring.hpp"
#include "rng.hpp"

namespace gwperc::testing {

// Random offspring law on {1..K} with mean above one, for property tests.
inline OffspringSpec random_law(SplitMix64& rng) {
  for (;;) {
    const int k = 2 + static_cast<int>(rng() % 4);
    std::vector<double> w(k);
    double total = 0.0;
    for (double& x : w) total += x = 0.05 + rng.uniform();
    double mean = 0.0;
    for (int i = 0; i < k; ++i) mean += (i + 1) * (w[i] /= total);
    if (mean > 1.05) return OffspringSpec::finite_pmf(w);
  }
}

inline bool within_se(double estimate, double target, double se, double z) {
  return std::abs(estimate - target) <= z * se;
}

}  // namespace gwperc::testing
