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
#include <utility>
#include <vector>

#include "percolation.hpp"
#include "tree.hpp"

// Brute-force references: every open/closed configuration of the edges
// down to depth n is enumerated with its probability. Independent of the
// dynamic programs they check.
namespace gwperc::oracle {

constexpr int kMaxEdges = 24;

/// Number of edges between the root and depth n.
std::uint64_t edge_count(const GWTree& tree, int n);

MomentTable brute_force_moments(const GWTree& tree, int n, int k_max);
std::vector<double> brute_force_survival(const GWTree& tree, int n);

/// Law of the root cluster truncated at depth n: (bitmask of arena ids, probability).
std::vector<std::pair<std::uint64_t, double>> cluster_law(const GWTree& tree, int n);

std::vector<std::uint64_t> mask_to_ids(std::uint64_t mask);

}  // namespace gwperc::oracle
