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

#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace gwperc::acceptance {

enum class Budget { smoke, full };

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  double seconds = 0.0;
  double limit_seconds = 0.0;  // 0: no runtime limit
  std::string detail;
  std::vector<std::pair<std::string, double>> metrics;
};

using Reporter = std::function<void(const CriterionResult&)>;

constexpr int kCriteria = 10;

/// Runs criterion `id` (1..10). Failures of the library itself are reported
/// as a failed criterion, never thrown.
CriterionResult run_criterion(int id, Budget budget, int threads = 0);

/// Runs all criteria in order; criterion 9 reuses the estimates of 3 to 5.
std::vector<CriterionResult> run_all(Budget budget, int threads = 0, const Reporter& report = {});

}  // namespace gwperc::acceptance
