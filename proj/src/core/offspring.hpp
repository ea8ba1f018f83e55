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

#include "rng.hpp"

namespace gwperc {

enum class OffspringKind {
  deterministic,
  uniform_range,
  finite_pmf,
  geometric_shifted,
  poisson_positive,
};

/// Offspring law Z on {1, 2, ...} with mean above one.
///
/// Every law is held as a probability table indexed from zero (entry 0 is
/// always zero). Analytic families are tabulated until the remaining tail
/// mass drops below 1e-16 and then renormalized, so all derived constants
/// come from one finite table.
///
/// Spec strings: `det:d`, `unif:a:b`, `pmf:p1,p2,...` (masses on 1..K),
/// `geom:q` (P[Z=k] = q(1-q)^(k-1)) and `poisplus:theta` (Poisson(theta)
/// conditioned on being positive).
class OffspringSpec {
 public:
  static OffspringSpec parse(std::string_view text);

  static OffspringSpec deterministic(int d);
  static OffspringSpec uniform_range(int a, int b);
  static OffspringSpec finite_pmf(std::vector<double> masses_from_one);
  static OffspringSpec geometric_shifted(double q);
  static OffspringSpec poisson_positive(double theta);

  /// Arbitrary table indexed from zero. Rejects mass at zero.
  static OffspringSpec from_table(std::vector<double> pmf, std::string name);

  OffspringKind kind() const noexcept { return kind_; }
  const std::string& name() const noexcept { return name_; }
  std::span<const double> pmf() const noexcept { return pmf_; }
  int max_support() const noexcept { return static_cast<int>(pmf_.size()) - 1; }
  double mean() const noexcept { return mean_; }
  bool is_deterministic() const noexcept { return kind_ == OffspringKind::deterministic; }

  /// Inverse-CDF draw from a uniform variate in [0, 1).
  std::uint32_t sample(double u) const noexcept;

  template <class Rng>
  std::uint32_t sample(Rng& rng) const {
    return sample(to_unit(rng()));
  }

  /// phi(s) = sum_k P[Z=k] s^k.
  double pgf(double s) const noexcept;

 private:
  OffspringSpec(OffspringKind kind, std::string name, std::vector<double> pmf);

  OffspringKind kind_;
  std::string name_;
  std::vector<double> pmf_;
  std::vector<double> cdf_;  // cdf_[k-1] = P[Z <= k]
  double mean_ = 0.0;
};

/// Distribution-level constants of the critical problem.
struct CriticalParams {
  double mu = 0.0;
  double pc = 0.0;
  double phi2 = 0.0;         // phi''(1) = E[Z(Z-1)]
  double lambda = 0.0;       // 2 / (pc^2 phi''(1))
  double lambda_alt = 0.0;   // 2 mu^2 / E[Z(Z-1)], with E[Z(Z-1)] = 2 m_2
  int k_max = 0;
  std::vector<double> m;     // m[r] = E[binom(Z, r)], r = 0..2 k_max
  std::vector<double> c;     // row-major (k_max+1) x (k_max+1)

  /// c_{k,j} = pc^k * sum over j-compositions a of k of m_{a_1}...m_{a_j}.
  double c_kj(int k, int j) const;
};

CriticalParams derive_params(const OffspringSpec& spec, int k_max = 4);

/// Law of Bin(Z, pc): the annealed critical offspring law, support from 0.
struct AnnealedLaw {
  std::vector<double> pmf;
  double mean() const noexcept;
  double pgf(double s) const noexcept;
};

AnnealedLaw annealed_offspring(const OffspringSpec& spec);

}  // namespace gwperc
