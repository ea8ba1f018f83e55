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

#include "offspring.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>

#include "error.hpp"

namespace gwperc {
namespace {

constexpr double kTailMass = 1e-16;
constexpr int kMaxTableSize = 1 << 20;

std::string shortest(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

template <class T>
T parse_number(std::string_view text, std::string_view what) {
  T value{};
  auto res = std::from_chars(text.data(), text.data() + text.size(), value);
  if (res.ec != std::errc{} || res.ptr != text.data() + text.size())
    fail(ErrorKind::parse, "cannot parse " + std::string(what) + " from '" +
                               std::string(text) + "'");
  return value;
}

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    auto pos = text.find(sep, start);
    out.push_back(text.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

double binom(int n, int r) {
  if (r < 0 || r > n) return 0.0;
  double out = 1.0;
  for (int i = 1; i <= r; ++i) out = out * (n - r + i) / i;
  return out;
}

// Sum over j-compositions of k of prod m[a_i].
double composition_sum(const std::vector<double>& m, int k, int j) {
  if (j == 0) return k == 0 ? 1.0 : 0.0;
  if (k < j) return 0.0;
  double total = 0.0;
  for (int first = 1; first <= k - j + 1; ++first)
    total += m[first] * composition_sum(m, k - first, j - 1);
  return total;
}

}  // namespace

OffspringSpec::OffspringSpec(OffspringKind kind, std::string name,
                             std::vector<double> pmf)
    : kind_(kind), name_(std::move(name)), pmf_(std::move(pmf)) {
  require(pmf_.size() >= 2, ErrorKind::invalid_argument,
          "offspring law '" + name_ + "' has empty support");
  require(pmf_[0] == 0.0, ErrorKind::invalid_argument,
          "offspring law '" + name_ + "' puts mass on 0; supported laws live on {1,2,...}");
  double total = 0.0;
  for (double p : pmf_) {
    require(std::isfinite(p) && p >= 0.0, ErrorKind::invalid_argument,
            "offspring law '" + name_ + "' has a negative or non-finite mass");
    total += p;
  }
  require(std::abs(total - 1.0) <= 1e-12, ErrorKind::invalid_argument,
          "offspring law '" + name_ + "' masses sum to " + shortest(total));
  while (pmf_.size() > 2 && pmf_.back() == 0.0) pmf_.pop_back();

  cdf_.resize(pmf_.size() - 1);
  double acc = 0.0;
  for (std::size_t k = 1; k < pmf_.size(); ++k) {
    acc += pmf_[k];
    cdf_[k - 1] = acc;
    mean_ += static_cast<double>(k) * pmf_[k];
  }
}

OffspringSpec OffspringSpec::deterministic(int d) {
  require(d >= 1, ErrorKind::invalid_argument, "det:d needs d >= 1");
  std::vector<double> pmf(d + 1, 0.0);
  pmf[d] = 1.0;
  return OffspringSpec(OffspringKind::deterministic, "det:" + std::to_string(d),
                       std::move(pmf));
}

OffspringSpec OffspringSpec::uniform_range(int a, int b) {
  require(a >= 1 && b >= a, ErrorKind::invalid_argument,
          "unif:a:b needs 1 <= a <= b");
  require(b < kMaxTableSize, ErrorKind::invalid_argument, "unif:a:b range too large");
  std::vector<double> pmf(b + 1, 0.0);
  const double mass = 1.0 / (b - a + 1);
  for (int k = a; k <= b; ++k) pmf[k] = mass;
  return OffspringSpec(OffspringKind::uniform_range,
                       "unif:" + std::to_string(a) + ":" + std::to_string(b),
                       std::move(pmf));
}

OffspringSpec OffspringSpec::finite_pmf(std::vector<double> masses_from_one) {
  require(!masses_from_one.empty(), ErrorKind::invalid_argument, "pmf: needs at least one mass");
  std::string name = "pmf:";
  for (std::size_t i = 0; i < masses_from_one.size(); ++i) {
    if (i) name += ',';
    name += shortest(masses_from_one[i]);
  }
  std::vector<double> pmf(masses_from_one.size() + 1, 0.0);
  std::copy(masses_from_one.begin(), masses_from_one.end(), pmf.begin() + 1);
  return OffspringSpec(OffspringKind::finite_pmf, std::move(name), std::move(pmf));
}

OffspringSpec OffspringSpec::geometric_shifted(double q) {
  require(q > 0.0 && q < 1.0, ErrorKind::invalid_argument, "geom:q needs 0 < q < 1");
  std::vector<double> pmf{0.0};
  double p = q;
  double tail = 1.0 - q;  // P[Z > k] = (1-q)^k
  for (int k = 1; k < kMaxTableSize; ++k) {
    pmf.push_back(p);
    if (tail < kTailMass) break;
    p *= (1.0 - q);
    tail *= (1.0 - q);
  }
  const double total = std::accumulate(pmf.begin(), pmf.end(), 0.0);
  for (double& x : pmf) x /= total;
  return OffspringSpec(OffspringKind::geometric_shifted, "geom:" + shortest(q),
                       std::move(pmf));
}

OffspringSpec OffspringSpec::poisson_positive(double theta) {
  require(theta > 0.0 && theta < 1e4, ErrorKind::invalid_argument,
          "poisplus:theta needs 0 < theta < 1e4");
  // log-space start avoids underflow of e^-theta for large theta
  const double norm = -std::expm1(-theta);
  std::vector<double> pmf{0.0};
  double log_p = -theta + std::log(theta) - std::log(norm);
  for (int k = 1; k < kMaxTableSize; ++k) {
    const double p = std::exp(log_p);
    pmf.push_back(p);
    const double ratio = theta / (k + 1);
    if (ratio < 0.5 && p * ratio / (1.0 - ratio) < kTailMass) break;
    log_p += std::log(ratio);
  }
  const double total = std::accumulate(pmf.begin(), pmf.end(), 0.0);
  for (double& x : pmf) x /= total;
  return OffspringSpec(OffspringKind::poisson_positive, "poisplus:" + shortest(theta),
                       std::move(pmf));
}

OffspringSpec OffspringSpec::from_table(std::vector<double> pmf, std::string name) {
  return OffspringSpec(OffspringKind::finite_pmf, std::move(name), std::move(pmf));
}

OffspringSpec OffspringSpec::parse(std::string_view text) {
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front())))
    text.remove_prefix(1);
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back())))
    text.remove_suffix(1);
  const auto colon = text.find(':');
  require(colon != std::string_view::npos, ErrorKind::parse,
          "offspring spec '" + std::string(text) + "' has no ':'");
  const auto family = text.substr(0, colon);
  const auto rest = text.substr(colon + 1);

  if (family == "det") return deterministic(parse_number<int>(rest, "det:d"));
  if (family == "unif") {
    auto parts = split(rest, ':');
    require(parts.size() == 2, ErrorKind::parse, "expected unif:a:b");
    return uniform_range(parse_number<int>(parts[0], "unif:a"),
                         parse_number<int>(parts[1], "unif:b"));
  }
  if (family == "pmf") {
    std::vector<double> masses;
    for (auto part : split(rest, ',')) masses.push_back(parse_number<double>(part, "pmf mass"));
    return finite_pmf(std::move(masses));
  }
  if (family == "geom") return geometric_shifted(parse_number<double>(rest, "geom:q"));
  if (family == "poisplus")
    return poisson_positive(parse_number<double>(rest, "poisplus:theta"));
  fail(ErrorKind::parse, "unknown offspring family '" + std::string(family) +
                             "' (expected det, unif, pmf, geom or poisplus)");
}

std::uint32_t OffspringSpec::sample(double u) const noexcept {
  if (cdf_.size() <= 8) {
    for (std::size_t i = 0; i < cdf_.size(); ++i)
      if (u < cdf_[i]) return static_cast<std::uint32_t>(i + 1);
    return static_cast<std::uint32_t>(cdf_.size());
  }
  auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
  if (it == cdf_.end()) return static_cast<std::uint32_t>(cdf_.size());
  return static_cast<std::uint32_t>(it - cdf_.begin() + 1);
}

double OffspringSpec::pgf(double s) const noexcept {
  double acc = 0.0;
  for (std::size_t k = pmf_.size(); k-- > 0;) acc = acc * s + pmf_[k];
  return acc;
}

double CriticalParams::c_kj(int k, int j) const {
  require(k >= 1 && k <= k_max && j >= 1 && j <= k, ErrorKind::invalid_argument,
          "c_{k,j} requested outside the tabulated range");
  return c[static_cast<std::size_t>(k) * (k_max + 1) + j];
}

CriticalParams derive_params(const OffspringSpec& spec, int k_max) {
  require(k_max >= 1, ErrorKind::invalid_argument, "k_max must be at least 1");
  require(spec.pmf()[0] == 0.0, ErrorKind::invalid_argument,
          "offspring law puts mass on 0");
  CriticalParams out;
  out.k_max = k_max;
  out.mu = spec.mean();
  require(out.mu > 1.0, ErrorKind::invalid_argument,
          "offspring law '" + spec.name() + "' has mean " + shortest(out.mu) +
              " <= 1; the tree must be supercritical");
  out.pc = 1.0 / out.mu;

  const auto pmf = spec.pmf();
  const int r_max = 2 * k_max;
  out.m.assign(r_max + 1, 0.0);
  for (int k = 1; k < static_cast<int>(pmf.size()); ++k) {
    if (pmf[k] == 0.0) continue;
    out.phi2 += static_cast<double>(k) * (k - 1) * pmf[k];
    for (int r = 0; r <= r_max; ++r) out.m[r] += pmf[k] * binom(k, r);
  }
  require(out.phi2 > 0.0, ErrorKind::invalid_argument, "phi''(1) must be positive");
  out.lambda = 2.0 / (out.pc * out.pc * out.phi2);
  out.lambda_alt = 2.0 * out.mu * out.mu / (2.0 * out.m[2]);

  out.c.assign(static_cast<std::size_t>(k_max + 1) * (k_max + 1), 0.0);
  for (int k = 1; k <= k_max; ++k) {
    const double pk = std::pow(out.pc, k);
    for (int j = 1; j <= k; ++j)
      out.c[static_cast<std::size_t>(k) * (k_max + 1) + j] = pk * composition_sum(out.m, k, j);
  }
  return out;
}

double AnnealedLaw::mean() const noexcept {
  double acc = 0.0;
  for (std::size_t i = 0; i < pmf.size(); ++i) acc += static_cast<double>(i) * pmf[i];
  return acc;
}

double AnnealedLaw::pgf(double s) const noexcept {
  double acc = 0.0;
  for (std::size_t k = pmf.size(); k-- > 0;) acc = acc * s + pmf[k];
  return acc;
}

AnnealedLaw annealed_offspring(const OffspringSpec& spec) {
  const double p = 1.0 / spec.mean();
  const auto pmf = spec.pmf();
  AnnealedLaw out;
  out.pmf.assign(pmf.size(), 0.0);
  for (int k = 1; k < static_cast<int>(pmf.size()); ++k) {
    if (pmf[k] == 0.0) continue;
    for (int i = 0; i <= k; ++i)
      out.pmf[i] += pmf[k] * binom(k, i) * std::pow(p, i) * std::pow(1.0 - p, k - i);
  }
  return out;
}

}  // namespace gwperc
