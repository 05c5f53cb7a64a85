// Copyright 2026 The fairmargin Authors
//
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

#include "fairmargin/theorycheck.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fairmargin {

namespace {

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + mid, v.end());
  const double hi = v[mid];
  if (v.size() % 2 == 1) return hi;
  const double lo = *std::max_element(v.begin(), v.begin() + mid);
  return 0.5 * (lo + hi);
}

}  // namespace

std::vector<IdentitySample> identity_samples(const Network& net, const Matrix& rows, double band,
                                             std::size_t* degenerate) {
  const auto reports = margin_distances(net, rows);
  std::vector<IdentitySample> out;
  out.reserve(reports.size());
  std::size_t flat = 0;
  for (std::size_t i = 0; i < reports.size(); ++i) {
    const auto& r = reports[i];
    if (!r.d_margin || !r.theorem1_value) {
      ++flat;
      continue;
    }
    IdentitySample s;
    s.row = static_cast<Eigen::Index>(i);
    s.d_hat = r.d_hat;
    s.d_margin = *r.d_margin;
    s.theorem1_value = *r.theorem1_value;
    s.grad_norm_dhat = r.grad_norm_dhat;
    s.f0 = r.f0;
    s.near_boundary = std::abs(r.f0 - 0.5) < band;
    s.relative_gap = std::abs(s.d_margin - s.theorem1_value) / std::max(s.d_margin, 1e-12);
    out.push_back(s);
  }
  if (degenerate) *degenerate = flat;
  return out;
}

Theorem1Verdict verify_theorem1(std::span<const IdentitySample> samples, double tol) {
  Theorem1Verdict v;
  v.tolerance = tol;
  v.checked = samples.size();
  for (const auto& s : samples) {
    const double gap = std::abs(s.d_margin - s.theorem1_value) / std::max(s.d_margin, 1e-12);
    if (gap > tol) ++v.violations;
    if (!v.worst || gap > v.worst->relative_gap) {
      v.worst = s;
      v.worst->relative_gap = gap;
    }
  }

  // Monotonicity at a shared gradient norm: sort by d_hat and require the
  // closed form to increase wherever d_hat does.
  std::vector<double> d;
  d.reserve(samples.size());
  for (const auto& s : samples) d.push_back(s.d_hat);
  std::sort(d.begin(), d.end());
  v.monotonic = true;
  for (std::size_t i = 1; i < d.size(); ++i) {
    if (d[i] > d[i - 1] && !(theorem1_rhs(d[i], 1.0) > theorem1_rhs(d[i - 1], 1.0))) v.monotonic = false;
  }
  v.pass = v.checked > 0 && v.violations == 0 && v.monotonic;
  return v;
}

Theorem1Verdict verify_theorem1(const Network& net, const Matrix& rows, double tol) {
  std::size_t degenerate = 0;
  const auto samples = identity_samples(net, rows, 0.01, &degenerate);
  if (samples.empty()) throw std::domain_error("verify_theorem1: every row sits in a flat region");
  auto v = verify_theorem1(samples, tol);
  v.degenerate = degenerate;
  return v;
}

Corollary1Summary verify_corollary1(const Network& net, const Matrix& rows, double band, double gap_threshold) {
  Corollary1Summary s;
  s.band = band;
  s.threshold = gap_threshold;
  const auto reports = margin_distances(net, rows);
  std::vector<double> gaps;
  std::vector<double> norms;
  for (const auto& r : reports) {
    if (std::abs(r.f0 - 0.5) >= band) continue;
    ++s.near_boundary;
    if (!r.d_margin) continue;
    gaps.push_back(corollary1_gap(r));
    norms.push_back(r.grad_norm_dhat);
  }
  s.considered = gaps.size();
  s.empty = gaps.empty();
  if (s.empty) return s;
  s.median_gap = median(gaps);
  s.max_gap = *std::max_element(gaps.begin(), gaps.end());
  s.median_grad_norm = median(norms);
  s.pass = s.median_gap <= gap_threshold;
  return s;
}

nlohmann::json to_json(const IdentitySample& s) {
  return {{"row", s.row},
          {"d_hat", s.d_hat},
          {"d_margin", s.d_margin},
          {"theorem1_value", s.theorem1_value},
          {"grad_norm_dhat", s.grad_norm_dhat},
          {"relative_gap", s.relative_gap},
          {"f0", s.f0},
          {"near_boundary", s.near_boundary}};
}

nlohmann::json to_json(const Theorem1Verdict& v) {
  return {{"pass", v.pass},
          {"monotonic", v.monotonic},
          {"checked", v.checked},
          {"degenerate", v.degenerate},
          {"violations", v.violations},
          {"tolerance", v.tolerance},
          {"worst", v.worst ? to_json(*v.worst) : nlohmann::json(nullptr)}};
}

nlohmann::json to_json(const Corollary1Summary& s) {
  return {{"near_boundary", s.near_boundary},
          {"considered", s.considered},
          {"median_gap", s.median_gap},
          {"max_gap", s.max_gap},
          {"median_grad_norm", s.median_grad_norm},
          {"band", s.band},
          {"threshold", s.threshold},
          {"empty", s.empty},
          {"pass", s.pass}};
}

}  // namespace fairmargin
