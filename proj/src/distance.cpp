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

#include "fairmargin/distance.hpp"

#include <cmath>
#include <stdexcept>

namespace fairmargin {

double theorem1_rhs(double d_hat, double grad_norm_dhat) {
  if (!(grad_norm_dhat > 0.0)) throw std::domain_error("theorem1_rhs: gradient norm must be positive");
  if (d_hat < 0.0) throw std::domain_error("theorem1_rhs: d_hat must be nonnegative");
  if (d_hat <= 300.0) return std::expm1(2.0 * d_hat) / (2.0 * std::exp(d_hat) * grad_norm_dhat);
  // e^{-d} is below rounding here
  return std::exp(d_hat - std::log(2.0 * grad_norm_dhat));
}

std::vector<DistanceReport> margin_distances(const Network& net, const Matrix& rows) {
  const ForwardTrace trace = forward(net, rows);
  const Matrix& logits = trace.logits();
  const Eigen::Index n = rows.rows();

  // Route 1: gradient of the probability gap f0 - f1 through the softmax.
  // d(f0 - f1)/dg0 = 2 f0 f1, d(f0 - f1)/dg1 = -2 f0 f1.
  Matrix prob_gap_grads(n, 2);
  std::vector<Probabilities> probs(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    probs[i] = softmax2(logits(i, 0), logits(i, 1));
    const double s = 2.0 * probs[i].f0 * probs[i].f1;
    prob_gap_grads(i, 0) = s;
    prob_gap_grads(i, 1) = -s;
  }
  const Matrix grad_prob_gap = backward(net, trace, prob_gap_grads, GradientTargets::inputs).input_grads;

  // Route 2: gradient of d_hat = |g0 - g1| (sign +1 on the boundary).
  Matrix dhat_grads(n, 2);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double sign = logits(i, 0) >= logits(i, 1) ? 1.0 : -1.0;
    dhat_grads(i, 0) = sign;
    dhat_grads(i, 1) = -sign;
  }
  const Matrix grad_dhat = backward(net, trace, dhat_grads, GradientTargets::inputs).input_grads;

  std::vector<DistanceReport> reports(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    DistanceReport& r = reports[i];
    const double g0 = logits(i, 0);
    const double g1 = logits(i, 1);
    r.f0 = probs[i].f0;
    r.d_hat = logit_distance(g0, g1);
    r.grad_norm_prob_gap = grad_prob_gap.row(i).norm();
    r.grad_norm_dhat = grad_dhat.row(i).norm();
    // Flatness is judged on grad d_hat; grad(f0 - f1) is that vector times 2 f0 f1, which
    // only underflows for points absurdly far from the boundary.
    if (r.grad_norm_dhat < kDegenerateGradNorm) continue;
    r.theorem1_value = theorem1_rhs(r.d_hat, r.grad_norm_dhat);
    if (r.grad_norm_prob_gap > 0.0) r.d_margin = std::abs(probability_gap(g0, g1)) / r.grad_norm_prob_gap;
  }
  return reports;
}

DistanceReport margin_distance(const Network& net, const RowVector& x) {
  Matrix row(1, x.size());
  row.row(0) = x;
  return margin_distances(net, row).front();
}

double corollary1_gap(const DistanceReport& report) {
  if (!report.d_margin) throw std::domain_error("corollary1_gap: margin distance undefined (flat gradient)");
  const double d = *report.d_margin;
  if (d == 0.0 && report.d_hat == 0.0) return 0.0;
  return std::abs(d - report.d_hat) / std::max(d, 1e-12);
}

double corollary1_gap(const Network& net, const RowVector& x) { return corollary1_gap(margin_distance(net, x)); }

}  // namespace fairmargin
