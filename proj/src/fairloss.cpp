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

#include "fairmargin/fairloss.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace fairmargin {

namespace {

void check_rows(const Matrix& logits, std::size_t n, const char* what) {
  if (logits.cols() != 2) throw std::invalid_argument("logits must have two columns");
  if (static_cast<std::size_t>(logits.rows()) != n) {
    throw std::invalid_argument(std::string(what) + " length does not match the logit rows");
  }
}

double row_cost(const BoundaryDistances& d, Eigen::Index i, RecourseCost cost) {
  return cost == RecourseCost::distance ? d.value(i) : 1.0;
}

// Shared by the loss-only and loss+gradient paths so both see identical sums.
LossAndGrad evaluate(const Matrix& logits, std::span<const int> labels, std::span<const GroupIds> attributes,
                     const LambdaWeights& lambdas, const BoundaryDistances* given, bool want_grad) {
  lambdas.validate();
  const Eigen::Index n = logits.rows();
  check_rows(logits, labels.size(), "labels");
  for (const auto& g : attributes) check_rows(logits, g.size(), "group ids");
  if (n == 0) throw std::invalid_argument("composite loss on an empty batch");

  BoundaryDistances own;
  if (!given) own = logit_boundary_distances(logits);
  const BoundaryDistances& dist = given ? *given : own;
  if (dist.value.size() != n || dist.slope.size() != n) throw std::invalid_argument("distance vector size mismatch");

  const std::vector<int> predictions = predict_from_logits(logits);
  const double inv_n = 1.0 / static_cast<double>(n);

  LossAndGrad out;
  LossBreakdown& b = out.loss;
  if (want_grad) out.grad = Matrix::Zero(n, 2);

  // cross-entropy: -log softmax(g)_y = logsumexp(g) - g_y
  double ce = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const int y = labels[i];
    if (y != 0 && y != 1) throw std::invalid_argument("labels must be 0 or 1");
    const double g0 = logits(i, 0);
    const double g1 = logits(i, 1);
    const double m = std::max(g0, g1);
    const double lse = m + std::log(std::exp(g0 - m) + std::exp(g1 - m));
    ce += lse - (y == 0 ? g0 : g1);
    if (want_grad) {
      const Probabilities p = softmax2(g0, g1);
      out.grad(i, 0) += (p.f0 - (y == 0 ? 1.0 : 0.0)) * inv_n;
      out.grad(i, 1) += (p.f1 - (y == 1 ? 1.0 : 0.0)) * inv_n;
    }
  }
  b.cross_entropy = ce * inv_n;

  // fairness: per attribute |mean_a - mean_b| over masked distances
  for (const auto& groups : attributes) {
    const GroupGap gap = fairness_loss(dist, predictions, groups);
    b.per_attribute_fairness.push_back(gap.value);
    b.batch_group_counts.push_back({gap.n_a, gap.n_b});
    if (gap.skipped) {
      ++b.skipped_attributes;
      continue;
    }
    b.fairness_loss += gap.value;
    if (want_grad && lambdas.lambda_f != 0.0) {
      const double sign = gap.mean_a >= gap.mean_b ? 1.0 : -1.0;
      const double wa = lambdas.lambda_f * sign / gap.n_a;
      const double wb = -lambdas.lambda_f * sign / gap.n_b;
      for (Eigen::Index i = 0; i < n; ++i) {
        if (predictions[i] != 0) continue;
        const double du = (groups[i] == 0 ? wa : wb) * dist.slope(i);
        out.grad(i, 0) += du;
        out.grad(i, 1) -= du;
      }
    }
  }

  // robustness: lambda_r / mean distance, clamped away from zero
  b.robustness_index = dist.value.mean();
  double denom = b.robustness_index;
  if (denom < kRobustnessFloor) {
    denom = kRobustnessFloor;
    b.robustness_clamped = true;
  }
  b.composite = b.cross_entropy + lambdas.lambda_f * b.fairness_loss;
  if (lambdas.lambda_r != 0.0) b.composite += lambdas.lambda_r / denom;
  if (want_grad && lambdas.lambda_r != 0.0 && !b.robustness_clamped) {
    const double w = -lambdas.lambda_r / (denom * denom) * inv_n;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double du = w * dist.slope(i);
      out.grad(i, 0) += du;
      out.grad(i, 1) -= du;
    }
  }
  return out;
}

}  // namespace

void LambdaWeights::validate() const {
  if (!std::isfinite(lambda_f) || !std::isfinite(lambda_r) || lambda_f < 0.0 || lambda_r < 0.0) {
    throw std::invalid_argument("lambda weights must be finite and nonnegative");
  }
}

BoundaryDistances logit_boundary_distances(const Matrix& logits) {
  BoundaryDistances d;
  const Eigen::Index n = logits.rows();
  d.value.resize(n);
  d.slope.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double u = logits(i, 0) - logits(i, 1);
    d.value(i) = std::abs(u);
    d.slope(i) = u >= 0.0 ? 1.0 : -1.0;
  }
  return d;
}

BoundaryDistances margin_boundary_distances(const Matrix& logits, const Vector& prob_gap_grad_norms) {
  const Eigen::Index n = logits.rows();
  if (prob_gap_grad_norms.size() != n) throw std::invalid_argument("one gradient norm per row is required");
  BoundaryDistances d;
  d.value.resize(n);
  d.slope.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double g0 = logits(i, 0);
    const double g1 = logits(i, 1);
    const double norm = std::max(prob_gap_grad_norms(i), 1e-12);
    const Probabilities p = softmax2(g0, g1);
    const double sign = g0 >= g1 ? 1.0 : -1.0;
    d.value(i) = std::abs(probability_gap(g0, g1)) / norm;
    // d|f0 - f1| / du = sign * 2 f0 f1
    d.slope(i) = sign * 2.0 * p.f0 * p.f1 / norm;
  }
  return d;
}

double masked_distance(double g0, double g1, int predicted_label) {
  if (predicted_label != predict_label(g0, g1)) {
    throw std::invalid_argument("masked_distance: predicted label does not match the logits");
  }
  return predicted_label == 0 ? std::abs(g0 - g1) : 0.0;
}

GroupGap fairness_loss(const BoundaryDistances& distances, std::span<const int> predictions, const GroupIds& groups,
                       RecourseCost cost) {
  const Eigen::Index n = distances.value.size();
  if (static_cast<std::size_t>(n) != predictions.size() || static_cast<std::size_t>(n) != groups.size()) {
    throw std::invalid_argument("fairness_loss: size mismatch");
  }
  GroupGap gap;
  double sum_a = 0.0;
  double sum_b = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const bool in_a = groups[i] == 0;
    (in_a ? gap.n_a : gap.n_b) += 1;
    if (predictions[i] != 0) continue;
    (in_a ? sum_a : sum_b) += row_cost(distances, i, cost);
  }
  if (gap.n_a == 0 || gap.n_b == 0) {
    gap.skipped = true;
    return gap;
  }
  gap.mean_a = sum_a / gap.n_a;
  gap.mean_b = sum_b / gap.n_b;
  gap.value = std::abs(gap.mean_a - gap.mean_b);
  return gap;
}

GroupGap fairness_loss(const Matrix& logits, const GroupIds& groups, RecourseCost cost) {
  check_rows(logits, groups.size(), "group ids");
  const auto predictions = predict_from_logits(logits);
  return fairness_loss(logit_boundary_distances(logits), predictions, groups, cost);
}

double multi_attribute_fairness_loss(const Matrix& logits, std::span<const GroupIds> attributes) {
  if (attributes.empty()) throw std::invalid_argument("at least one protected attribute is required");
  double total = 0.0;
  for (const auto& groups : attributes) total += fairness_loss(logits, groups).value;
  return total;
}

double robustness_index(const Matrix& logits) {
  if (logits.rows() == 0) throw std::invalid_argument("robustness_index on an empty batch");
  if (logits.cols() != 2) throw std::invalid_argument("logits must have two columns");
  return (logits.col(0) - logits.col(1)).cwiseAbs().mean();
}

LossBreakdown composite_loss(const Matrix& logits, std::span<const int> labels, std::span<const GroupIds> attributes,
                             const LambdaWeights& lambdas, const BoundaryDistances* distances) {
  return evaluate(logits, labels, attributes, lambdas, distances, false).loss;
}

LossBreakdown composite_loss(const Matrix& logits, std::span<const int> labels, const GroupIds& groups,
                             const LambdaWeights& lambdas) {
  return composite_loss(logits, labels, std::span<const GroupIds>(&groups, 1), lambdas);
}

Matrix composite_loss_grad(const Matrix& logits, std::span<const int> labels, std::span<const GroupIds> attributes,
                           const LambdaWeights& lambdas, const BoundaryDistances* distances) {
  return evaluate(logits, labels, attributes, lambdas, distances, true).grad;
}

Matrix composite_loss_grad(const Matrix& logits, std::span<const int> labels, const GroupIds& groups,
                           const LambdaWeights& lambdas) {
  return composite_loss_grad(logits, labels, std::span<const GroupIds>(&groups, 1), lambdas);
}

LossAndGrad composite_loss_and_grad(const Matrix& logits, std::span<const int> labels,
                                    std::span<const GroupIds> attributes, const LambdaWeights& lambdas,
                                    const BoundaryDistances* distances) {
  return evaluate(logits, labels, attributes, lambdas, distances, true);
}

}  // namespace fairmargin
