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

#ifndef FAIRMARGIN_FAIRLOSS_HPP_
#define FAIRMARGIN_FAIRLOSS_HPP_

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "fairmargin/netcore.hpp"

namespace fairmargin {

/// Group membership for one binary protected attribute:
/// 0 = group a (privileged), 1 = group b.
using GroupIds = std::vector<std::uint8_t>;

struct LambdaWeights {
  double lambda_f = 0.0;
  double lambda_r = 0.0;

  void validate() const;
  bool vanilla() const { return lambda_f == 0.0 && lambda_r == 0.0; }
};

/// I_robust values below this are clamped before taking the reciprocal.
inline constexpr double kRobustnessFloor = 1e-6;

/// Per-row boundary distance and its derivative with respect to u = g0 - g1.
/// The logit form uses |u|; the margin form divides |f0 - f1| by a per-row
/// gradient norm that is held constant during differentiation.
struct BoundaryDistances {
  Vector value;
  Vector slope;
};

BoundaryDistances logit_boundary_distances(const Matrix& logits);
BoundaryDistances margin_boundary_distances(const Matrix& logits, const Vector& prob_gap_grad_norms);

/// What a negative-predicted row contributes to its group mean.
enum class RecourseCost {
  distance,            // boundary distance
  negative_indicator,  // 1, which turns the gap into demographic parity
};

/// |g0 - g1| when the row is predicted negative, else 0. Throws
/// std::invalid_argument when `predicted_label` is not the argmax of the logits.
double masked_distance(double g0, double g1, int predicted_label);

struct GroupGap {
  double value = 0.0;  // |mean_a - mean_b|, 0 when skipped
  double mean_a = 0.0;
  double mean_b = 0.0;
  int n_a = 0;
  int n_b = 0;
  bool skipped = false;  // one of the groups is absent
};

/// Group means divide by the full group sizes; positive predictions add 0.
GroupGap fairness_loss(const Matrix& logits, const GroupIds& groups, RecourseCost cost = RecourseCost::distance);
GroupGap fairness_loss(const BoundaryDistances& distances, std::span<const int> predictions, const GroupIds& groups,
                       RecourseCost cost = RecourseCost::distance);

/// Sum of the per-attribute gaps; skipped attributes contribute 0.
double multi_attribute_fairness_loss(const Matrix& logits, std::span<const GroupIds> attributes);

/// Mean |g0 - g1| over every row. Throws on an empty batch.
double robustness_index(const Matrix& logits);

struct LossBreakdown {
  double cross_entropy = 0.0;
  double fairness_loss = 0.0;
  double robustness_index = 0.0;
  double composite = 0.0;
  std::vector<double> per_attribute_fairness;
  std::vector<std::array<int, 2>> batch_group_counts;
  int skipped_attributes = 0;
  bool robustness_clamped = false;
};

LossBreakdown composite_loss(const Matrix& logits, std::span<const int> labels, std::span<const GroupIds> attributes,
                             const LambdaWeights& lambdas, const BoundaryDistances* distances = nullptr);
LossBreakdown composite_loss(const Matrix& logits, std::span<const int> labels, const GroupIds& groups,
                             const LambdaWeights& lambdas);

/// Exact gradient of the composite with respect to the logits, holding the
/// prediction mask and the |.| signs at their current values.
Matrix composite_loss_grad(const Matrix& logits, std::span<const int> labels, std::span<const GroupIds> attributes,
                           const LambdaWeights& lambdas, const BoundaryDistances* distances = nullptr);
Matrix composite_loss_grad(const Matrix& logits, std::span<const int> labels, const GroupIds& groups,
                           const LambdaWeights& lambdas);

struct LossAndGrad {
  LossBreakdown loss;
  Matrix grad;
};

LossAndGrad composite_loss_and_grad(const Matrix& logits, std::span<const int> labels,
                                    std::span<const GroupIds> attributes, const LambdaWeights& lambdas,
                                    const BoundaryDistances* distances = nullptr);

}  // namespace fairmargin

#endif  // FAIRMARGIN_FAIRLOSS_HPP_
