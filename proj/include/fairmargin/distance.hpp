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

#ifndef FAIRMARGIN_DISTANCE_HPP_
#define FAIRMARGIN_DISTANCE_HPP_

#include <cmath>
#include <optional>

#include "fairmargin/netcore.hpp"

namespace fairmargin {

/// Below this the input gradient is considered flat and the margin
/// distance is left undefined.
inline constexpr double kDegenerateGradNorm = 1e-12;

/// Two views of how far a point sits from the decision boundary.
///
/// `d_hat` is the logit gap |g0 - g1|. `d_margin` is the linearised
/// input-space distance |f0 - f1| / ||grad_x f0 - grad_x f1||, computed from
/// softmax probabilities and a backward pass through them. `theorem1_value`
/// recovers the same quantity from d_hat and ||grad_x d_hat|| alone, so the
/// two must agree to rounding.
struct DistanceReport {
  double d_hat = 0.0;
  std::optional<double> d_margin;
  std::optional<double> theorem1_value;
  double grad_norm_dhat = 0.0;
  double grad_norm_prob_gap = 0.0;
  double f0 = 0.5;

  bool defined() const { return d_margin.has_value(); }
};

inline double logit_distance(double g0, double g1) { return std::abs(g0 - g1); }

/// (e^{2d} - 1) / (2 e^{d} ||grad d||). Throws when grad_norm is not positive.
double theorem1_rhs(double d_hat, double grad_norm_dhat);

DistanceReport margin_distance(const Network& net, const RowVector& x);

/// Batched form of margin_distance, one report per row.
std::vector<DistanceReport> margin_distances(const Network& net, const Matrix& rows);

/// |d_margin - d_hat| / max(d_margin, 1e-12); zero on the boundary.
/// Throws std::domain_error when the margin distance is undefined.
double corollary1_gap(const DistanceReport& report);
double corollary1_gap(const Network& net, const RowVector& x);

}  // namespace fairmargin

#endif  // FAIRMARGIN_DISTANCE_HPP_
