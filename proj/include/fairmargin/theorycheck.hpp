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

#ifndef FAIRMARGIN_THEORYCHECK_HPP_
#define FAIRMARGIN_THEORYCHECK_HPP_

#include <optional>
#include <span>
#include <vector>

#include <json.hpp>

#include "fairmargin/distance.hpp"
#include "fairmargin/netcore.hpp"

namespace fairmargin {

struct IdentitySample {
  Eigen::Index row = 0;
  double d_hat = 0.0;
  double d_margin = 0.0;
  double theorem1_value = 0.0;
  double grad_norm_dhat = 0.0;
  double relative_gap = 0.0;  // |d_margin - theorem1_value| / max(d_margin, 1e-12)
  double f0 = 0.5;
  bool near_boundary = false;
};

/// Samples for every row with a nondegenerate gradient; `degenerate` counts the rest.
std::vector<IdentitySample> identity_samples(const Network& net, const Matrix& rows, double band = 0.01,
                                             std::size_t* degenerate = nullptr);

struct Theorem1Verdict {
  bool pass = false;
  bool monotonic = false;
  std::size_t checked = 0;
  std::size_t degenerate = 0;
  std::size_t violations = 0;
  double tolerance = 0.0;
  std::optional<IdentitySample> worst;
};

/// Every sample's relative gap must be within `tol`, and the closed form
/// must increase strictly with d_hat at a shared gradient norm.
Theorem1Verdict verify_theorem1(std::span<const IdentitySample> samples, double tol);
/// Throws std::domain_error when every row is degenerate.
Theorem1Verdict verify_theorem1(const Network& net, const Matrix& rows, double tol);

struct Corollary1Summary {
  std::size_t near_boundary = 0;
  std::size_t considered = 0;
  double median_gap = 0.0;
  double max_gap = 0.0;
  double median_grad_norm = 0.0;
  double band = 0.01;
  double threshold = 0.05;
  bool empty = true;
  bool pass = false;
};

/// Relative |d_margin - d_hat| / d_margin over rows with |f0 - 0.5| < band.
Corollary1Summary verify_corollary1(const Network& net, const Matrix& rows, double band = 0.01,
                                    double gap_threshold = 0.05);

nlohmann::json to_json(const IdentitySample& s);
nlohmann::json to_json(const Theorem1Verdict& v);
nlohmann::json to_json(const Corollary1Summary& s);

}  // namespace fairmargin

#endif  // FAIRMARGIN_THEORYCHECK_HPP_
