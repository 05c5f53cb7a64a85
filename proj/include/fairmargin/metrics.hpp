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

#ifndef FAIRMARGIN_METRICS_HPP_
#define FAIRMARGIN_METRICS_HPP_

#include <array>
#include <optional>
#include <span>
#include <string>

#include <json.hpp>

#include "fairmargin/data.hpp"
#include "fairmargin/fairloss.hpp"
#include "fairmargin/netcore.hpp"

namespace fairmargin {

/// exp(-loss). Throws std::domain_error for a negative loss.
double fairness_index(double fairness_loss);

struct Confusion {
  long tp = 0;
  long fp = 0;
  long tn = 0;
  long fn = 0;

  long total() const { return tp + fp + tn + fn; }
  std::optional<double> tpr() const;
  std::optional<double> fpr() const;
};

/// One evaluated model on one attribute. Undefined rates stay empty and
/// print as "n/a".
struct MetricReport {
  std::string attribute;
  long rows = 0;
  double accuracy = 0.0;
  double fairness_loss = 0.0;
  double i_fair = 1.0;
  double i_robust = 0.0;
  std::optional<double> delta_tpr;
  std::optional<double> delta_fpr;
  std::array<Confusion, 2> per_group_confusion{};  // [group a, group b]
  std::optional<double> delta_burden;
};

MetricReport evaluate_logits(const Matrix& logits, std::span<const int> labels, const GroupAttribute& attribute);
MetricReport evaluate(const Network& net, const EncodedDataset& data, const std::string& attribute);
/// One report per attribute from a single forward pass.
std::vector<MetricReport> evaluate_all(const Network& net, const EncodedDataset& data,
                                       std::span<const std::string> attributes);

nlohmann::json to_json(const MetricReport& report);

/// Fixed column order for per-model CSV rows.
inline constexpr std::array<const char*, 10> kMetricCsvColumns = {
    "dataset", "lambda_f", "lambda_r", "seed", "accuracy", "i_fair", "i_robust", "delta_tpr", "delta_fpr",
    "delta_burden"};

std::string metric_csv_header();
std::string metric_csv_row(const std::string& dataset, const LambdaWeights& lambdas, std::uint64_t seed,
                           const MetricReport& report);

/// "n/a" for empty, otherwise shortest round-trip formatting.
std::string format_optional(const std::optional<double>& v);
std::string format_double(double v);

}  // namespace fairmargin

#endif  // FAIRMARGIN_METRICS_HPP_
