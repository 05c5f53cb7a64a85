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

#include "fairmargin/metrics.hpp"

#include <charconv>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace fairmargin {

double fairness_index(double fairness_loss) {
  if (!(fairness_loss >= 0.0)) throw std::domain_error("fairness loss must be nonnegative");
  return std::exp(-fairness_loss);
}

std::optional<double> Confusion::tpr() const {
  if (tp + fn == 0) return std::nullopt;
  return static_cast<double>(tp) / static_cast<double>(tp + fn);
}

std::optional<double> Confusion::fpr() const {
  if (fp + tn == 0) return std::nullopt;
  return static_cast<double>(fp) / static_cast<double>(fp + tn);
}

MetricReport evaluate_logits(const Matrix& logits, std::span<const int> labels, const GroupAttribute& attribute) {
  const auto n = static_cast<std::size_t>(logits.rows());
  if (n == 0) throw std::invalid_argument("evaluate on an empty dataset");
  if (labels.size() != n || attribute.ids.size() != n) throw std::invalid_argument("evaluate: size mismatch");

  MetricReport r;
  r.attribute = attribute.name;
  r.rows = static_cast<long>(n);
  const auto pred = predict_from_logits(logits);
  long correct = 0;
  for (std::size_t i = 0; i < n; ++i) {
    Confusion& c = r.per_group_confusion[attribute.ids[i] == 0 ? 0 : 1];
    const bool y = labels[i] == 1;
    const bool p = pred[i] == 1;
    if (y == p) ++correct;
    if (y && p) ++c.tp;
    if (!y && p) ++c.fp;
    if (!y && !p) ++c.tn;
    if (y && !p) ++c.fn;
  }
  if (r.per_group_confusion[0].total() == 0 || r.per_group_confusion[1].total() == 0) {
    throw std::invalid_argument("evaluate: attribute '" + attribute.name + "' needs both groups present");
  }
  r.accuracy = static_cast<double>(correct) / static_cast<double>(n);

  const GroupGap gap = fairness_loss(logits, attribute.ids);
  r.fairness_loss = gap.value;
  r.i_fair = fairness_index(gap.value);
  r.i_robust = robustness_index(logits);

  const auto& a = r.per_group_confusion[0];
  const auto& b = r.per_group_confusion[1];
  if (a.tpr() && b.tpr()) r.delta_tpr = std::abs(*a.tpr() - *b.tpr());
  if (a.fpr() && b.fpr()) r.delta_fpr = std::abs(*a.fpr() - *b.fpr());
  return r;
}

MetricReport evaluate(const Network& net, const EncodedDataset& data, const std::string& attribute) {
  const Matrix logits = forward_logits(net, data.features);
  return evaluate_logits(logits, data.labels, data.attribute(attribute));
}

std::vector<MetricReport> evaluate_all(const Network& net, const EncodedDataset& data,
                                       std::span<const std::string> attributes) {
  const Matrix logits = forward_logits(net, data.features);
  std::vector<MetricReport> out;
  out.reserve(attributes.size());
  for (const auto& a : attributes) out.push_back(evaluate_logits(logits, data.labels, data.attribute(a)));
  return out;
}

nlohmann::json to_json(const MetricReport& r) {
  auto opt = [](const std::optional<double>& v) -> nlohmann::json {
    return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
  };
  nlohmann::json groups = nlohmann::json::array();
  for (const auto& c : r.per_group_confusion) {
    groups.push_back({{"tp", c.tp}, {"fp", c.fp}, {"tn", c.tn}, {"fn", c.fn}, {"tpr", opt(c.tpr())},
                      {"fpr", opt(c.fpr())}});
  }
  return {{"attribute", r.attribute},
          {"rows", r.rows},
          {"accuracy", r.accuracy},
          {"fairness_loss", r.fairness_loss},
          {"i_fair", r.i_fair},
          {"i_robust", r.i_robust},
          {"delta_tpr", opt(r.delta_tpr)},
          {"delta_fpr", opt(r.delta_fpr)},
          {"delta_burden", opt(r.delta_burden)},
          {"per_group_confusion", groups}};
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) return "nan";
  return std::string(buf, ptr);
}

std::string format_optional(const std::optional<double>& v) { return v ? format_double(*v) : "n/a"; }

std::string metric_csv_header() {
  std::string h;
  for (std::size_t i = 0; i < kMetricCsvColumns.size(); ++i) {
    if (i) h += ',';
    h += kMetricCsvColumns[i];
  }
  return h;
}

std::string metric_csv_row(const std::string& dataset, const LambdaWeights& lambdas, std::uint64_t seed,
                           const MetricReport& r) {
  std::ostringstream os;
  os << dataset << ',' << format_double(lambdas.lambda_f) << ',' << format_double(lambdas.lambda_r) << ',' << seed
     << ',' << format_double(r.accuracy) << ',' << format_double(r.i_fair) << ',' << format_double(r.i_robust) << ','
     << format_optional(r.delta_tpr) << ',' << format_optional(r.delta_fpr) << ',' << format_optional(r.delta_burden);
  return os.str();
}

}  // namespace fairmargin
