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

#ifndef FAIRMARGIN_HARNESS_HPP_
#define FAIRMARGIN_HARNESS_HPP_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "fairmargin/data.hpp"
#include "fairmargin/fairloss.hpp"
#include "fairmargin/metrics.hpp"
#include "fairmargin/netcore.hpp"

namespace fairmargin {

/// Which boundary distance feeds the fairness and robustness terms.
enum class DistanceMode {
  logit,   // |g0 - g1|
  margin,  // |f0 - f1| / ||grad_x(f0 - f1)||, gradient norms frozen per batch
};

struct RunConfig {
  std::string dataset;
  std::vector<int> hidden_widths{30, 30};
  double learning_rate = 1e-3;
  LambdaWeights lambdas;
  int epochs = 100;
  int batch_size = 128;
  std::vector<std::uint64_t> replicate_seeds{1, 2, 3, 4, 5};
  /// Attributes entering the fairness term; the first is the reporting attribute.
  std::vector<std::string> attributes;
  /// Extra attributes evaluated on the test split but not trained on.
  std::vector<std::string> report_attributes;
  DistanceMode distance = DistanceMode::logit;
  /// Per-epoch full-split loss and test metrics.
  bool record_curves = true;

  void validate() const;
  NetworkConfig network_config(int input_width, std::uint64_t seed) const;
  std::vector<std::string> evaluated_attributes() const;
};

struct EpochRecord {
  int epoch = 0;  // 0 = before the first update
  LossBreakdown train_loss;
  std::vector<MetricReport> test;
};

struct TrainDiagnostics {
  long batches = 0;
  long fairness_skips = 0;  // attribute terms skipped because a group was absent
  long robustness_clamps = 0;
};

struct TrainAbort {
  int epoch = 0;
  int batch = 0;  // -1 = end-of-epoch evaluation
  std::string reason;
};

struct TrainOutcome {
  TrainOutcome(std::uint64_t s, Network net) : seed(s), network(std::move(net)) {}

  std::uint64_t seed = 0;
  Network network;
  std::vector<EpochRecord> epochs;
  std::vector<MetricReport> final_test;  // one per evaluated attribute
  TrainDiagnostics diagnostics;
  std::optional<TrainAbort> abort;
  std::int64_t optimizer_steps = 0;
  double wall_seconds = 0.0;
};

/// Seeded shuffle each epoch; forward, composite gradient, backward, Adam.
TrainOutcome train(const RunConfig& run, const EncodedSplit& data, std::uint64_t seed);

struct MetricAggregate {
  std::string attribute;
  std::string metric;
  double mean = 0.0;
  std::optional<double> stddev;  // sample std, needs two defined values
  std::size_t count = 0;         // seeds with a defined value
};

/// Mean and sample std per (attribute, metric) across seeds.
std::vector<MetricAggregate> aggregate_reports(const std::vector<std::vector<MetricReport>>& per_seed);

struct RunResult {
  RunConfig config;
  std::vector<TrainOutcome> runs;
  std::vector<MetricAggregate> aggregate;
  bool failed = false;
  std::string failure;
  double wall_seconds = 0.0;

  /// Throws std::out_of_range for an unknown pair; empty attribute = reporting attribute.
  const MetricAggregate& metric(const std::string& name, const std::string& attribute = {}) const;
  double mean(const std::string& name, const std::string& attribute = {}) const {
    return metric(name, attribute).mean;
  }
};

RunResult replicate(const RunConfig& run, const EncodedSplit& data);

/// Best-cell rule: maximise `objective` among cells whose accuracy is at
/// least the vanilla accuracy minus `accuracy_slack`.
struct SelectionRule {
  std::string objective = "i_fair";
  double accuracy_slack = 0.02;
};

struct SweepCell {
  LambdaWeights lambdas;
  std::optional<RunResult> result;
  std::string error;
};

struct SweepResult {
  RunConfig base;
  std::vector<SweepCell> cells;
  std::optional<std::size_t> selected;
  double baseline_accuracy = 0.0;

  const SweepCell& cell(double lambda_f, double lambda_r) const;
};

using SweepProgress = std::function<void(const SweepCell&)>;

SweepResult grid_sweep(const RunConfig& base, const EncodedSplit& data, std::span<const double> grid_f,
                       std::span<const double> grid_r, const SelectionRule& rule = {},
                       const SweepProgress& progress = {});

/// "start:stop:step" or a comma list; values rounded to 12 decimals.
std::vector<double> parse_grid(const std::string& text);

/// Rank correlation with average ranks for ties; nullopt for constant input.
std::optional<double> spearman(std::span<const double> x, std::span<const double> y);

enum class ReportFormat { json, csv };

struct ReportInput {
  std::vector<const RunResult*> runs;
  const SweepResult* sweep = nullptr;
  nlohmann::json extra = nlohmann::json::object();  // e.g. {"burden": ...}
};

/// Writes the summary CSV, per-run curve CSVs, the sweep long-form CSV (csv)
/// and a manifest (always). Returns the files written.
std::vector<std::filesystem::path> emit_report(const ReportInput& input, const std::filesystem::path& dir,
                                               std::span<const ReportFormat> formats);

/// $FAIRMARGIN_OUTPUT_DIR, else ./fairmargin_out.
std::filesystem::path default_output_dir();

nlohmann::json to_json(const RunConfig& run);
nlohmann::json to_json(const RunResult& result);

}  // namespace fairmargin

#endif  // FAIRMARGIN_HARNESS_HPP_
