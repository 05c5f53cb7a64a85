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

#ifndef FAIRMARGIN_CFBURDEN_HPP_
#define FAIRMARGIN_CFBURDEN_HPP_

// Input-space recourse oracle: a genetic search for the nearest input with
// the opposite prediction, and the groupwise burden built from it. It only
// calls the network through forward passes, so it is independent of the
// logit-space distances used during training.

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "fairmargin/data.hpp"
#include "fairmargin/netcore.hpp"

namespace fairmargin {

enum class CounterfactualMetric {
  /// Euclidean over scaled numerics + (changed categoricals) / (categorical count).
  l2_scaled_plus_matching,
};

struct GAConfig {
  int population_size = 100;
  int generations = 50;
  double mutation_rate = 0.1;
  double crossover_rate = 0.5;
  int elitism_count = 2;
  std::uint64_t seed = 0;
  CounterfactualMetric distance = CounterfactualMetric::l2_scaled_plus_matching;
  double mutation_sigma = 0.1;
  int tournament_size = 3;

  void validate() const;
};

struct CounterfactualResult {
  RowVector counterfactual;
  double distance = 0.0;
  bool flipped = false;         // prediction at counterfactual differs from x's
  bool already_target = false;  // x already has the requested class
  int original_label = 0;
  int generations_used = 0;
  /// Best feasible distance after each generation (+inf until one exists).
  std::vector<double> best_distance_history;
};

double counterfactual_distance(const RowVector& x, const RowVector& candidate, std::span<const ColumnMeta> columns);

/// Searches for the opposite class of predict(x), or `target_class` when given.
CounterfactualResult find_counterfactual(const Network& net, const RowVector& x, std::span<const ColumnMeta> columns,
                                         const GAConfig& cfg, std::optional<int> target_class = std::nullopt);

/// Seed for one row's search, independent of scheduling order.
std::uint64_t derive_row_seed(std::uint64_t global_seed, std::uint64_t row_index);

struct BurdenOptions {
  /// Cap on negative rows searched per group (seeded subsample); 0 = all.
  std::size_t max_rows_per_group = 0;
};

struct GroupBurden {
  double burden = 0.0;
  std::size_t group_rows = 0;
  std::size_t negative_rows = 0;
  std::size_t searched = 0;
  std::size_t non_flips = 0;
  bool no_negatives = false;
};

/// Mean counterfactual distance over the group's negative-predicted rows.
/// Searches that fail to flip are excluded and counted.
GroupBurden burden(const Network& net, const EncodedDataset& data, const std::string& attribute, int group,
                   const GAConfig& cfg, const BurdenOptions& options = {});

struct BurdenAudit {
  std::string attribute;
  std::array<GroupBurden, 2> groups{};
  double delta_burden = 0.0;
  GAConfig config;
  BurdenOptions options;
};

BurdenAudit delta_burden(const Network& net, const EncodedDataset& data, const std::string& attribute,
                         const GAConfig& cfg, const BurdenOptions& options = {});

nlohmann::json to_json(const GAConfig& cfg);
nlohmann::json to_json(const BurdenAudit& audit);

}  // namespace fairmargin

#endif  // FAIRMARGIN_CFBURDEN_HPP_
