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

#include "fairmargin/cfburden.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>

namespace fairmargin {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Feasible individuals always outrank infeasible ones. Within the feasible
// tier the key is -distance; within the infeasible tier it is the logit
// margin toward the target class, so the search still has a gradient to
// climb before the first flip.
struct Fitness {
  bool feasible = false;
  double key = -kInf;
};

bool fitter(const Fitness& a, const Fitness& b) {
  if (a.feasible != b.feasible) return a.feasible;
  return a.key > b.key;
}

void random_individual(Eigen::Ref<RowVector> out, std::span<const ColumnMeta> columns, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  out.setZero();
  for (const auto& c : columns) {
    if (c.kind == ColumnKind::numeric) {
      out(c.offset) = unit(rng);
    } else if (c.width > 0) {
      std::uniform_int_distribution<int> level(0, c.width - 1);
      out(c.offset + level(rng)) = 1.0;
    }
  }
}

int active_level(const RowVector& v, const ColumnMeta& c) {
  for (int j = 0; j < c.width; ++j) {
    if (v(c.offset + j) > 0.5) return j;
  }
  return -1;
}

}  // namespace

void GAConfig::validate() const {
  if (population_size < 4) throw std::invalid_argument("GA population must be at least 4");
  if (generations < 1) throw std::invalid_argument("GA needs at least one generation");
  if (mutation_rate < 0.0 || mutation_rate > 1.0) throw std::invalid_argument("mutation rate must be in [0,1]");
  if (crossover_rate < 0.0 || crossover_rate > 1.0) throw std::invalid_argument("crossover rate must be in [0,1]");
  if (elitism_count < 0 || elitism_count >= population_size) {
    throw std::invalid_argument("elitism count must be in [0, population)");
  }
  if (!(mutation_sigma > 0.0)) throw std::invalid_argument("mutation sigma must be positive");
  if (tournament_size < 1) throw std::invalid_argument("tournament size must be positive");
}

double counterfactual_distance(const RowVector& x, const RowVector& candidate, std::span<const ColumnMeta> columns) {
  double sq = 0.0;
  int categorical = 0;
  int changed = 0;
  for (const auto& c : columns) {
    if (c.kind == ColumnKind::numeric) {
      const double d = x(c.offset) - candidate(c.offset);
      sq += d * d;
    } else {
      ++categorical;
      if (active_level(x, c) != active_level(candidate, c)) ++changed;
    }
  }
  double dist = std::sqrt(sq);
  if (categorical > 0) dist += static_cast<double>(changed) / categorical;
  return dist;
}

std::uint64_t derive_row_seed(std::uint64_t global_seed, std::uint64_t row_index) {
  // splitmix64 over the combined key
  std::uint64_t z = global_seed + 0x9E3779B97F4A7C15ULL * (row_index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

CounterfactualResult find_counterfactual(const Network& net, const RowVector& x, std::span<const ColumnMeta> columns,
                                         const GAConfig& cfg, std::optional<int> target_class) {
  cfg.validate();
  if (x.size() != net.input_width()) throw std::invalid_argument("counterfactual query has the wrong width");

  CounterfactualResult result;
  Matrix xrow(1, x.size());
  xrow.row(0) = x;
  result.original_label = predict(net, xrow).front();
  const int target = target_class.value_or(1 - result.original_label);
  if (target != 0 && target != 1) throw std::invalid_argument("target class must be 0 or 1");
  if (target == result.original_label) {
    result.counterfactual = x;
    result.distance = 0.0;
    result.already_target = true;
    return result;
  }

  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> step(0.0, cfg.mutation_sigma);
  const int pop = cfg.population_size;
  const Eigen::Index d = x.size();

  Matrix population(pop, d);
  for (int i = 0; i < pop; ++i) random_individual(population.row(i), columns, rng);

  std::vector<Fitness> fitness(static_cast<std::size_t>(pop));
  RowVector best;
  double best_distance = kInf;

  auto score = [&]() {
    const Matrix logits = forward_logits(net, population);
    for (int i = 0; i < pop; ++i) {
      const int label = predict_label(logits(i, 0), logits(i, 1));
      Fitness& f = fitness[i];
      if (label == target) {
        f.feasible = true;
        f.key = -counterfactual_distance(x, population.row(i), columns);
        if (-f.key < best_distance) {
          best_distance = -f.key;
          best = population.row(i);
        }
      } else {
        f.feasible = false;
        f.key = target == 1 ? logits(i, 1) - logits(i, 0) : logits(i, 0) - logits(i, 1);
      }
    }
    result.best_distance_history.push_back(best_distance);
  };

  auto tournament = [&]() {
    std::uniform_int_distribution<int> pick(0, pop - 1);
    int winner = pick(rng);
    for (int k = 1; k < cfg.tournament_size; ++k) {
      const int challenger = pick(rng);
      if (fitter(fitness[challenger], fitness[winner])) winner = challenger;
    }
    return winner;
  };

  score();
  std::vector<int> order(static_cast<std::size_t>(pop));
  Matrix next(pop, d);
  for (int gen = 0; gen < cfg.generations; ++gen) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return fitter(fitness[a], fitness[b]); });
    for (int e = 0; e < cfg.elitism_count; ++e) next.row(e) = population.row(order[e]);
    for (int i = cfg.elitism_count; i < pop; ++i) {
      const int p1 = tournament();
      if (unit(rng) < cfg.crossover_rate) {
        const int p2 = tournament();
        for (const auto& c : columns) {
          const int src = unit(rng) < 0.5 ? p1 : p2;
          next.row(i).segment(c.offset, c.width) = population.row(src).segment(c.offset, c.width);
        }
      } else {
        next.row(i) = population.row(p1);
      }
      for (const auto& c : columns) {
        if (unit(rng) >= cfg.mutation_rate) continue;
        if (c.kind == ColumnKind::numeric) {
          next(i, c.offset) = std::clamp(next(i, c.offset) + step(rng), 0.0, 1.0);
        } else if (c.width > 0) {
          std::uniform_int_distribution<int> level(0, c.width - 1);
          next.row(i).segment(c.offset, c.width).setZero();
          next(i, c.offset + level(rng)) = 1.0;
        }
      }
    }
    population.swap(next);
    score();
    result.generations_used = gen + 1;
  }

  if (best_distance < kInf) {
    result.flipped = true;
    result.counterfactual = best;
    result.distance = best_distance;
  } else {
    result.counterfactual = x;
    result.distance = 0.0;
  }
  return result;
}

GroupBurden burden(const Network& net, const EncodedDataset& data, const std::string& attribute, int group,
                   const GAConfig& cfg, const BurdenOptions& options) {
  if (group != 0 && group != 1) throw std::invalid_argument("group must be 0 or 1");
  const auto& ids = data.attribute(attribute).ids;
  const auto pred = predict(net, data.features);

  GroupBurden out;
  std::vector<std::size_t> negatives;
  for (std::size_t i = 0; i < data.rows(); ++i) {
    if (ids[i] != group) continue;
    ++out.group_rows;
    if (pred[i] == 0) negatives.push_back(i);
  }
  if (out.group_rows == 0) throw std::invalid_argument("burden: group is empty");
  out.negative_rows = negatives.size();
  if (negatives.empty()) {
    out.no_negatives = true;
    return out;
  }
  if (options.max_rows_per_group > 0 && negatives.size() > options.max_rows_per_group) {
    std::mt19937_64 rng(derive_row_seed(cfg.seed, 0xB0D5ULL + static_cast<std::uint64_t>(group)));
    std::shuffle(negatives.begin(), negatives.end(), rng);
    negatives.resize(options.max_rows_per_group);
    std::sort(negatives.begin(), negatives.end());
  }

  double sum = 0.0;
  for (auto i : negatives) {
    GAConfig row_cfg = cfg;
    row_cfg.seed = derive_row_seed(cfg.seed, i);
    const RowVector x = data.features.row(static_cast<Eigen::Index>(i));
    const auto cf = find_counterfactual(net, x, data.columns, row_cfg, 1);
    ++out.searched;
    if (!cf.flipped) {
      ++out.non_flips;
      continue;
    }
    sum += cf.distance;
  }
  const std::size_t used = out.searched - out.non_flips;
  out.burden = used > 0 ? sum / static_cast<double>(used) : 0.0;
  return out;
}

BurdenAudit delta_burden(const Network& net, const EncodedDataset& data, const std::string& attribute,
                         const GAConfig& cfg, const BurdenOptions& options) {
  BurdenAudit audit;
  audit.attribute = attribute;
  audit.config = cfg;
  audit.options = options;
  audit.groups[0] = burden(net, data, attribute, 0, cfg, options);
  audit.groups[1] = burden(net, data, attribute, 1, cfg, options);
  audit.delta_burden = std::abs(audit.groups[0].burden - audit.groups[1].burden);
  return audit;
}

nlohmann::json to_json(const GAConfig& cfg) {
  return {{"population_size", cfg.population_size},
          {"generations", cfg.generations},
          {"mutation_rate", cfg.mutation_rate},
          {"crossover_rate", cfg.crossover_rate},
          {"elitism_count", cfg.elitism_count},
          {"seed", cfg.seed},
          {"distance", "l2_scaled_plus_matching"},
          {"mutation_sigma", cfg.mutation_sigma},
          {"tournament_size", cfg.tournament_size}};
}

nlohmann::json to_json(const BurdenAudit& audit) {
  nlohmann::json groups = nlohmann::json::array();
  for (const auto& g : audit.groups) {
    groups.push_back({{"burden", g.burden},
                      {"group_rows", g.group_rows},
                      {"negative_rows", g.negative_rows},
                      {"searched", g.searched},
                      {"non_flips", g.non_flips},
                      {"no_negatives", g.no_negatives}});
  }
  return {{"attribute", audit.attribute},
          {"groups", groups},
          {"delta_burden", audit.delta_burden},
          {"max_rows_per_group", audit.options.max_rows_per_group},
          {"ga_config", to_json(audit.config)}};
}

}  // namespace fairmargin
