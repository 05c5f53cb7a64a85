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


// Shared fixtures for the unit tests.

#ifndef FAIRMARGIN_TESTS_SUPPORT_HPP_
#define FAIRMARGIN_TESTS_SUPPORT_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "fairmargin/netcore.hpp"

namespace fairmargin::testing {

inline std::filesystem::path data_dir() { return FAIRMARGIN_DATA_DIR; }

inline Network random_network(std::vector<int> widths, std::uint64_t seed) {
  NetworkConfig cfg;
  cfg.layer_widths = std::move(widths);
  cfg.seed = seed;
  return init_network(cfg);
}

/// Like init_network but with nonzero biases, so tests exercise every parameter.
inline Network random_network_with_bias(std::vector<int> widths, std::uint64_t seed) {
  Network net = random_network(std::move(widths), seed);
  std::mt19937_64 rng(seed + 1000);
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  for (auto& layer : net.layers()) {
    for (Eigen::Index j = 0; j < layer.bias.size(); ++j) layer.bias(j) = u(rng);
  }
  return net;
}

inline Matrix random_matrix(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed, double lo = 0.0,
                            double hi = 1.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(lo, hi);
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = u(rng);
  }
  return m;
}

inline Matrix logits_from(std::initializer_list<std::pair<double, double>> rows) {
  Matrix m(static_cast<Eigen::Index>(rows.size()), 2);
  Eigen::Index i = 0;
  for (const auto& [g0, g1] : rows) {
    m(i, 0) = g0;
    m(i, 1) = g1;
    ++i;
  }
  return m;
}

inline double relative_error(double a, double b, double floor = 1e-8) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), floor});
}

}  // namespace fairmargin::testing

#endif  // FAIRMARGIN_TESTS_SUPPORT_HPP_
