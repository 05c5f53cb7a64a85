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

#ifndef FAIRMARGIN_NETCORE_HPP_
#define FAIRMARGIN_NETCORE_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

namespace fairmargin {

/// Row-major so that one row is one sample.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;
using RowVector = Eigen::RowVectorXd;

enum class Activation { relu };

struct NetworkConfig {
  /// Input width, hidden widths, then the output width (always 2).
  std::vector<int> layer_widths;
  Activation activation = Activation::relu;
  std::uint64_t seed = 1;
  double learning_rate = 1e-3;

  /// Throws std::invalid_argument when the config cannot describe a network.
  void validate() const;
  int input_width() const { return layer_widths.front(); }
  std::size_t layer_count() const { return layer_widths.size() - 1; }
};

/// Affine map z = a * weights + bias; weights is (fan_in x fan_out).
struct DenseLayer {
  Matrix weights;
  RowVector bias;
};

using LayerParams = std::vector<DenseLayer>;

class Network {
 public:
  /// All-zero parameters shaped by `config`.
  explicit Network(NetworkConfig config);

  const NetworkConfig& config() const { return config_; }
  const LayerParams& layers() const { return layers_; }
  LayerParams& layers() { return layers_; }

  std::size_t parameter_count() const;
  bool all_finite() const;
  int input_width() const { return config_.input_width(); }

 private:
  NetworkConfig config_;
  LayerParams layers_;
};

/// Pre-activations and activations per layer for one batch. The last
/// activation is the logit matrix (column 0 = g0, column 1 = g1).
struct ForwardTrace {
  Matrix input;
  std::vector<Matrix> pre_activations;
  std::vector<Matrix> activations;

  const Matrix& logits() const { return activations.back(); }
  Eigen::Index rows() const { return input.rows(); }
};

struct Probabilities {
  double f0;
  double f1;
};

struct BackwardResult {
  LayerParams param_grads;  // empty unless requested
  Matrix input_grads;       // empty unless requested
};

enum class GradientTargets { parameters, inputs, both };

/// Zero-valued gradient buffer shaped like the network parameters.
LayerParams zeros_like(const Network& net);

/// He-style uniform initialisation from a seeded generator.
Network init_network(const NetworkConfig& config);

ForwardTrace forward(const Network& net, const Matrix& batch);

/// Logits only, without keeping intermediates.
Matrix forward_logits(const Network& net, const Matrix& batch);

/// Two-class softmax with max subtraction. Throws on non-finite input.
Probabilities softmax2(double g0, double g1);

/// f0 - f1 evaluated without cancellation near the boundary.
double probability_gap(double g0, double g1);

/// Reverse-mode gradients of sum(logit_grads .* logits) with respect to
/// the parameters and/or the batch inputs.
BackwardResult backward(const Network& net, const ForwardTrace& trace, const Matrix& logit_grads,
                        GradientTargets targets = GradientTargets::both);

/// Adam moments; single writer.
struct AdamState {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::int64_t step = 0;
  bool aborted = false;
  LayerParams first_moment;
  LayerParams second_moment;
};

AdamState make_adam_state(const Network& net);

enum class StepStatus { applied, rejected_non_finite };

/// One Adam update at the network's configured learning rate. Non-finite
/// gradients leave the parameters untouched and set state.aborted.
StepStatus optimizer_step(Network& net, const LayerParams& grads, AdamState& state);

/// argmax over the two logits; ties go to class 0.
inline int predict_label(double g0, double g1) { return g1 > g0 ? 1 : 0; }
std::vector<int> predict_from_logits(const Matrix& logits);
std::vector<int> predict(const Network& net, const Matrix& batch);

/// Versioned JSON document. Round-trips values exactly.
nlohmann::json network_to_json(const Network& net, std::int64_t optimizer_steps = 0);
Network network_from_json(const nlohmann::json& doc, std::int64_t* optimizer_steps = nullptr);
void save_network(const Network& net, const std::string& path, std::int64_t optimizer_steps = 0,
                  const nlohmann::json& metadata = {});
Network load_network(const std::string& path, nlohmann::json* metadata = nullptr);

}  // namespace fairmargin

#endif  // FAIRMARGIN_NETCORE_HPP_
