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

#include "fairmargin/netcore.hpp"

#include <cmath>
#include <fstream>
#include <random>
#include <stdexcept>

namespace fairmargin {

namespace {

constexpr int kNetworkFormatVersion = 1;

void relu_inplace(Matrix& m) { m = m.cwiseMax(0.0); }

}  // namespace

void NetworkConfig::validate() const {
  if (layer_widths.size() < 3) {
    throw std::invalid_argument("network needs an input width, at least one hidden layer and an output width");
  }
  for (int w : layer_widths) {
    if (w <= 0) throw std::invalid_argument("layer widths must be positive");
  }
  if (layer_widths.back() != 2) {
    throw std::invalid_argument("output width must be exactly 2 (two logits)");
  }
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    throw std::invalid_argument("learning rate must be positive and finite");
  }
}

Network::Network(NetworkConfig config) : config_(std::move(config)) {
  config_.validate();
  layers_.reserve(config_.layer_count());
  for (std::size_t l = 0; l + 1 < config_.layer_widths.size(); ++l) {
    DenseLayer layer;
    layer.weights = Matrix::Zero(config_.layer_widths[l], config_.layer_widths[l + 1]);
    layer.bias = RowVector::Zero(config_.layer_widths[l + 1]);
    layers_.push_back(std::move(layer));
  }
}

std::size_t Network::parameter_count() const {
  std::size_t n = 0;
  for (const auto& layer : layers_) n += layer.weights.size() + layer.bias.size();
  return n;
}

bool Network::all_finite() const {
  for (const auto& layer : layers_) {
    if (!layer.weights.allFinite() || !layer.bias.allFinite()) return false;
  }
  return true;
}

LayerParams zeros_like(const Network& net) {
  LayerParams out;
  out.reserve(net.layers().size());
  for (const auto& layer : net.layers()) {
    out.push_back({Matrix::Zero(layer.weights.rows(), layer.weights.cols()), RowVector::Zero(layer.bias.size())});
  }
  return out;
}

Network init_network(const NetworkConfig& config) {
  Network net(config);
  std::mt19937_64 rng(config.seed);
  for (auto& layer : net.layers()) {
    const double limit = std::sqrt(6.0 / static_cast<double>(layer.weights.rows()));
    std::uniform_real_distribution<double> dist(-limit, limit);
    for (Eigen::Index i = 0; i < layer.weights.size(); ++i) layer.weights.data()[i] = dist(rng);
    layer.bias.setZero();
  }
  return net;
}

ForwardTrace forward(const Network& net, const Matrix& batch) {
  if (batch.cols() != net.input_width()) {
    throw std::invalid_argument("batch has " + std::to_string(batch.cols()) + " columns, network expects " +
                                std::to_string(net.input_width()));
  }
  ForwardTrace trace;
  trace.input = batch;
  const auto& layers = net.layers();
  trace.pre_activations.reserve(layers.size());
  trace.activations.reserve(layers.size());
  const Matrix* a = &trace.input;
  for (std::size_t l = 0; l < layers.size(); ++l) {
    Matrix z = (*a) * layers[l].weights;
    z.rowwise() += layers[l].bias;
    trace.pre_activations.push_back(z);
    if (l + 1 < layers.size()) relu_inplace(z);
    trace.activations.push_back(std::move(z));
    a = &trace.activations.back();
  }
  return trace;
}

Matrix forward_logits(const Network& net, const Matrix& batch) {
  if (batch.cols() != net.input_width()) {
    throw std::invalid_argument("batch has " + std::to_string(batch.cols()) + " columns, network expects " +
                                std::to_string(net.input_width()));
  }
  const auto& layers = net.layers();
  Matrix a = batch * layers[0].weights;
  a.rowwise() += layers[0].bias;
  for (std::size_t l = 1; l < layers.size(); ++l) {
    relu_inplace(a);
    Matrix z = a * layers[l].weights;
    z.rowwise() += layers[l].bias;
    a = std::move(z);
  }
  return a;
}

Probabilities softmax2(double g0, double g1) {
  if (!std::isfinite(g0) || !std::isfinite(g1)) throw std::domain_error("softmax2: non-finite logit");
  const double m = std::max(g0, g1);
  const double e0 = std::exp(g0 - m);
  const double e1 = std::exp(g1 - m);
  const double s = e0 + e1;
  return {e0 / s, e1 / s};
}

double probability_gap(double g0, double g1) {
  // (e^g0 - e^g1) / (e^g0 + e^g1) = -expm1(-|u|) / (1 + e^{-|u|}) with sign(u), u = g0 - g1
  const double u = g0 - g1;
  const double t = std::exp(-std::abs(u));
  const double mag = -std::expm1(-std::abs(u)) / (1.0 + t);
  return u >= 0.0 ? mag : -mag;
}

BackwardResult backward(const Network& net, const ForwardTrace& trace, const Matrix& logit_grads,
                        GradientTargets targets) {
  const auto& layers = net.layers();
  if (trace.activations.size() != layers.size()) throw std::invalid_argument("trace does not match network depth");
  if (logit_grads.rows() != trace.rows() || logit_grads.cols() != 2) {
    throw std::invalid_argument("logit gradients must be shaped like the logits");
  }
  const bool want_params = targets != GradientTargets::inputs;
  const bool want_inputs = targets != GradientTargets::parameters;

  BackwardResult out;
  if (want_params) out.param_grads.resize(layers.size());

  Matrix delta = logit_grads;  // dL/dz for the current layer
  for (std::size_t li = layers.size(); li-- > 0;) {
    const Matrix& a_prev = li == 0 ? trace.input : trace.activations[li - 1];
    if (want_params) {
      out.param_grads[li].weights = a_prev.transpose() * delta;
      out.param_grads[li].bias = delta.colwise().sum();
    }
    if (li == 0) {
      if (want_inputs) out.input_grads = delta * layers[0].weights.transpose();
      break;
    }
    Matrix upstream = delta * layers[li].weights.transpose();
    const Matrix& z_prev = trace.pre_activations[li - 1];
    delta = upstream.cwiseProduct((z_prev.array() > 0.0).cast<double>().matrix());
  }
  return out;
}

AdamState make_adam_state(const Network& net) {
  AdamState s;
  s.first_moment = zeros_like(net);
  s.second_moment = zeros_like(net);
  return s;
}

StepStatus optimizer_step(Network& net, const LayerParams& grads, AdamState& state) {
  auto& layers = net.layers();
  if (grads.size() != layers.size()) throw std::invalid_argument("gradient depth does not match network");
  for (std::size_t l = 0; l < layers.size(); ++l) {
    if (grads[l].weights.rows() != layers[l].weights.rows() || grads[l].weights.cols() != layers[l].weights.cols() ||
        grads[l].bias.size() != layers[l].bias.size()) {
      throw std::invalid_argument("gradient shape does not match layer " + std::to_string(l));
    }
    if (!grads[l].weights.allFinite() || !grads[l].bias.allFinite()) {
      state.aborted = true;
      return StepStatus::rejected_non_finite;
    }
  }
  if (state.first_moment.size() != layers.size()) state = make_adam_state(net);

  ++state.step;
  const double lr = net.config().learning_rate;
  const double c1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
  const double c2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));
  const double b1 = state.beta1;
  const double b2 = state.beta2;
  const double eps = state.epsilon;

  auto update = [&](auto& param, const auto& g, auto& m, auto& v) {
    m = b1 * m + (1.0 - b1) * g;
    v = b2 * v + (1.0 - b2) * g.cwiseProduct(g);
    param.array() -= lr * (m.array() / c1) / ((v.array() / c2).sqrt() + eps);
  };
  for (std::size_t l = 0; l < layers.size(); ++l) {
    update(layers[l].weights, grads[l].weights, state.first_moment[l].weights, state.second_moment[l].weights);
    update(layers[l].bias, grads[l].bias, state.first_moment[l].bias, state.second_moment[l].bias);
  }
  return StepStatus::applied;
}

std::vector<int> predict_from_logits(const Matrix& logits) {
  std::vector<int> labels(static_cast<std::size_t>(logits.rows()));
  for (Eigen::Index i = 0; i < logits.rows(); ++i) labels[i] = predict_label(logits(i, 0), logits(i, 1));
  return labels;
}

std::vector<int> predict(const Network& net, const Matrix& batch) {
  return predict_from_logits(forward_logits(net, batch));
}

nlohmann::json network_to_json(const Network& net, std::int64_t optimizer_steps) {
  nlohmann::json doc;
  doc["format"] = "fairmargin.network";
  doc["version"] = kNetworkFormatVersion;
  const auto& cfg = net.config();
  doc["config"] = {{"layer_widths", cfg.layer_widths},
                   {"activation", "relu"},
                   {"seed", cfg.seed},
                   {"learning_rate", cfg.learning_rate}};
  nlohmann::json layers = nlohmann::json::array();
  for (const auto& layer : net.layers()) {
    std::vector<double> w(layer.weights.data(), layer.weights.data() + layer.weights.size());
    std::vector<double> b(layer.bias.data(), layer.bias.data() + layer.bias.size());
    layers.push_back({{"rows", layer.weights.rows()}, {"cols", layer.weights.cols()}, {"weights", w}, {"bias", b}});
  }
  doc["layers"] = std::move(layers);
  doc["optimizer_step"] = optimizer_steps;
  return doc;
}

Network network_from_json(const nlohmann::json& doc, std::int64_t* optimizer_steps) {
  if (doc.value("format", "") != "fairmargin.network") throw std::runtime_error("not a fairmargin network document");
  const int version = doc.at("version").get<int>();
  if (version != kNetworkFormatVersion) {
    throw std::runtime_error("unsupported network document version " + std::to_string(version));
  }
  NetworkConfig cfg;
  const auto& c = doc.at("config");
  cfg.layer_widths = c.at("layer_widths").get<std::vector<int>>();
  if (c.value("activation", "relu") != "relu") throw std::runtime_error("unsupported activation");
  cfg.seed = c.at("seed").get<std::uint64_t>();
  cfg.learning_rate = c.at("learning_rate").get<double>();
  Network net(cfg);
  const auto& layers = doc.at("layers");
  if (layers.size() != net.layers().size()) throw std::runtime_error("layer count does not match config");
  for (std::size_t l = 0; l < layers.size(); ++l) {
    auto& layer = net.layers()[l];
    const auto w = layers[l].at("weights").get<std::vector<double>>();
    const auto b = layers[l].at("bias").get<std::vector<double>>();
    if (layers[l].at("rows").get<Eigen::Index>() != layer.weights.rows() ||
        layers[l].at("cols").get<Eigen::Index>() != layer.weights.cols() ||
        static_cast<Eigen::Index>(w.size()) != layer.weights.size() ||
        static_cast<Eigen::Index>(b.size()) != layer.bias.size()) {
      throw std::runtime_error("layer " + std::to_string(l) + " shape does not match config");
    }
    std::copy(w.begin(), w.end(), layer.weights.data());
    std::copy(b.begin(), b.end(), layer.bias.data());
  }
  if (!net.all_finite()) throw std::runtime_error("network document holds non-finite parameters");
  if (optimizer_steps) *optimizer_steps = doc.value("optimizer_step", std::int64_t{0});
  return net;
}

void save_network(const Network& net, const std::string& path, std::int64_t optimizer_steps,
                  const nlohmann::json& metadata) {
  auto doc = network_to_json(net, optimizer_steps);
  if (!metadata.is_null()) doc["metadata"] = metadata;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write network to " + path);
  out << doc.dump(1) << '\n';
  if (!out) throw std::runtime_error("failed writing network to " + path);
}

Network load_network(const std::string& path, nlohmann::json* metadata) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open network file " + path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("malformed network file " + path + ": " + e.what());
  }
  if (metadata) *metadata = doc.value("metadata", nlohmann::json::object());
  return network_from_json(doc);
}

}  // namespace fairmargin
