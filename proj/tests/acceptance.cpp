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


// Acceptance gate. Prints one PASS/FAIL line per criterion and exits
// nonzero when any criterion fails. Every threshold is a named constant.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "fairmargin/cfburden.hpp"
#include "fairmargin/data.hpp"
#include "fairmargin/distance.hpp"
#include "fairmargin/fairloss.hpp"
#include "fairmargin/harness.hpp"
#include "fairmargin/metrics.hpp"
#include "fairmargin/netcore.hpp"
#include "fairmargin/theorycheck.hpp"

using namespace fairmargin;

namespace {

// criterion 1
constexpr int kGradTriples = 20;
constexpr double kFdStep = 1e-6;
constexpr double kGradRelTol = 1e-4;
constexpr double kGradAbsFloor = 1e-6;  // denominator floor for near-zero derivatives
// criterion 2
constexpr int kIdentityNetworks = 10;
constexpr int kIdentityRows = 100;
constexpr double kIdentityTol = 1e-9;
// criterion 3
constexpr double kBand = 0.01;
constexpr double kCorollaryThreshold = 0.05;
// criterion 4
constexpr int kParityBatches = 50;
constexpr double kParityTol = 1e-12;
// criterion 5
constexpr double kVanillaAccCenter = 0.821;
constexpr double kVanillaAccBand = 0.02;
constexpr double kVanillaFairLo = 0.35;
constexpr double kVanillaFairHi = 0.65;
constexpr double kVanillaTprLo = 0.30;
constexpr double kVanillaTprHi = 0.50;
// criterion 6
constexpr double kFairLambda = 0.5;
constexpr double kFairIndexMin = 0.90;
constexpr double kAccSlack = 0.02;
constexpr double kFairTprMax = 0.12;
constexpr double kFairFprMax = 0.05;
// criterion 7
constexpr double kGermanLambdaF = 0.3;
constexpr double kGermanLambdaR = 0.4;
constexpr double kGermanFairMin = 0.88;
constexpr double kGermanAccMin = 0.72;
// criterion 8
constexpr double kBurdenReduction = 3.0;
constexpr std::size_t kBurdenRowsPerGroup = 300;
// criterion 9
constexpr int kToyStarts = 100;
constexpr double kGridStep = 0.005;
constexpr double kGaRatio = 1.3;
constexpr int kGaWithinRatioMin = 90;
// criterion 11
constexpr double kNoiseSe = 2.0;  // standard errors of the seed-mean difference
// timing line
constexpr double kParityRatioLo = 2.0 / 3.0;
constexpr double kParityRatioHi = 1.5;
constexpr double kMarginSlowdownMin = 1.1;
// sweep rank property
constexpr std::size_t kRankRowsPerGroup = 100;

struct Line {
  std::string id;
  std::string title;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

std::vector<Line> g_lines;

void report(Line line) {
  std::printf("%s  %-3s %s  [%s] (%.1fs)\n", line.pass ? "PASS" : "FAIL", line.id.c_str(), line.title.c_str(),
              line.detail.c_str(), line.seconds);
  std::fflush(stdout);
  g_lines.push_back(std::move(line));
}

template <typename F>
void run_criterion(const std::string& id, const std::string& title, F&& body) {
  const auto start = std::chrono::steady_clock::now();
  Line line{id, title};
  try {
    body(line);
  } catch (const std::exception& e) {
    line.pass = false;
    line.detail = std::string("exception: ") + e.what();
  }
  line.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  report(std::move(line));
}

std::string fmt(double v, int prec = 4) {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(prec);
  os << v;
  return os.str();
}

double rel_err(double a, double b) { return std::abs(a - b) / std::max({std::abs(a), std::abs(b), kGradAbsFloor}); }

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

// ---------------------------------------------------------------- criterion 1

struct Probe {
  std::vector<int> predictions;
  std::vector<int> u_signs;
  std::vector<int> gap_signs;
  std::vector<std::vector<bool>> relu_pattern;
  double loss = 0.0;

  bool same_regime(const Probe& o) const {
    return predictions == o.predictions && u_signs == o.u_signs && gap_signs == o.gap_signs &&
           relu_pattern == o.relu_pattern;
  }
};

Probe probe_logits(const Matrix& logits, std::span<const int> y, std::span<const GroupIds> attrs,
                   const LambdaWeights& w) {
  Probe p;
  p.predictions = predict_from_logits(logits);
  for (Eigen::Index i = 0; i < logits.rows(); ++i) p.u_signs.push_back(logits(i, 0) - logits(i, 1) >= 0.0 ? 1 : -1);
  for (const auto& g : attrs) {
    const auto gap = fairness_loss(logits, g);
    p.gap_signs.push_back(gap.mean_a >= gap.mean_b ? 1 : -1);
  }
  p.loss = composite_loss(logits, y, attrs, w).composite;
  return p;
}

Probe probe_network(const Network& net, const Matrix& x, std::span<const int> y, std::span<const GroupIds> attrs,
                    const LambdaWeights& w) {
  const ForwardTrace t = forward(net, x);
  Probe p = probe_logits(t.logits(), y, attrs, w);
  for (std::size_t l = 0; l + 1 < t.pre_activations.size(); ++l) {
    std::vector<bool> pattern;
    const Matrix& z = t.pre_activations[l];
    for (Eigen::Index i = 0; i < z.size(); ++i) pattern.push_back(z.data()[i] > 0.0);
    p.relu_pattern.push_back(std::move(pattern));
  }
  return p;
}

void criterion_gradients(Line& line) {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> in_w(2, 6);
  std::uniform_int_distribution<int> hid_w(2, 8);
  std::uniform_int_distribution<int> rows(6, 12);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  long checked = 0;
  long skipped = 0;
  long failures = 0;
  double worst = 0.0;
  for (int t = 0; t < kGradTriples; ++t) {
    NetworkConfig cfg;
    cfg.layer_widths = {in_w(rng), hid_w(rng), 2};
    cfg.seed = rng();
    Network net = init_network(cfg);
    for (auto& l : net.layers()) {
      for (Eigen::Index j = 0; j < l.bias.size(); ++j) l.bias(j) = unit(rng) - 0.5;
    }
    const int n = rows(rng);
    Matrix x(n, cfg.layer_widths[0]);
    for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = unit(rng);
    std::vector<int> y(static_cast<std::size_t>(n));
    std::vector<GroupIds> attrs(1, GroupIds(static_cast<std::size_t>(n)));
    for (int i = 0; i < n; ++i) {
      y[static_cast<std::size_t>(i)] = static_cast<int>(rng() % 2);
      attrs[0][static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(i % 2);
    }
    const LambdaWeights w{unit(rng), unit(rng)};

    const ForwardTrace trace = forward(net, x);
    const Matrix logit_grad = composite_loss_grad(trace.logits(), y, attrs, w);
    const auto bw = backward(net, trace, logit_grad, GradientTargets::both);

    auto compare = [&](double analytic, const Probe& up, const Probe& dn, const Probe& base) {
      if (!up.same_regime(base) || !dn.same_regime(base)) {
        ++skipped;
        return;
      }
      const double fd = (up.loss - dn.loss) / (2.0 * kFdStep);
      const double e = rel_err(analytic, fd);
      worst = std::max(worst, e);
      ++checked;
      if (e > kGradRelTol) ++failures;
    };

    // composite_loss_grad against finite differences in the logits
    const Matrix g = trace.logits();
    const Probe base_l = probe_logits(g, y, attrs, w);
    for (Eigen::Index i = 0; i < g.rows(); ++i) {
      for (int k = 0; k < 2; ++k) {
        Matrix gp = g;
        Matrix gm = g;
        gp(i, k) += kFdStep;
        gm(i, k) -= kFdStep;
        compare(logit_grad(i, k), probe_logits(gp, y, attrs, w), probe_logits(gm, y, attrs, w), base_l);
      }
    }
    // backward against finite differences of the composite in every parameter and input
    const Probe base_n = probe_network(net, x, y, attrs, w);
    for (std::size_t l = 0; l < net.layers().size(); ++l) {
      auto perturb = [&](double& slot, double analytic) {
        const double v0 = slot;
        slot = v0 + kFdStep;
        const Probe up = probe_network(net, x, y, attrs, w);
        slot = v0 - kFdStep;
        const Probe dn = probe_network(net, x, y, attrs, w);
        slot = v0;
        compare(analytic, up, dn, base_n);
      };
      auto& W = net.layers()[l].weights;
      for (Eigen::Index i = 0; i < W.rows(); ++i) {
        for (Eigen::Index j = 0; j < W.cols(); ++j) perturb(W(i, j), bw.param_grads[l].weights(i, j));
      }
      auto& b = net.layers()[l].bias;
      for (Eigen::Index j = 0; j < b.size(); ++j) perturb(b(j), bw.param_grads[l].bias(j));
    }
    Matrix xm = x;
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      for (Eigen::Index k = 0; k < x.cols(); ++k) {
        const double v0 = xm(i, k);
        xm(i, k) = v0 + kFdStep;
        const Probe up = probe_network(net, xm, y, attrs, w);
        xm(i, k) = v0 - kFdStep;
        const Probe dn = probe_network(net, xm, y, attrs, w);
        xm(i, k) = v0;
        compare(bw.input_grads(i, k), up, dn, base_n);
      }
    }
  }
  line.pass = failures == 0 && checked > 0;
  line.detail = std::to_string(checked) + " coordinates, " + std::to_string(failures) + " over tol " +
                fmt(kGradRelTol, 6) + ", worst rel " + fmt(worst, 8) + ", " + std::to_string(skipped) +
                " skipped at regime changes";
}

// ---------------------------------------------------------------- criterion 2

void criterion_identity(Line& line, const Network& trained, const Matrix& adult_rows) {
  std::mt19937_64 rng(77);
  std::uniform_int_distribution<int> width(2, 16);
  std::size_t violations = 0;
  std::size_t checked = 0;
  double worst = 0.0;
  bool all_pass = true;
  for (int k = 0; k < kIdentityNetworks; ++k) {
    NetworkConfig cfg;
    const int d = width(rng);
    cfg.layer_widths = {d, width(rng), width(rng), 2};
    cfg.seed = rng();
    Network net = init_network(cfg);
    std::uniform_real_distribution<double> u(-0.5, 0.5);
    for (auto& l : net.layers()) {
      for (Eigen::Index j = 0; j < l.bias.size(); ++j) l.bias(j) = u(rng);
    }
    Matrix x(kIdentityRows, d);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = unit(rng);
    const auto v = verify_theorem1(net, x, kIdentityTol);
    all_pass = all_pass && v.pass;
    violations += v.violations;
    checked += v.checked;
    if (v.worst) worst = std::max(worst, v.worst->relative_gap);
  }
  std::vector<Eigen::Index> picks(static_cast<std::size_t>(adult_rows.rows()));
  std::iota(picks.begin(), picks.end(), Eigen::Index{0});
  std::shuffle(picks.begin(), picks.end(), rng);
  picks.resize(kIdentityRows);
  const Matrix sample = adult_rows(picks, Eigen::all);
  const auto tv = verify_theorem1(trained, sample, kIdentityTol);
  all_pass = all_pass && tv.pass;
  violations += tv.violations;
  checked += tv.checked;
  if (tv.worst) worst = std::max(worst, tv.worst->relative_gap);
  line.pass = all_pass;
  line.detail = std::to_string(checked) + " rows over " + std::to_string(kIdentityNetworks) +
                " random nets + trained Adult (" + std::to_string(tv.degenerate) +
                " Adult rows flagged with zero gradient), violations " + std::to_string(violations) +
                ", worst rel gap " + fmt(worst, 14);
}

// ---------------------------------------------------------------- criterion 4

void criterion_parity(Line& line) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  std::uniform_int_distribution<int> size(2, 8);
  double worst = 0.0;
  long assignments = 0;
  for (int b = 0; b < kParityBatches; ++b) {
    const int n = size(rng);
    Matrix g(n, 2);
    for (Eigen::Index i = 0; i < g.size(); ++i) g.data()[i] = u(rng);
    if (b % 5 == 0) g(0, 1) = g(0, 0);  // include a tie
    // every group assignment with both groups present
    for (unsigned mask = 1; mask + 1 < (1u << n); ++mask) {
      GroupIds ids(static_cast<std::size_t>(n));
      double neg[2] = {0, 0};
      double cnt[2] = {0, 0};
      for (int i = 0; i < n; ++i) {
        const int grp = (mask >> i) & 1u;
        ids[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(grp);
        cnt[grp] += 1;
        if (!(g(i, 1) > g(i, 0))) neg[grp] += 1;
      }
      const double dp = std::abs(neg[0] / cnt[0] - neg[1] / cnt[1]);
      worst = std::max(worst, std::abs(fairness_loss(g, ids, RecourseCost::negative_indicator).value - dp));
      ++assignments;
    }
  }
  line.pass = worst <= kParityTol;
  line.detail = std::to_string(kParityBatches) + " batches, " + std::to_string(assignments) +
                " group assignments, max |diff| " + fmt(worst, 16);
}

// ---------------------------------------------------------------- criterion 9

void criterion_ga_bound(Line& line) {
  // toy model: a small net trained on the two-feature symmetric fixture
  EncodedSplit toy{make_synthetic(SyntheticKind::group_symmetric, 400, 90),
                   make_synthetic(SyntheticKind::group_symmetric, 400, 91)};
  RunConfig run;
  run.dataset = "toy";
  run.hidden_widths = {8, 8};
  run.learning_rate = 0.01;
  run.epochs = 50;
  run.batch_size = 32;
  run.attributes = {"group"};
  run.record_curves = false;
  const TrainOutcome model = train(run, toy, 3);
  const Network& net = model.network;

  const int n = static_cast<int>(std::lround(1.0 / kGridStep));
  Matrix grid((n + 1) * (n + 1), 2);
  for (int i = 0; i <= n; ++i) {
    for (int j = 0; j <= n; ++j) grid.row(i * (n + 1) + j) << i * kGridStep, j * kGridStep;
  }
  const auto grid_labels = predict(net, grid);
  const auto& cols = toy.train.columns;
  const double half_diagonal = kGridStep * std::sqrt(0.5);

  std::mt19937_64 rng(909);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  int starts = 0;
  int below = 0;
  int within = 0;
  double worst_ratio = 0.0;
  while (starts < kToyStarts) {
    RowVector x(2);
    x << unit(rng), unit(rng);
    const int own = predict(net, Matrix(x)).front();
    double best = std::numeric_limits<double>::infinity();
    for (Eigen::Index k = 0; k < grid.rows(); ++k) {
      if (grid_labels[static_cast<std::size_t>(k)] != own) best = std::min(best, (grid.row(k) - x).norm());
    }
    if (!std::isfinite(best) || best <= half_diagonal) continue;  // ratio undefined at the boundary itself
    GAConfig cfg;
    cfg.seed = derive_row_seed(5, static_cast<std::uint64_t>(starts));
    const auto cf = find_counterfactual(net, x, cols, cfg);
    ++starts;
    if (!cf.flipped || cf.distance < best - half_diagonal) ++below;
    const double ratio = cf.flipped ? cf.distance / best : std::numeric_limits<double>::infinity();
    worst_ratio = std::max(worst_ratio, ratio);
    if (ratio <= kGaRatio) ++within;
  }
  line.pass = below == 0 && within >= kGaWithinRatioMin;
  line.detail = std::to_string(kToyStarts) + " starts, " + std::to_string(below) + " below grid bound, " +
                std::to_string(within) + " within " + fmt(kGaRatio, 1) + "x, worst ratio " + fmt(worst_ratio, 3);
}

// ---------------------------------------------------------------- shared runs

bool bit_identical(const RunResult& a, const RunResult& b, const Matrix& probe_rows) {
  if (a.runs.size() != b.runs.size()) return false;
  for (std::size_t s = 0; s < a.runs.size(); ++s) {
    const auto& x = a.runs[s];
    const auto& y = b.runs[s];
    if (x.seed != y.seed || x.epochs.size() != y.epochs.size()) return false;
    if (forward_logits(x.network, probe_rows) != forward_logits(y.network, probe_rows)) return false;
    for (std::size_t l = 0; l < x.network.layers().size(); ++l) {
      if (x.network.layers()[l].weights != y.network.layers()[l].weights) return false;
      if (x.network.layers()[l].bias != y.network.layers()[l].bias) return false;
    }
    for (std::size_t e = 0; e < x.epochs.size(); ++e) {
      if (x.epochs[e].train_loss.composite != y.epochs[e].train_loss.composite) return false;
      for (std::size_t m = 0; m < x.epochs[e].test.size(); ++m) {
        const auto& p = x.epochs[e].test[m];
        const auto& q = y.epochs[e].test[m];
        if (p.accuracy != q.accuracy || p.fairness_loss != q.fairness_loss || p.i_robust != q.i_robust ||
            p.delta_tpr != q.delta_tpr || p.delta_fpr != q.delta_fpr) {
          return false;
        }
      }
    }
  }
  for (std::size_t i = 0; i < a.aggregate.size(); ++i) {
    if (a.aggregate[i].mean != b.aggregate[i].mean || a.aggregate[i].stddev != b.aggregate[i].stddev) return false;
  }
  return true;
}

std::string summary(const RunResult& r, const std::string& attr = {}) {
  auto opt = [&](const char* m) {
    const auto& a = r.metric(m, attr);
    return a.count ? fmt(a.mean) : std::string("n/a");
  };
  return "acc " + opt("accuracy") + " I_fair " + opt("i_fair") + " I_robust " + opt("i_robust") + " dTPR " +
         opt("delta_tpr") + " dFPR " + opt("delta_fpr");
}

}  // namespace

int main() {
  const auto start = std::chrono::steady_clock::now();
  const std::filesystem::path specs = std::filesystem::path(FAIRMARGIN_DATA_DIR) / "specs";

  run_criterion("1", "gradient correctness", criterion_gradients);
  run_criterion("4", "demographic-parity reduction", criterion_parity);
  run_criterion("9", "GA upper bound on a toy model", criterion_ga_bound);

  std::printf("loading Adult and German...\n");
  const DatasetSpec adult_spec = load_dataset_spec(specs / "adult.json");
  const EncodedSplit adult = load_and_encode(adult_spec);
  const DatasetSpec german_spec = load_dataset_spec(specs / "german.json");
  const EncodedSplit german = load_and_encode(german_spec);

  RunConfig vanilla_cfg;
  vanilla_cfg.dataset = "adult";
  vanilla_cfg.learning_rate = adult_spec.learning_rate;
  vanilla_cfg.hidden_widths = adult_spec.hidden_widths;
  vanilla_cfg.attributes = {"gender"};
  vanilla_cfg.report_attributes = {"race"};

  std::printf("training Adult vanilla replicate...\n");
  std::fflush(stdout);
  const RunResult vanilla = replicate(vanilla_cfg, adult);
  RunConfig fair_cfg = vanilla_cfg;
  fair_cfg.lambdas = {kFairLambda, kFairLambda};
  std::printf("training Adult regularised replicate...\n");
  std::fflush(stdout);
  const RunResult fair = replicate(fair_cfg, adult);
  const Network& trained = vanilla.runs.front().network;

  run_criterion("2", "closed-form margin identity", [&](Line& l) { criterion_identity(l, trained, adult.test.features); });

  run_criterion("3", "near-boundary approximation on trained Adult", [&](Line& l) {
    const auto c = verify_corollary1(trained, adult.test.features, kBand, kCorollaryThreshold);
    l.pass = !c.empty && c.median_gap <= kCorollaryThreshold;
    l.detail = std::to_string(c.considered) + " rows in band, median gap " + fmt(c.median_gap) + " (max " +
               fmt(c.max_gap) + "), median grad norm " + fmt(c.median_grad_norm) + ", threshold " +
               fmt(kCorollaryThreshold, 2);
  });

  run_criterion("5", "vanilla Adult reproduction", [&](Line& l) {
    if (vanilla.failed) throw std::runtime_error(vanilla.failure);
    const double acc = vanilla.mean("accuracy");
    const double ifair = vanilla.mean("i_fair");
    const double tpr = vanilla.mean("delta_tpr");
    const bool acc_ok = std::abs(acc - kVanillaAccCenter) <= kVanillaAccBand;
    const bool fair_ok = ifair >= kVanillaFairLo && ifair <= kVanillaFairHi;
    const bool tpr_ok = tpr >= kVanillaTprLo && tpr <= kVanillaTprHi;
    l.pass = acc_ok && fair_ok && tpr_ok;
    l.detail = summary(vanilla) + "; acc " + (acc_ok ? "ok" : "out") + ", I_fair " + (fair_ok ? "ok" : "out") +
               ", dTPR " + (tpr_ok ? "ok" : "out");
  });

  run_criterion("6", "regularised Adult reproduction", [&](Line& l) {
    if (fair.failed) throw std::runtime_error(fair.failure);
    const double ifair = fair.mean("i_fair");
    const double acc = fair.mean("accuracy");
    const double tpr = fair.mean("delta_tpr");
    const double fpr = fair.mean("delta_fpr");
    const double rob = fair.mean("i_robust");
    std::vector<std::string> misses;
    if (ifair < kFairIndexMin) misses.push_back("I_fair");
    if (acc < vanilla.mean("accuracy") - kAccSlack) misses.push_back("accuracy");
    if (tpr > kFairTprMax) misses.push_back("dTPR bound");
    if (fpr > kFairFprMax) misses.push_back("dFPR bound");
    if (!(rob > vanilla.mean("i_robust"))) misses.push_back("I_robust");
    if (!(ifair > vanilla.mean("i_fair"))) misses.push_back("I_fair direction");
    if (!(tpr < vanilla.mean("delta_tpr"))) misses.push_back("dTPR direction");
    if (!(fpr < vanilla.mean("delta_fpr"))) misses.push_back("dFPR direction");
    l.pass = misses.empty();
    std::string m;
    for (const auto& s : misses) m += (m.empty() ? "" : ", ") + s;
    l.detail = summary(fair) + " vs vanilla " + summary(vanilla) + (m.empty() ? "" : "; missed: " + m);
  });

  run_criterion("7", "German at (0.3, 0.4)", [&](Line& l) {
    RunConfig cfg;
    cfg.dataset = "german";
    cfg.learning_rate = german_spec.learning_rate;
    cfg.hidden_widths = german_spec.hidden_widths;
    cfg.attributes = {"age"};
    cfg.lambdas = {kGermanLambdaF, kGermanLambdaR};
    const RunResult r = replicate(cfg, german);
    if (r.failed) throw std::runtime_error(r.failure);
    l.pass = r.mean("i_fair") >= kGermanFairMin && r.mean("accuracy") >= kGermanAccMin;
    l.detail = summary(r);
  });

  run_criterion("8", "counterfactual burden reduction", [&](Line& l) {
    std::vector<double> dv;
    std::vector<double> df;
    BurdenOptions opt;
    opt.max_rows_per_group = kBurdenRowsPerGroup;
    for (std::size_t s = 0; s < vanilla.runs.size(); ++s) {
      GAConfig ga;
      ga.seed = vanilla.runs[s].seed;
      dv.push_back(delta_burden(vanilla.runs[s].network, adult.test, "gender", ga, opt).delta_burden);
      df.push_back(delta_burden(fair.runs[s].network, adult.test, "gender", ga, opt).delta_burden);
    }
    const double mv = mean_of(dv);
    const double mf = mean_of(df);
    l.pass = mf <= mv / kBurdenReduction;
    l.detail = "mean dBurden vanilla " + fmt(mv) + ", regularised " + fmt(mf) + ", reduction " + fmt(mv / mf, 2) +
               "x (need " + fmt(kBurdenReduction, 1) + "x), " + std::to_string(kBurdenRowsPerGroup) +
               " rows/group";
  });

  std::printf("running Adult sweep over {0, 0.5, 1}^2...\n");
  std::fflush(stdout);
  const std::vector<double> grid{0.0, 0.5, 1.0};
  const SweepResult sweep = grid_sweep(vanilla_cfg, adult, grid, grid, SelectionRule{}, [](const SweepCell& c) {
    std::printf("  cell (%.1f, %.1f) %s\n", c.lambdas.lambda_f, c.lambdas.lambda_r,
                c.error.empty() ? "done" : c.error.c_str());
    std::fflush(stdout);
  });

  run_criterion("10", "sweep vanilla cell equals an independent replicate", [&](Line& l) {
    const auto& cell = sweep.cell(0.0, 0.0);
    if (!cell.result) throw std::runtime_error("vanilla cell failed: " + cell.error);
    l.pass = bit_identical(*cell.result, vanilla, adult.test.features);
    l.detail = std::string(l.pass ? "networks, epoch series and aggregates identical"
                                  : "mismatch between sweep cell and replicate") +
               " over " + std::to_string(vanilla.runs.size()) + " seeds";
  });

  run_criterion("11", "robustness weight does not raise fairness", [&](Line& l) {
    const auto& lo = *sweep.cell(kFairLambda, 0.0).result;
    const auto& hi = *sweep.cell(kFairLambda, 1.0).result;
    const auto& a = lo.metric("i_fair");
    const auto& b = hi.metric("i_fair");
    const double se = std::sqrt(std::pow(a.stddev.value_or(0.0), 2) / static_cast<double>(a.count) +
                                std::pow(b.stddev.value_or(0.0), 2) / static_cast<double>(b.count));
    const double noise = kNoiseSe * se;
    l.pass = b.mean <= a.mean + noise;
    l.detail = "I_fair at lambda_R=0: " + fmt(a.mean) + ", at lambda_R=1: " + fmt(b.mean) + ", noise allowance " +
               fmt(noise);
  });

  run_criterion("12", "two protected attributes", [&](Line& l) {
    RunConfig cfg = fair_cfg;
    cfg.attributes = {"gender", "race"};
    cfg.report_attributes.clear();
    const RunResult multi = replicate(cfg, adult);
    if (multi.failed) throw std::runtime_error(multi.failure);
    const double vg = vanilla.mean("fairness_loss", "gender");
    const double vr = vanilla.mean("fairness_loss", "race");
    const double mg = multi.mean("fairness_loss", "gender");
    const double mr = multi.mean("fairness_loss", "race");
    const double acc = multi.mean("accuracy", "gender");
    l.pass = mg < vg && mr < vr && acc >= vanilla.mean("accuracy") - kAccSlack;
    l.detail = "gender loss " + fmt(vg) + " -> " + fmt(mg) + ", race loss " + fmt(vr) + " -> " + fmt(mr) +
               ", acc " + fmt(vanilla.mean("accuracy")) + " -> " + fmt(acc);
  });

  run_criterion("T", "training time: regularised ~ vanilla < margin mode", [&](Line& l) {
    auto timed = [&](RunConfig cfg) {
      cfg.record_curves = false;
      return train(cfg, adult, 1).wall_seconds;
    };
    RunConfig margin_cfg = fair_cfg;
    margin_cfg.distance = DistanceMode::margin;
    const double tv = timed(vanilla_cfg);
    const double tf = timed(fair_cfg);
    const double tm = timed(margin_cfg);
    const double parity = tf / tv;
    l.pass = parity >= kParityRatioLo && parity <= kParityRatioHi && tm >= kMarginSlowdownMin * std::max(tv, tf);
    l.detail = "vanilla " + fmt(tv, 2) + "s, regularised " + fmt(tf, 2) + "s, margin " + fmt(tm, 2) + "s";
  });

  run_criterion("P", "sweep rank agreement of I_fair and -dBurden", [&](Line& l) {
    std::vector<double> ifair;
    std::vector<double> neg_burden;
    BurdenOptions opt;
    opt.max_rows_per_group = kRankRowsPerGroup;
    for (const auto& c : sweep.cells) {
      if (!c.result || c.result->failed) continue;
      ifair.push_back(c.result->mean("i_fair"));
      GAConfig ga;
      ga.seed = c.result->runs.front().seed;
      neg_burden.push_back(-delta_burden(c.result->runs.front().network, adult.test, "gender", ga, opt).delta_burden);
    }
    const auto rho = spearman(ifair, neg_burden);
    l.pass = ifair.size() >= 9 && rho && *rho > 0.0;
    l.detail = std::to_string(ifair.size()) + " cells, Spearman rho " + (rho ? fmt(*rho, 3) : std::string("n/a"));
  });

  // machine-readable copy of the gate
  nlohmann::json doc = nlohmann::json::array();
  int failed = 0;
  for (const auto& line : g_lines) {
    doc.push_back({{"id", line.id}, {"title", line.title}, {"pass", line.pass}, {"detail", line.detail},
                   {"seconds", line.seconds}});
    if (!line.pass) ++failed;
  }
  try {
    const auto dir = default_output_dir() / "acceptance";
    std::filesystem::create_directories(dir);
    std::ofstream(dir / "acceptance.json") << doc.dump(2) << "\n";
    const ReportInput input{{&vanilla, &fair}, &sweep, {}};
    const std::vector<ReportFormat> formats{ReportFormat::csv, ReportFormat::json};
    emit_report(input, dir, formats);
  } catch (const std::exception& e) {
    std::printf("warning: could not write acceptance artifacts: %s\n", e.what());
  }
  const double total = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::printf("%d of %zu criteria passed (%.0fs)\n", static_cast<int>(g_lines.size()) - failed, g_lines.size(),
              total);
  return failed == 0 ? 0 : 1;
}
