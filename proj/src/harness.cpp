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

#include "fairmargin/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>

#include "fairmargin/version.hpp"

namespace fairmargin {

namespace {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

const std::vector<std::string> kAggregatedMetrics = {"accuracy", "i_fair",    "fairness_loss", "i_robust",
                                                     "delta_tpr", "delta_fpr", "delta_burden"};

std::optional<double> metric_value(const MetricReport& r, const std::string& name) {
  if (name == "accuracy") return r.accuracy;
  if (name == "i_fair") return r.i_fair;
  if (name == "fairness_loss") return r.fairness_loss;
  if (name == "i_robust") return r.i_robust;
  if (name == "delta_tpr") return r.delta_tpr;
  if (name == "delta_fpr") return r.delta_fpr;
  if (name == "delta_burden") return r.delta_burden;
  throw std::invalid_argument("unknown metric '" + name + "'");
}

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// Per-row ||grad_x (f0 - f1)|| for a batch, from one input-gradient pass.
Vector prob_gap_grad_norms(const Network& net, const ForwardTrace& trace) {
  const Matrix& logits = trace.logits();
  Matrix lg(logits.rows(), 2);
  for (Eigen::Index i = 0; i < logits.rows(); ++i) {
    const Probabilities p = softmax2(logits(i, 0), logits(i, 1));
    lg(i, 0) = 2.0 * p.f0 * p.f1;
    lg(i, 1) = -2.0 * p.f0 * p.f1;
  }
  const Matrix g = backward(net, trace, lg, GradientTargets::inputs).input_grads;
  return g.rowwise().norm();
}

LossBreakdown full_split_loss(const Network& net, const EncodedDataset& data, std::span<const GroupIds> groups,
                              const RunConfig& run) {
  if (run.distance == DistanceMode::margin) {
    const ForwardTrace trace = forward(net, data.features);
    const BoundaryDistances d = margin_boundary_distances(trace.logits(), prob_gap_grad_norms(net, trace));
    return composite_loss(trace.logits(), data.labels, groups, run.lambdas, &d);
  }
  const Matrix logits = forward_logits(net, data.features);
  return composite_loss(logits, data.labels, groups, run.lambdas);
}

std::string run_tag(const RunConfig& run) {
  std::string tag = run.dataset + "_lf" + format_double(run.lambdas.lambda_f) + "_lr" +
                    format_double(run.lambdas.lambda_r);
  if (run.distance == DistanceMode::margin) tag += "_margin";
  return tag;
}

double round12(double v) { return std::round(v * 1e12) / 1e12; }

std::vector<double> average_ranks(std::span<const double> v) {
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return v[a] < v[b]; });
  std::vector<double> ranks(v.size());
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
    const double r = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[idx[k]] = r;
    i = j + 1;
  }
  return ranks;
}

void write_file(const std::filesystem::path& path, const std::string& content, std::vector<std::filesystem::path>& out) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write report file " + path.string());
  f << content;
  if (!f) throw std::runtime_error("failed writing report file " + path.string());
  out.push_back(path);
}

std::string timestamp_utc() {
  const std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

void RunConfig::validate() const {
  if (epochs < 1) throw std::invalid_argument("epochs must be at least 1");
  if (batch_size < 1) throw std::invalid_argument("batch size must be at least 1");
  if (hidden_widths.empty()) throw std::invalid_argument("at least one hidden layer is required");
  if (attributes.empty()) throw std::invalid_argument("at least one protected attribute is required");
  lambdas.validate();
  std::set<std::uint64_t> seen(replicate_seeds.begin(), replicate_seeds.end());
  if (seen.size() != replicate_seeds.size()) throw std::invalid_argument("replicate seeds must be distinct");
}

NetworkConfig RunConfig::network_config(int input_width, std::uint64_t seed) const {
  NetworkConfig cfg;
  cfg.layer_widths.push_back(input_width);
  cfg.layer_widths.insert(cfg.layer_widths.end(), hidden_widths.begin(), hidden_widths.end());
  cfg.layer_widths.push_back(2);
  cfg.seed = seed;
  cfg.learning_rate = learning_rate;
  cfg.validate();
  return cfg;
}

std::vector<std::string> RunConfig::evaluated_attributes() const {
  std::vector<std::string> out = attributes;
  for (const auto& a : report_attributes) {
    if (std::find(out.begin(), out.end(), a) == out.end()) out.push_back(a);
  }
  return out;
}

TrainOutcome train(const RunConfig& run, const EncodedSplit& data, std::uint64_t seed) {
  run.validate();
  const auto start = Clock::now();
  const EncodedDataset& tr = data.train;
  if (tr.rows() == 0) throw std::invalid_argument("training split is empty");

  std::vector<GroupIds> train_groups;
  for (const auto& a : run.attributes) train_groups.push_back(tr.attribute(a).ids);
  const std::vector<std::string> eval_attrs = run.evaluated_attributes();

  TrainOutcome out(seed, init_network(run.network_config(tr.width(), seed)));
  Network& net = out.network;
  AdamState adam = make_adam_state(net);
  // separate stream from the initialiser so shuffling never aliases weights
  std::mt19937_64 rng(seed ^ 0xA5A5A5A55A5A5A5AULL);

  // finite weights can still overflow the logits on the full splits
  auto record = [&](int epoch) {
    EpochRecord rec;
    rec.epoch = epoch;
    try {
      rec.train_loss = full_split_loss(net, tr, train_groups, run);
      rec.test = evaluate_all(net, data.test, eval_attrs);
    } catch (const std::domain_error&) {
      out.abort = TrainAbort{epoch, -1, "non-finite evaluation"};
      return;
    }
    out.epochs.push_back(std::move(rec));
  };
  if (run.record_curves) record(0);

  const std::size_t n = tr.rows();
  const auto bs = static_cast<std::size_t>(run.batch_size);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Matrix batch;
  std::vector<int> labels;
  std::vector<GroupIds> groups(train_groups.size());

  for (int epoch = 1; epoch <= run.epochs && !out.abort; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    int batch_no = 0;
    for (std::size_t startRow = 0; startRow < n; startRow += bs, ++batch_no) {
      const std::size_t m = std::min(bs, n - startRow);
      batch.resize(static_cast<Eigen::Index>(m), tr.features.cols());
      labels.resize(m);
      for (auto& g : groups) g.resize(m);
      for (std::size_t k = 0; k < m; ++k) {
        const std::size_t r = order[startRow + k];
        batch.row(static_cast<Eigen::Index>(k)) = tr.features.row(static_cast<Eigen::Index>(r));
        labels[k] = tr.labels[r];
        for (std::size_t a = 0; a < groups.size(); ++a) groups[a][k] = train_groups[a][r];
      }

      const ForwardTrace trace = forward(net, batch);
      if (!trace.logits().allFinite()) {
        out.abort = TrainAbort{epoch, batch_no, "non-finite loss"};
        break;
      }
      LossAndGrad lg;
      if (run.distance == DistanceMode::margin) {
        const BoundaryDistances d = margin_boundary_distances(trace.logits(), prob_gap_grad_norms(net, trace));
        lg = composite_loss_and_grad(trace.logits(), labels, groups, run.lambdas, &d);
      } else {
        lg = composite_loss_and_grad(trace.logits(), labels, groups, run.lambdas);
      }
      ++out.diagnostics.batches;
      out.diagnostics.fairness_skips += lg.loss.skipped_attributes;
      if (lg.loss.robustness_clamped && run.lambdas.lambda_r > 0.0) ++out.diagnostics.robustness_clamps;
      if (!std::isfinite(lg.loss.composite)) {
        out.abort = TrainAbort{epoch, batch_no, "non-finite loss"};
        break;
      }
      const LayerParams grads = backward(net, trace, lg.grad, GradientTargets::parameters).param_grads;
      if (optimizer_step(net, grads, adam) != StepStatus::applied) {
        out.abort = TrainAbort{epoch, batch_no, "non-finite gradient"};
        break;
      }
      if (!net.all_finite()) {
        out.abort = TrainAbort{epoch, batch_no, "non-finite parameters"};
        break;
      }
    }
    if (!out.abort && run.record_curves) record(epoch);
  }
  out.optimizer_steps = adam.step;
  try {
    out.final_test = evaluate_all(net, data.test, eval_attrs);
  } catch (const std::domain_error&) {
    out.final_test.clear();
    if (!out.abort) out.abort = TrainAbort{run.epochs, -1, "non-finite evaluation"};
  }
  out.wall_seconds = seconds_since(start);
  return out;
}

std::vector<MetricAggregate> aggregate_reports(const std::vector<std::vector<MetricReport>>& per_seed) {
  std::vector<MetricAggregate> out;
  if (per_seed.empty()) return out;
  const std::size_t n_attr = per_seed.front().size();
  for (std::size_t a = 0; a < n_attr; ++a) {
    for (const auto& name : kAggregatedMetrics) {
      std::vector<double> values;
      for (const auto& reports : per_seed) {
        if (auto v = metric_value(reports.at(a), name)) values.push_back(*v);
      }
      MetricAggregate agg;
      agg.attribute = per_seed.front()[a].attribute;
      agg.metric = name;
      agg.count = values.size();
      if (!values.empty()) {
        agg.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
      }
      if (values.size() >= 2) {
        double ss = 0.0;
        for (double v : values) ss += (v - agg.mean) * (v - agg.mean);
        agg.stddev = std::sqrt(ss / static_cast<double>(values.size() - 1));
      }
      out.push_back(std::move(agg));
    }
  }
  return out;
}

const MetricAggregate& RunResult::metric(const std::string& name, const std::string& attribute) const {
  const std::string attr = attribute.empty() ? config.evaluated_attributes().front() : attribute;
  for (const auto& m : aggregate) {
    if (m.metric == name && m.attribute == attr) return m;
  }
  throw std::out_of_range("no aggregate for metric '" + name + "' on attribute '" + attr + "'");
}

RunResult replicate(const RunConfig& run, const EncodedSplit& data) {
  run.validate();
  if (run.replicate_seeds.empty()) throw std::invalid_argument("replicate needs at least one seed");
  const auto start = Clock::now();
  RunResult result;
  result.config = run;
  std::vector<std::vector<MetricReport>> finals;
  for (auto seed : run.replicate_seeds) {
    TrainOutcome outcome = train(run, data, seed);
    if (outcome.abort) {
      result.failed = true;
      result.failure = "seed " + std::to_string(seed) + " aborted at epoch " + std::to_string(outcome.abort->epoch) +
                       ", batch " + std::to_string(outcome.abort->batch) + ": " + outcome.abort->reason;
      result.runs.push_back(std::move(outcome));
      break;
    }
    finals.push_back(outcome.final_test);
    result.runs.push_back(std::move(outcome));
  }
  result.aggregate = aggregate_reports(finals);
  result.wall_seconds = seconds_since(start);
  return result;
}

const SweepCell& SweepResult::cell(double lambda_f, double lambda_r) const {
  for (const auto& c : cells) {
    if (c.lambdas.lambda_f == lambda_f && c.lambdas.lambda_r == lambda_r) return c;
  }
  throw std::out_of_range("no sweep cell at (" + format_double(lambda_f) + ", " + format_double(lambda_r) + ")");
}

SweepResult grid_sweep(const RunConfig& base, const EncodedSplit& data, std::span<const double> grid_f,
                       std::span<const double> grid_r, const SelectionRule& rule, const SweepProgress& progress) {
  if (grid_f.empty() || grid_r.empty()) throw std::invalid_argument("sweep grids must be nonempty");
  SweepResult sweep;
  sweep.base = base;
  for (double lf : grid_f) {
    for (double lr : grid_r) {
      SweepCell cell;
      cell.lambdas = {lf, lr};
      RunConfig cfg = base;
      cfg.lambdas = cell.lambdas;
      try {
        cell.result = replicate(cfg, data);
        if (cell.result->failed) cell.error = cell.result->failure;
      } catch (const std::exception& e) {
        cell.error = e.what();
      }
      if (progress) progress(cell);
      sweep.cells.push_back(std::move(cell));
    }
  }

  std::optional<double> baseline;
  for (const auto& c : sweep.cells) {
    if (c.lambdas.vanilla() && c.result && !c.result->failed) baseline = c.result->mean("accuracy");
  }
  if (!baseline) {
    RunConfig vanilla = base;
    vanilla.lambdas = {};
    const RunResult v = replicate(vanilla, data);
    if (!v.failed) baseline = v.mean("accuracy");
  }
  sweep.baseline_accuracy = baseline.value_or(0.0);

  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < sweep.cells.size(); ++i) {
    const auto& c = sweep.cells[i];
    if (!c.result || c.result->failed) continue;
    if (c.result->mean("accuracy") < sweep.baseline_accuracy - rule.accuracy_slack) continue;
    const double v = c.result->mean(rule.objective);
    if (v > best) {
      best = v;
      sweep.selected = i;
    }
  }
  return sweep;
}

std::vector<double> parse_grid(const std::string& text) {
  std::vector<double> out;
  auto to_d = [&](const std::string& s) {
    std::size_t pos = 0;
    double v = 0.0;
    try {
      v = std::stod(s, &pos);
    } catch (const std::exception&) {
      throw std::invalid_argument("bad grid value '" + s + "'");
    }
    if (pos != s.size()) throw std::invalid_argument("bad grid value '" + s + "'");
    return v;
  };
  if (text.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
    if (parts.size() != 3) throw std::invalid_argument("grid range must be start:stop:step");
    const double start = to_d(parts[0]);
    const double stop = to_d(parts[1]);
    const double step = to_d(parts[2]);
    if (!(step > 0.0) || stop < start) throw std::invalid_argument("grid range needs step > 0 and stop >= start");
    const auto count = static_cast<long>(std::floor((stop - start) / step + 1e-9));
    for (long k = 0; k <= count; ++k) out.push_back(round12(start + static_cast<double>(k) * step));
  } else {
    std::stringstream ss(text);
    for (std::string p; std::getline(ss, p, ',');) {
      if (!p.empty()) out.push_back(round12(to_d(p)));
    }
  }
  if (out.empty()) throw std::invalid_argument("empty grid");
  return out;
}

std::optional<double> spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("spearman: size mismatch");
  if (x.size() < 2) return std::nullopt;
  const auto rx = average_ranks(x);
  const auto ry = average_ranks(y);
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
  const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return std::nullopt;
  return sxy / std::sqrt(sxx * syy);
}

std::filesystem::path default_output_dir() {
  if (const char* env = std::getenv("FAIRMARGIN_OUTPUT_DIR"); env && *env) return env;
  return "fairmargin_out";
}

json to_json(const RunConfig& run) {
  return {{"dataset", run.dataset},
          {"hidden_widths", run.hidden_widths},
          {"learning_rate", run.learning_rate},
          {"lambda_f", run.lambdas.lambda_f},
          {"lambda_r", run.lambdas.lambda_r},
          {"epochs", run.epochs},
          {"batch_size", run.batch_size},
          {"seeds", run.replicate_seeds},
          {"attributes", run.attributes},
          {"report_attributes", run.report_attributes},
          {"distance", run.distance == DistanceMode::logit ? "logit" : "margin"}};
}

json to_json(const RunResult& result) {
  json runs = json::array();
  for (const auto& r : result.runs) {
    json finals = json::array();
    for (const auto& m : r.final_test) finals.push_back(to_json(m));
    json entry = {{"seed", r.seed},
                  {"wall_seconds", r.wall_seconds},
                  {"optimizer_steps", r.optimizer_steps},
                  {"batches", r.diagnostics.batches},
                  {"fairness_skips", r.diagnostics.fairness_skips},
                  {"robustness_clamps", r.diagnostics.robustness_clamps},
                  {"final_test", finals}};
    if (r.abort) {
      entry["abort"] = {{"epoch", r.abort->epoch}, {"batch", r.abort->batch}, {"reason", r.abort->reason}};
    }
    runs.push_back(std::move(entry));
  }
  json agg = json::array();
  for (const auto& a : result.aggregate) {
    agg.push_back({{"attribute", a.attribute},
                   {"metric", a.metric},
                   {"mean", a.count ? json(a.mean) : json(nullptr)},
                   {"std", a.stddev ? json(*a.stddev) : json(nullptr)},
                   {"count", a.count}});
  }
  return {{"config", to_json(result.config)},
          {"runs", runs},
          {"aggregate", agg},
          {"failed", result.failed},
          {"failure", result.failure},
          {"wall_seconds", result.wall_seconds}};
}

std::vector<std::filesystem::path> emit_report(const ReportInput& input, const std::filesystem::path& dir,
                                               std::span<const ReportFormat> formats) {
  std::vector<const RunResult*> all = input.runs;
  if (input.sweep) {
    for (const auto& c : input.sweep->cells) {
      if (c.result) all.push_back(&*c.result);
    }
  }
  if (all.empty() && (!input.sweep || input.sweep->cells.empty())) {
    throw std::invalid_argument("emit_report: nothing to report");
  }
  const bool csv = std::find(formats.begin(), formats.end(), ReportFormat::csv) != formats.end();

  std::error_code ec;
  std::filesystem::create_directories(dir / "curves", ec);
  if (ec) throw std::runtime_error("cannot create report directory " + dir.string() + ": " + ec.message());
  std::vector<std::filesystem::path> written;

  if (csv) {
    std::ostringstream summary;
    summary << "dataset,lambda_f,lambda_r,distance,attribute,seeds";
    for (const auto& m : kAggregatedMetrics) summary << ',' << m << "_mean," << m << "_std";
    summary << '\n';
    std::ostringstream per_seed;
    per_seed << metric_csv_header() << '\n';
    for (const RunResult* r : all) {
      const auto& cfg = r->config;
      for (const auto& attr : cfg.evaluated_attributes()) {
        summary << cfg.dataset << ',' << format_double(cfg.lambdas.lambda_f) << ','
                << format_double(cfg.lambdas.lambda_r) << ','
                << (cfg.distance == DistanceMode::logit ? "logit" : "margin") << ',' << attr << ','
                << r->runs.size();
        for (const auto& m : kAggregatedMetrics) {
          // aborted runs may leave no aggregate behind
          const auto it = std::find_if(r->aggregate.begin(), r->aggregate.end(), [&](const MetricAggregate& a) {
            return a.metric == m && a.attribute == attr;
          });
          if (it == r->aggregate.end() || it->count == 0) {
            summary << ",n/a," << format_optional(it == r->aggregate.end() ? std::nullopt : it->stddev);
          } else {
            summary << ',' << format_double(it->mean) << ',' << format_optional(it->stddev);
          }
        }
        summary << '\n';
      }
      for (const auto& run : r->runs) {
        if (!run.final_test.empty()) {
          per_seed << metric_csv_row(cfg.dataset, cfg.lambdas, run.seed, run.final_test.front()) << '\n';
        }
        if (run.epochs.empty()) continue;
        const std::string base = run_tag(cfg) + "_seed" + std::to_string(run.seed);
        std::ostringstream loss;
        loss << "epoch,cross_entropy,fairness_loss,robustness_index,composite\n";
        std::ostringstream test;
        test << "epoch,attribute,accuracy,i_fair,i_robust,delta_tpr,delta_fpr\n";
        for (const auto& e : run.epochs) {
          loss << e.epoch << ',' << format_double(e.train_loss.cross_entropy) << ','
               << format_double(e.train_loss.fairness_loss) << ',' << format_double(e.train_loss.robustness_index)
               << ',' << format_double(e.train_loss.composite) << '\n';
          for (const auto& t : e.test) {
            test << e.epoch << ',' << t.attribute << ',' << format_double(t.accuracy) << ','
                 << format_double(t.i_fair) << ',' << format_double(t.i_robust) << ','
                 << format_optional(t.delta_tpr) << ',' << format_optional(t.delta_fpr) << '\n';
          }
        }
        write_file(dir / "curves" / (base + "_loss.csv"), loss.str(), written);
        write_file(dir / "curves" / (base + "_test.csv"), test.str(), written);
      }
    }
    write_file(dir / "summary.csv", summary.str(), written);
    write_file(dir / "metrics.csv", per_seed.str(), written);

    if (input.sweep) {
      std::ostringstream sw;
      sw << "lambda_f,lambda_r,attribute,metric,mean,std,count,error\n";
      for (const auto& c : input.sweep->cells) {
        if (!c.result) {
          sw << format_double(c.lambdas.lambda_f) << ',' << format_double(c.lambdas.lambda_r) << ",,,,,0,\""
             << c.error << "\"\n";
          continue;
        }
        for (const auto& a : c.result->aggregate) {
          sw << format_double(c.lambdas.lambda_f) << ',' << format_double(c.lambdas.lambda_r) << ',' << a.attribute
             << ',' << a.metric << ',' << (a.count ? format_double(a.mean) : "n/a") << ','
             << format_optional(a.stddev) << ',' << a.count << ',' << (c.error.empty() ? "" : "\"" + c.error + "\"")
             << '\n';
        }
      }
      write_file(dir / "sweep.csv", sw.str(), written);
    }
  }

  json manifest;
  manifest["tool"] = "fairmargin";
  manifest["version"] = kVersion;
  manifest["compiler"] = __VERSION__;
  manifest["eigen"] = std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                      std::to_string(EIGEN_MINOR_VERSION);
  manifest["created_utc"] = timestamp_utc();
  json runs = json::array();
  for (const RunResult* r : input.runs) runs.push_back(to_json(*r));
  manifest["runs"] = runs;
  if (input.sweep) {
    json cells = json::array();
    for (const auto& c : input.sweep->cells) {
      json cell = {{"lambda_f", c.lambdas.lambda_f}, {"lambda_r", c.lambdas.lambda_r}, {"error", c.error}};
      if (c.result) cell["result"] = to_json(*c.result);
      cells.push_back(std::move(cell));
    }
    json sel = nullptr;
    if (input.sweep->selected) {
      const auto& c = input.sweep->cells[*input.sweep->selected];
      sel = {{"lambda_f", c.lambdas.lambda_f}, {"lambda_r", c.lambdas.lambda_r}};
    }
    manifest["sweep"] = {{"base", to_json(input.sweep->base)},
                         {"baseline_accuracy", input.sweep->baseline_accuracy},
                         {"selected", sel},
                         {"cells", cells}};
  }
  for (auto it = input.extra.begin(); it != input.extra.end(); ++it) manifest[it.key()] = it.value();
  write_file(dir / "manifest.json", manifest.dump(2) + "\n", written);
  return written;
}

}  // namespace fairmargin
