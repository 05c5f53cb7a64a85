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


// fairmargin: train, replicate, sweep and audit fairness-regularised nets.
// Artifacts land in $FAIRMARGIN_OUTPUT_DIR (default ./fairmargin_out).

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fairmargin/cfburden.hpp"
#include "fairmargin/data.hpp"
#include "fairmargin/harness.hpp"
#include "fairmargin/metrics.hpp"
#include "fairmargin/netcore.hpp"
#include "fairmargin/theorycheck.hpp"
#include "fairmargin/version.hpp"

namespace fs = std::filesystem;
using namespace fairmargin;

namespace {

constexpr int kExitAborted = 1;
constexpr int kExitError = 2;
constexpr int kExitCheckFailed = 3;

struct TrainArgs {
  std::string spec;
  double lambda_f = 0.0;
  double lambda_r = 0.0;
  int epochs = 100;
  int batch_size = 128;
  double learning_rate = 0.0;  // 0 = dataset default
  std::vector<int> hidden;     // empty = dataset default
  std::vector<std::string> attributes;
  std::vector<std::string> report_attributes;
  std::string distance = "logit";
  bool no_curves = false;
};

void add_train_options(CLI::App* cmd, TrainArgs& a) {
  cmd->add_option("--spec", a.spec, "dataset spec JSON")->required()->check(CLI::ExistingFile);
  cmd->add_option("--lambda-f", a.lambda_f, "fairness weight")->check(CLI::NonNegativeNumber);
  cmd->add_option("--lambda-r", a.lambda_r, "robustness weight")->check(CLI::NonNegativeNumber);
  cmd->add_option("--epochs", a.epochs, "training epochs")->check(CLI::PositiveNumber);
  cmd->add_option("--batch-size", a.batch_size)->check(CLI::PositiveNumber);
  cmd->add_option("--lr", a.learning_rate, "Adam step size (default from spec)")->check(CLI::NonNegativeNumber);
  cmd->add_option("--hidden", a.hidden, "hidden widths, e.g. --hidden 30 30");
  cmd->add_option("--attribute", a.attributes, "protected attribute(s) in the fairness term (default: first in spec)");
  cmd->add_option("--report-attribute", a.report_attributes, "extra attributes evaluated only");
  cmd->add_option("--distance", a.distance, "boundary distance")->check(CLI::IsMember({"logit", "margin"}));
  cmd->add_flag("--no-curves", a.no_curves, "skip per-epoch evaluation");
}

struct Loaded {
  DatasetSpec spec;
  EncodedSplit data;
};

Loaded load(const std::string& spec_path) {
  Loaded l;
  l.spec = load_dataset_spec(spec_path);
  std::fprintf(stderr, "loading %s...\n", l.spec.name.c_str());
  l.data = load_and_encode(l.spec);
  std::fprintf(stderr, "  %zu train / %zu test rows, %d features\n", l.data.train.rows(), l.data.test.rows(),
               l.data.train.width());
  return l;
}

RunConfig make_config(const TrainArgs& a, const DatasetSpec& spec) {
  RunConfig cfg;
  cfg.dataset = spec.name;
  cfg.lambdas = {a.lambda_f, a.lambda_r};
  cfg.epochs = a.epochs;
  cfg.batch_size = a.batch_size;
  cfg.learning_rate = a.learning_rate > 0.0 ? a.learning_rate : spec.learning_rate;
  cfg.hidden_widths = a.hidden.empty() ? spec.hidden_widths : a.hidden;
  cfg.attributes = a.attributes;
  if (cfg.attributes.empty()) {
    if (spec.protected_attributes.empty()) throw std::invalid_argument("spec has no protected attribute");
    cfg.attributes.push_back(spec.protected_attributes.front().name);
  }
  cfg.report_attributes = a.report_attributes;
  cfg.distance = a.distance == "margin" ? DistanceMode::margin : DistanceMode::logit;
  cfg.record_curves = !a.no_curves;
  cfg.validate();
  return cfg;
}

std::string tag_of(const RunConfig& cfg) {
  std::string t = cfg.dataset + "_lf" + format_double(cfg.lambdas.lambda_f) + "_lr" +
                  format_double(cfg.lambdas.lambda_r);
  if (cfg.distance == DistanceMode::margin) t += "_margin";
  return t;
}

void print_reports(const RunConfig& cfg, std::uint64_t seed, const std::vector<MetricReport>& reports) {
  std::cout << "attribute," << metric_csv_header() << "\n";
  for (const auto& r : reports) {
    std::cout << r.attribute << "," << metric_csv_row(cfg.dataset, cfg.lambdas, seed, r) << "\n";
  }
}

void print_aggregate(const RunResult& r) {
  for (const auto& a : r.aggregate) {
    if (a.count == 0) {
      std::printf("  %-8s %-14s n/a\n", a.attribute.c_str(), a.metric.c_str());
      continue;
    }
    std::printf("  %-8s %-14s mean %.4f  sd %s  (n=%zu)\n", a.attribute.c_str(), a.metric.c_str(), a.mean,
                a.stddev ? format_double(*a.stddev).c_str() : "n/a", a.count);
  }
}

void save_models(const RunResult& r, const fs::path& dir, const std::string& spec_path) {
  fs::create_directories(dir / "models");
  for (const auto& run : r.runs) {
    const nlohmann::json meta{{"spec", fs::absolute(spec_path).string()},
                              {"config", to_json(r.config)},
                              {"seed", run.seed},
                              {"aborted", run.abort.has_value()}};
    save_network(run.network, (dir / "models" / (tag_of(r.config) + "_seed" + std::to_string(run.seed) + ".json")).string(),
                 run.optimizer_steps, meta);
  }
}

fs::path prepare_dir(const std::string& name) {
  const fs::path dir = default_output_dir() / name;
  fs::create_directories(dir);
  return dir;
}

void write_json(const fs::path& path, const nlohmann::json& doc) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << doc.dump(2) << "\n";
}

const std::vector<ReportFormat> kFormats{ReportFormat::csv, ReportFormat::json};

int cmd_train(const TrainArgs& a, std::uint64_t seed) {
  const Loaded l = load(a.spec);
  RunConfig cfg = make_config(a, l.spec);
  cfg.replicate_seeds = {seed};
  TrainOutcome out = train(cfg, l.data, seed);

  RunResult r;
  r.config = cfg;
  r.wall_seconds = out.wall_seconds;
  if (out.abort) {
    r.failed = true;
    r.failure = "seed " + std::to_string(seed) + " aborted at epoch " + std::to_string(out.abort->epoch) +
                " batch " + std::to_string(out.abort->batch) + ": " + out.abort->reason;
  } else {
    r.aggregate = aggregate_reports({out.final_test});
  }
  const std::vector<MetricReport> final_test = out.final_test;
  r.runs.push_back(std::move(out));

  const fs::path dir = prepare_dir("train_" + tag_of(cfg) + "_seed" + std::to_string(seed));
  save_models(r, dir, a.spec);
  emit_report({{&r}, nullptr, {}}, dir, kFormats);
  if (r.failed) {
    std::cerr << "error: " << r.failure << "\n";
    return kExitAborted;
  }
  print_reports(cfg, seed, final_test);
  std::cout << "wrote " << dir.string() << "\n";
  return 0;
}

int cmd_replicate(const TrainArgs& a, const std::vector<std::uint64_t>& seeds) {
  const Loaded l = load(a.spec);
  RunConfig cfg = make_config(a, l.spec);
  cfg.replicate_seeds = seeds;
  const RunResult r = replicate(cfg, l.data);
  const fs::path dir = prepare_dir("replicate_" + tag_of(cfg));
  save_models(r, dir, a.spec);
  emit_report({{&r}, nullptr, {}}, dir, kFormats);
  if (r.failed) {
    std::cerr << "error: " << r.failure << "\n";
    return kExitAborted;
  }
  std::printf("%s over %zu seeds (%.1fs)\n", tag_of(cfg).c_str(), r.runs.size(), r.wall_seconds);
  print_aggregate(r);
  std::cout << "wrote " << dir.string() << "\n";
  return 0;
}

int cmd_sweep(const TrainArgs& a, const std::vector<std::uint64_t>& seeds, const std::string& grid_f,
              const std::string& grid_r, const SelectionRule& rule) {
  const Loaded l = load(a.spec);
  RunConfig cfg = make_config(a, l.spec);
  cfg.replicate_seeds = seeds;
  const auto gf = parse_grid(grid_f);
  const auto gr = parse_grid(grid_r);
  std::fprintf(stderr, "sweeping %zu x %zu cells\n", gf.size(), gr.size());
  const SweepResult s = grid_sweep(cfg, l.data, gf, gr, rule, [](const SweepCell& c) {
    std::fprintf(stderr, "  (%s, %s) %s\n", format_double(c.lambdas.lambda_f).c_str(),
                 format_double(c.lambdas.lambda_r).c_str(), c.error.empty() ? "ok" : c.error.c_str());
  });
  std::vector<const RunResult*> runs;
  bool any_failed = false;
  for (const auto& c : s.cells) {
    if (c.result) runs.push_back(&*c.result);
    if (!c.error.empty() || !c.result || c.result->failed) any_failed = true;
  }
  const fs::path dir = prepare_dir("sweep_" + cfg.dataset);
  emit_report({runs, &s, {}}, dir, kFormats);
  std::printf("baseline accuracy %.4f\n", s.baseline_accuracy);
  if (s.selected) {
    const auto& best = s.cells[*s.selected];
    std::printf("selected (%s, %s): %s %.4f, accuracy %.4f\n", format_double(best.lambdas.lambda_f).c_str(),
                format_double(best.lambdas.lambda_r).c_str(), rule.objective.c_str(),
                best.result->mean(rule.objective), best.result->mean("accuracy"));
  } else {
    std::printf("no cell meets the accuracy constraint\n");
  }
  std::cout << "wrote " << dir.string() << "\n";
  return any_failed ? kExitAborted : 0;
}

const EncodedDataset& pick_split(const EncodedSplit& data, const std::string& split) {
  return split == "train" ? data.train : data.test;
}

void check_width(const Network& net, const EncodedDataset& d) {
  if (net.input_width() != d.width()) {
    throw std::invalid_argument("model expects " + std::to_string(net.input_width()) + " features, spec encodes " +
                                std::to_string(d.width()));
  }
}

int cmd_audit(const std::string& model_path, const std::string& spec_path, std::string attribute,
              const std::string& split, const GAConfig& ga, std::size_t max_rows) {
  const Network net = load_network(model_path);
  const Loaded l = load(spec_path);
  const EncodedDataset& d = pick_split(l.data, split);
  check_width(net, d);
  if (attribute.empty()) attribute = l.spec.protected_attributes.at(0).name;
  BurdenOptions opt;
  opt.max_rows_per_group = max_rows;
  const BurdenAudit audit = delta_burden(net, d, attribute, ga, opt);
  const fs::path dir = prepare_dir("audit_" + fs::path(model_path).stem().string());
  nlohmann::json doc = to_json(audit);
  doc["model"] = fs::absolute(model_path).string();
  doc["split"] = split;
  doc["version"] = kVersion;
  write_json(dir / "burden.json", doc);
  for (int g = 0; g < 2; ++g) {
    const auto& b = audit.groups[static_cast<std::size_t>(g)];
    std::printf("group %d: burden %.4f over %zu searched (%zu negatives of %zu rows, %zu non-flips)\n", g, b.burden,
                b.searched, b.negative_rows, b.group_rows, b.non_flips);
  }
  std::printf("delta burden %.4f\n", audit.delta_burden);
  std::cout << "wrote " << (dir / "burden.json").string() << "\n";
  return 0;
}

int cmd_theorem(const std::string& model_path, const std::string& spec_path, const std::string& split, double tol,
                double band, double threshold, long rows) {
  const Network net = load_network(model_path);
  const Loaded l = load(spec_path);
  const EncodedDataset& d = pick_split(l.data, split);
  check_width(net, d);
  const Eigen::Index n = rows > 0 ? std::min<Eigen::Index>(rows, d.features.rows()) : d.features.rows();
  const Matrix x = d.features.topRows(n);
  const Theorem1Verdict v = verify_theorem1(net, x, tol);
  const Corollary1Summary c = verify_corollary1(net, x, band, threshold);
  const fs::path dir = prepare_dir("theorem1_" + fs::path(model_path).stem().string());
  write_json(dir / "theorem1.json", {{"model", fs::absolute(model_path).string()},
                                     {"split", split},
                                     {"rows", n},
                                     {"identity", to_json(v)},
                                     {"near_boundary", to_json(c)}});
  std::printf("identity: %s (%zu rows, %zu violations, %zu degenerate, tol %g)\n", v.pass ? "pass" : "FAIL",
              v.checked, v.violations, v.degenerate, tol);
  if (c.empty) {
    std::printf("near-boundary check: no rows within %g of f0 = 0.5\n", band);
  } else {
    std::printf("near-boundary check: %s (%zu rows, median gap %.4f, median grad norm %.4f)\n",
                c.pass ? "pass" : "fail", c.considered, c.median_gap, c.median_grad_norm);
  }
  std::cout << "wrote " << (dir / "theorem1.json").string() << "\n";
  return v.pass ? 0 : kExitCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fairness and robustness via boundary distances"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  TrainArgs targs;
  std::uint64_t seed = 1;
  auto* train_cmd = app.add_subcommand("train", "train one model");
  add_train_options(train_cmd, targs);
  train_cmd->add_option("--seed", seed, "initialisation and shuffle seed");

  TrainArgs rargs;
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
  auto* rep_cmd = app.add_subcommand("replicate", "train over several seeds and aggregate");
  add_train_options(rep_cmd, rargs);
  rep_cmd->add_option("--seeds", seeds, "comma-separated seeds")->delimiter(',');

  TrainArgs sargs;
  std::vector<std::uint64_t> sweep_seeds{1, 2, 3, 4, 5};
  std::string grid_f = "0:1:0.1";
  std::string grid_r = "0:1:0.1";
  SelectionRule rule;
  auto* sweep_cmd = app.add_subcommand("sweep", "grid over (lambda_F, lambda_R)");
  add_train_options(sweep_cmd, sargs);
  sweep_cmd->add_option("--seeds", sweep_seeds, "comma-separated seeds")->delimiter(',');
  sweep_cmd->add_option("--grid-f", grid_f, "start:stop:step or a comma list");
  sweep_cmd->add_option("--grid-r", grid_r, "start:stop:step or a comma list");
  sweep_cmd->add_option("--objective", rule.objective, "metric maximised by the selection rule");
  sweep_cmd->add_option("--accuracy-slack", rule.accuracy_slack, "allowed accuracy drop from vanilla");

  std::string model_path;
  std::string spec_path;
  std::string attribute;
  std::string split = "test";
  GAConfig ga;
  std::size_t max_rows = 0;
  auto* audit_cmd = app.add_subcommand("audit-burden", "counterfactual burden gap of a saved model");
  audit_cmd->add_option("--model", model_path)->required()->check(CLI::ExistingFile);
  audit_cmd->add_option("--spec", spec_path)->required()->check(CLI::ExistingFile);
  audit_cmd->add_option("--attribute", attribute, "protected attribute (default: first in spec)");
  audit_cmd->add_option("--split", split)->check(CLI::IsMember({"train", "test"}));
  audit_cmd->add_option("--seed", ga.seed, "GA seed");
  audit_cmd->add_option("--population", ga.population_size);
  audit_cmd->add_option("--generations", ga.generations);
  audit_cmd->add_option("--max-rows-per-group", max_rows, "subsample negatives per group (0 = all)");

  std::string tmodel;
  std::string tspec;
  std::string tsplit = "test";
  double tol = 1e-9;
  double band = 0.01;
  double threshold = 0.05;
  long rows = 0;
  auto* thm_cmd = app.add_subcommand("check-theorem1", "margin identity and near-boundary check on a saved model");
  thm_cmd->add_option("--model", tmodel)->required()->check(CLI::ExistingFile);
  thm_cmd->add_option("--spec", tspec)->required()->check(CLI::ExistingFile);
  thm_cmd->add_option("--split", tsplit)->check(CLI::IsMember({"train", "test"}));
  thm_cmd->add_option("--tol", tol, "relative tolerance of the identity");
  thm_cmd->add_option("--band", band, "|f0 - 0.5| band for the near-boundary check");
  thm_cmd->add_option("--threshold", threshold, "median gap threshold");
  thm_cmd->add_option("--rows", rows, "use the first N rows (0 = all)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // --help and --version exit 0; everything else is a usage error
    return app.exit(e) == 0 ? 0 : kExitError;
  }

  try {
    if (*train_cmd) return cmd_train(targs, seed);
    if (*rep_cmd) return cmd_replicate(rargs, seeds);
    if (*sweep_cmd) return cmd_sweep(sargs, sweep_seeds, grid_f, grid_r, rule);
    if (*audit_cmd) return cmd_audit(model_path, spec_path, attribute, split, ga, max_rows);
    if (*thm_cmd) return cmd_theorem(tmodel, tspec, tsplit, tol, band, threshold, rows);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}
