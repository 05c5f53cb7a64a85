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

#include "fairmargin/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <unordered_map>

namespace fairmargin {

namespace {

using nlohmann::json;

std::string trim_right(std::string s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == '\n' || s.back() == ' ' || s.back() == '\t')) s.pop_back();
  return s;
}

bool parse_double(const std::string& s, double& out) {
  const char* first = s.data();
  const char* last = s.data() + s.size();
  while (first < last && *first == ' ') ++first;
  if (first < last && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

ValueRule rule_from_json(const json& j) {
  ValueRule r;
  if (j.contains("equals")) {
    r.kind = ValueRule::Kind::equals;
    if (j["equals"].is_array()) {
      r.values = j["equals"].get<std::vector<std::string>>();
    } else {
      r.values = {j["equals"].get<std::string>()};
    }
  } else if (j.contains("greater_than")) {
    r.kind = ValueRule::Kind::greater_than;
    r.threshold = j["greater_than"].get<double>();
  } else if (j.contains("at_least")) {
    r.kind = ValueRule::Kind::at_least;
    r.threshold = j["at_least"].get<double>();
  } else {
    throw DataError("value rule needs one of equals / greater_than / at_least");
  }
  return r;
}

json rule_to_json(const ValueRule& r) {
  switch (r.kind) {
    case ValueRule::Kind::equals:
      return {{"equals", r.values}};
    case ValueRule::Kind::greater_than:
      return {{"greater_than", r.threshold}};
    case ValueRule::Kind::at_least:
      return {{"at_least", r.threshold}};
  }
  return {};
}

struct RawTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

RawTable read_table(const std::filesystem::path& path, const DatasetSpec& spec) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open data file " + path.string());
  RawTable table;
  std::string line;
  std::size_t line_no = 0;
  bool need_header = spec.format.header;
  if (!need_header) table.header = spec.column_names;
  while (std::getline(in, line)) {
    ++line_no;
    line = trim_right(line);
    if (line.empty()) continue;
    if (!spec.format.comment_prefix.empty() && line.rfind(spec.format.comment_prefix, 0) == 0) continue;
    auto fields = split_csv_record(line, spec.format);
    if (need_header) {
      table.header = std::move(fields);
      need_header = false;
      continue;
    }
    if (fields.size() != table.header.size()) {
      throw DataError(path.string() + ":" + std::to_string(line_no) + ": expected " +
                      std::to_string(table.header.size()) + " fields, found " + std::to_string(fields.size()));
    }
    table.rows.push_back(std::move(fields));
  }
  if (table.header.empty()) throw DataError("no header or column names for " + path.string());
  return table;
}

std::size_t column_index(const RawTable& t, const std::string& name, const std::filesystem::path& path) {
  auto it = std::find(t.header.begin(), t.header.end(), name);
  if (it == t.header.end()) throw DataError("column '" + name + "' not present in " + path.string());
  return static_cast<std::size_t>(it - t.header.begin());
}

// A raw row after column lookup, before numeric scaling and one-hot.
struct ParsedRow {
  std::vector<double> numeric;
  std::vector<std::string> categorical;
  int label = 0;
  std::vector<std::uint8_t> groups;
};

struct ParsedSplit {
  std::vector<ParsedRow> rows;
  std::size_t rows_read = 0;
  std::size_t dropped = 0;
};

ParsedSplit parse_rows(const RawTable& t, const DatasetSpec& spec, const std::filesystem::path& path) {
  std::vector<std::size_t> num_idx;
  std::vector<std::size_t> cat_idx;
  std::vector<std::size_t> prot_idx;
  for (const auto& c : spec.numeric_columns) num_idx.push_back(column_index(t, c, path));
  for (const auto& c : spec.categorical_columns) cat_idx.push_back(column_index(t, c, path));
  for (const auto& p : spec.protected_attributes) prot_idx.push_back(column_index(t, p.column, path));
  const std::size_t label_idx = column_index(t, spec.label_column, path);

  auto is_missing = [&](const std::string& v) { return v.empty() || v == spec.format.missing_token; };

  ParsedSplit out;
  out.rows_read = t.rows.size();
  out.rows.reserve(t.rows.size());
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const auto& fields = t.rows[r];
    bool drop = is_missing(fields[label_idx]);
    for (auto i : prot_idx) drop = drop || is_missing(fields[i]);
    for (auto i : num_idx) drop = drop || is_missing(fields[i]);
    if (spec.missing == MissingPolicy::drop) {
      for (auto i : cat_idx) drop = drop || is_missing(fields[i]);
    }
    if (drop) {
      ++out.dropped;
      continue;
    }
    ParsedRow row;
    for (std::size_t k = 0; k < num_idx.size(); ++k) {
      double v = 0.0;
      if (!parse_double(fields[num_idx[k]], v)) {
        throw DataError(path.string() + ": row " + std::to_string(r + 1) + ": column '" + spec.numeric_columns[k] +
                        "' is not numeric: '" + fields[num_idx[k]] + "'");
      }
      row.numeric.push_back(v);
    }
    for (auto i : cat_idx) row.categorical.push_back(is_missing(fields[i]) ? spec.format.missing_token : fields[i]);
    row.label = spec.positive_label.matches(fields[label_idx]) ? 1 : 0;
    for (std::size_t k = 0; k < prot_idx.size(); ++k) {
      row.groups.push_back(spec.protected_attributes[k].privileged.matches(fields[prot_idx[k]]) ? 0 : 1);
    }
    out.rows.push_back(std::move(row));
  }
  return out;
}

struct Encoder {
  std::vector<ColumnMeta> columns;
  int width = 0;
};

Encoder fit_encoder(const std::vector<ParsedRow>& train, const DatasetSpec& spec) {
  Encoder enc;
  int offset = 0;
  for (std::size_t k = 0; k < spec.numeric_columns.size(); ++k) {
    ColumnMeta m;
    m.name = spec.numeric_columns[k];
    m.kind = ColumnKind::numeric;
    m.offset = offset++;
    m.width = 1;
    m.min = std::numeric_limits<double>::infinity();
    m.max = -std::numeric_limits<double>::infinity();
    for (const auto& r : train) {
      m.min = std::min(m.min, r.numeric[k]);
      m.max = std::max(m.max, r.numeric[k]);
    }
    if (train.empty()) m.min = m.max = 0.0;
    enc.columns.push_back(std::move(m));
  }
  for (std::size_t k = 0; k < spec.categorical_columns.size(); ++k) {
    std::set<std::string> levels;
    for (const auto& r : train) levels.insert(r.categorical[k]);
    ColumnMeta m;
    m.name = spec.categorical_columns[k];
    m.kind = ColumnKind::categorical;
    m.offset = offset;
    m.levels.assign(levels.begin(), levels.end());
    m.width = static_cast<int>(m.levels.size());
    offset += m.width;
    enc.columns.push_back(std::move(m));
  }
  enc.width = offset;
  return enc;
}

EncodedDataset apply_encoder(const Encoder& enc, const ParsedSplit& parsed, const DatasetSpec& spec, bool clip) {
  EncodedDataset out;
  out.name = spec.name;
  out.columns = enc.columns;
  const auto n = static_cast<Eigen::Index>(parsed.rows.size());
  out.features = Matrix::Zero(n, enc.width);
  out.labels.resize(parsed.rows.size());
  for (const auto& p : spec.protected_attributes) {
    GroupAttribute a;
    a.name = p.name;
    a.label_a = p.privileged_label;
    a.label_b = p.unprivileged_label;
    a.ids.resize(parsed.rows.size());
    out.attributes.push_back(std::move(a));
  }
  out.diagnostics.rows_read = parsed.rows_read;
  out.diagnostics.dropped_missing = parsed.dropped;

  std::vector<std::unordered_map<std::string, int>> level_pos(spec.categorical_columns.size());
  const std::size_t n_num = spec.numeric_columns.size();
  for (std::size_t k = 0; k < spec.categorical_columns.size(); ++k) {
    const auto& m = enc.columns[n_num + k];
    for (int j = 0; j < m.width; ++j) level_pos[k][m.levels[j]] = j;
  }

  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& r = parsed.rows[i];
    for (std::size_t k = 0; k < n_num; ++k) {
      const auto& m = enc.columns[k];
      const double range = m.max - m.min;
      double v = range > 0.0 ? (r.numeric[k] - m.min) / range : 0.0;
      if (clip) v = std::clamp(v, 0.0, 1.0);
      out.features(i, m.offset) = v;
    }
    for (std::size_t k = 0; k < spec.categorical_columns.size(); ++k) {
      const auto& m = enc.columns[n_num + k];
      auto it = level_pos[k].find(r.categorical[k]);
      if (it == level_pos[k].end()) {
        ++out.diagnostics.unknown_categories;  // all-zero block
        continue;
      }
      out.features(i, m.offset + it->second) = 1.0;
    }
    out.labels[i] = r.label;
    for (std::size_t a = 0; a < r.groups.size(); ++a) out.attributes[a].ids[i] = r.groups[a];
  }
  return out;
}

template <typename T>
std::vector<T> take(const std::vector<T>& v, std::span<const std::size_t> idx) {
  std::vector<T> out;
  out.reserve(idx.size());
  for (auto i : idx) out.push_back(v[i]);
  return out;
}

}  // namespace

bool ValueRule::matches(const std::string& raw) const {
  switch (kind) {
    case Kind::equals:
      return std::find(values.begin(), values.end(), raw) != values.end();
    case Kind::greater_than:
    case Kind::at_least: {
      double v = 0.0;
      if (!parse_double(raw, v)) throw DataError("value '" + raw + "' is not numeric for a threshold rule");
      return kind == Kind::greater_than ? v > threshold : v >= threshold;
    }
  }
  return false;
}

std::string ValueRule::describe() const {
  std::ostringstream os;
  switch (kind) {
    case Kind::equals: {
      os << "in {";
      for (std::size_t i = 0; i < values.size(); ++i) os << (i ? ", " : "") << values[i];
      os << "}";
      break;
    }
    case Kind::greater_than:
      os << "> " << threshold;
      break;
    case Kind::at_least:
      os << ">= " << threshold;
      break;
  }
  return os.str();
}

void DatasetSpec::validate() const {
  if (name.empty()) throw DataError("dataset spec needs a name");
  if (csv_path.empty()) throw DataError("dataset spec needs a data file");
  if (split == SplitMode::predefined && test_path.empty()) throw DataError("predefined split needs a test file");
  if (split == SplitMode::shuffle && (train_size == 0 || test_size == 0)) {
    throw DataError("shuffle split needs train_size and test_size");
  }
  if (!format.header && column_names.empty()) throw DataError("headerless format needs column names");
  if (label_column.empty()) throw DataError("dataset spec needs a label column");
  if (numeric_columns.empty() && categorical_columns.empty()) throw DataError("dataset spec declares no features");
  std::set<std::string> seen;
  for (const auto& c : numeric_columns) {
    if (!seen.insert(c).second) throw DataError("column '" + c + "' declared twice");
  }
  for (const auto& c : categorical_columns) {
    if (!seen.insert(c).second) throw DataError("column '" + c + "' declared as both numeric and categorical");
  }
  if (seen.count(label_column)) throw DataError("label column '" + label_column + "' is also a feature");
  std::set<std::string> names;
  for (const auto& p : protected_attributes) {
    if (!names.insert(p.name).second) throw DataError("protected attribute '" + p.name + "' declared twice");
  }
}

DatasetSpec dataset_spec_from_json(const json& doc, const std::filesystem::path& base_dir) {
  DatasetSpec s;
  auto resolve = [&](const std::string& p) {
    std::filesystem::path path(p);
    return path.is_absolute() || base_dir.empty() ? path : base_dir / path;
  };
  try {
    s.name = doc.at("name").get<std::string>();
    const auto& files = doc.at("files");
    if (files.contains("train")) {
      s.csv_path = resolve(files.at("train").get<std::string>());
      s.test_path = resolve(files.at("test").get<std::string>());
    } else {
      s.csv_path = resolve(files.at("data").get<std::string>());
    }
    if (doc.contains("format")) {
      const auto& f = doc["format"];
      const auto delim = f.value("delimiter", std::string(","));
      if (delim.size() != 1) throw DataError("delimiter must be a single character");
      s.format.delimiter = delim[0];
      s.format.header = f.value("header", true);
      s.format.skip_initial_space = f.value("skip_initial_space", false);
      s.format.missing_token = f.value("missing_token", std::string("?"));
      s.format.comment_prefix = f.value("comment_prefix", std::string());
    }
    if (doc.contains("columns")) s.column_names = doc["columns"].get<std::vector<std::string>>();
    s.label_column = doc.at("label").at("column").get<std::string>();
    s.positive_label = rule_from_json(doc.at("label").at("positive"));
    for (const auto& p : doc.value("protected", json::array())) {
      ProtectedAttribute a;
      a.name = p.at("name").get<std::string>();
      a.column = p.value("column", a.name);
      a.privileged = rule_from_json(p.at("privileged"));
      if (p.contains("labels")) {
        const auto labels = p["labels"].get<std::vector<std::string>>();
        if (labels.size() != 2) throw DataError("protected attribute labels must be a pair");
        a.privileged_label = labels[0];
        a.unprivileged_label = labels[1];
      }
      s.protected_attributes.push_back(std::move(a));
    }
    s.numeric_columns = doc.value("numeric", std::vector<std::string>{});
    s.categorical_columns = doc.value("categorical", std::vector<std::string>{});
    const auto missing = doc.value("missing", std::string("drop"));
    if (missing == "drop") {
      s.missing = MissingPolicy::drop;
    } else if (missing == "category") {
      s.missing = MissingPolicy::category;
    } else {
      throw DataError("missing policy must be 'drop' or 'category'");
    }
    const auto& split = doc.at("split");
    const auto mode = split.at("mode").get<std::string>();
    if (mode == "predefined") {
      s.split = SplitMode::predefined;
    } else if (mode == "shuffle") {
      s.split = SplitMode::shuffle;
    } else {
      throw DataError("split mode must be 'predefined' or 'shuffle'");
    }
    s.split_seed = split.value("seed", std::uint64_t{0});
    s.train_size = split.value("train_size", std::size_t{0});
    s.test_size = split.value("test_size", std::size_t{0});
    s.clip_test = doc.value("clip_test", false);
    if (doc.contains("training")) {
      s.learning_rate = doc["training"].value("learning_rate", s.learning_rate);
      s.hidden_widths = doc["training"].value("hidden", s.hidden_widths);
    }
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed dataset spec: ") + e.what());
  }
  s.validate();
  return s;
}

DatasetSpec load_dataset_spec(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open dataset spec " + path.string());
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw DataError("cannot parse dataset spec " + path.string() + ": " + e.what());
  }
  return dataset_spec_from_json(doc, path.parent_path());
}

json dataset_spec_to_json(const DatasetSpec& s) {
  json doc;
  doc["name"] = s.name;
  if (s.split == SplitMode::predefined) {
    doc["files"] = {{"train", s.csv_path.string()}, {"test", s.test_path.string()}};
  } else {
    doc["files"] = {{"data", s.csv_path.string()}};
  }
  doc["format"] = {{"delimiter", std::string(1, s.format.delimiter)},
                   {"header", s.format.header},
                   {"skip_initial_space", s.format.skip_initial_space},
                   {"missing_token", s.format.missing_token},
                   {"comment_prefix", s.format.comment_prefix}};
  if (!s.column_names.empty()) doc["columns"] = s.column_names;
  doc["label"] = {{"column", s.label_column}, {"positive", rule_to_json(s.positive_label)}};
  json prot = json::array();
  for (const auto& p : s.protected_attributes) {
    prot.push_back({{"name", p.name},
                    {"column", p.column},
                    {"privileged", rule_to_json(p.privileged)},
                    {"labels", {p.privileged_label, p.unprivileged_label}}});
  }
  doc["protected"] = prot;
  doc["numeric"] = s.numeric_columns;
  doc["categorical"] = s.categorical_columns;
  doc["missing"] = s.missing == MissingPolicy::drop ? "drop" : "category";
  doc["split"] = {{"mode", s.split == SplitMode::predefined ? "predefined" : "shuffle"},
                  {"seed", s.split_seed},
                  {"train_size", s.train_size},
                  {"test_size", s.test_size}};
  doc["clip_test"] = s.clip_test;
  doc["training"] = {{"learning_rate", s.learning_rate}, {"hidden", s.hidden_widths}};
  return doc;
}

std::vector<std::string> split_csv_record(const std::string& line, const CsvFormat& format) {
  std::vector<std::string> fields;
  std::string cur;
  bool in_quotes = false;
  bool at_field_start = true;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        cur.push_back(c);
      }
      continue;
    }
    if (c == format.delimiter) {
      fields.push_back(std::move(cur));
      cur.clear();
      at_field_start = true;
      continue;
    }
    if (at_field_start && format.skip_initial_space && c == ' ') continue;
    if (at_field_start && c == '"') {
      in_quotes = true;
      at_field_start = false;
      continue;
    }
    at_field_start = false;
    cur.push_back(c);
  }
  fields.push_back(std::move(cur));
  for (auto& f : fields) f = trim_right(f);
  return fields;
}

std::size_t EncodedDataset::attribute_index(const std::string& attr) const {
  for (std::size_t i = 0; i < attributes.size(); ++i) {
    if (attributes[i].name == attr) return i;
  }
  throw DataError("dataset '" + name + "' has no protected attribute '" + attr + "'");
}

std::vector<std::string> EncodedDataset::feature_names() const {
  std::vector<std::string> names(static_cast<std::size_t>(width()));
  for (const auto& c : columns) {
    if (c.kind == ColumnKind::numeric) {
      names[c.offset] = c.name;
    } else {
      for (int j = 0; j < c.width; ++j) names[c.offset + j] = c.name + "=" + c.levels[j];
    }
  }
  return names;
}

EncodedDataset EncodedDataset::subset(std::span<const std::size_t> idx) const {
  EncodedDataset out;
  out.name = name;
  out.columns = columns;
  out.diagnostics = diagnostics;
  out.features.resize(static_cast<Eigen::Index>(idx.size()), features.cols());
  for (std::size_t k = 0; k < idx.size(); ++k) out.features.row(k) = features.row(idx[k]);
  out.labels = take(labels, idx);
  for (const auto& a : attributes) out.attributes.push_back({a.name, take(a.ids, idx), a.label_a, a.label_b});
  return out;
}

EncodedSplit load_and_encode(const DatasetSpec& spec) {
  spec.validate();
  ParsedSplit train;
  ParsedSplit test;
  if (spec.split == SplitMode::predefined) {
    train = parse_rows(read_table(spec.csv_path, spec), spec, spec.csv_path);
    test = parse_rows(read_table(spec.test_path, spec), spec, spec.test_path);
    if (spec.train_size != 0 && train.rows.size() != spec.train_size) {
      throw DataError("size mismatch: train split has " + std::to_string(train.rows.size()) + " rows, spec declares " +
                      std::to_string(spec.train_size));
    }
    if (spec.test_size != 0 && test.rows.size() != spec.test_size) {
      throw DataError("size mismatch: test split has " + std::to_string(test.rows.size()) + " rows, spec declares " +
                      std::to_string(spec.test_size));
    }
  } else {
    ParsedSplit all = parse_rows(read_table(spec.csv_path, spec), spec, spec.csv_path);
    if (all.rows.size() != spec.train_size + spec.test_size) {
      throw DataError("size mismatch: " + std::to_string(all.rows.size()) + " usable rows, spec declares " +
                      std::to_string(spec.train_size) + " + " + std::to_string(spec.test_size));
    }
    std::vector<std::size_t> order(all.rows.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::mt19937_64 rng(spec.split_seed);
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t k = 0; k < order.size(); ++k) {
      (k < spec.train_size ? train : test).rows.push_back(std::move(all.rows[order[k]]));
    }
    train.rows_read = all.rows_read;
    train.dropped = all.dropped;
  }
  const Encoder enc = fit_encoder(train.rows, spec);
  EncodedSplit out;
  out.train = apply_encoder(enc, train, spec, false);
  out.test = apply_encoder(enc, test, spec, spec.clip_test);
  return out;
}

SyntheticKind synthetic_kind_from_string(const std::string& s) {
  if (s == "separable") return SyntheticKind::separable;
  if (s == "group_symmetric") return SyntheticKind::group_symmetric;
  if (s == "group_biased") return SyntheticKind::group_biased;
  throw DataError("unknown synthetic kind '" + s + "'");
}

EncodedDataset make_synthetic(SyntheticKind kind, std::size_t n, std::uint64_t seed) {
  if (n < 4 || n % 2 != 0) throw DataError("synthetic datasets need an even n >= 4");
  std::mt19937_64 rng(seed);
  EncodedDataset out;
  out.name = kind == SyntheticKind::separable         ? "synthetic_separable"
             : kind == SyntheticKind::group_symmetric ? "synthetic_group_symmetric"
                                                      : "synthetic_group_biased";
  out.features.resize(static_cast<Eigen::Index>(n), 2);
  out.labels.resize(n);
  GroupAttribute group{"group", GroupIds(n), "a", "b"};

  const double sigma = kind == SyntheticKind::separable ? 0.06 : 0.12;
  std::normal_distribution<double> noise(0.0, sigma);
  for (std::size_t i = 0; i < n; ++i) {
    const int label = static_cast<int>(i % 2);
    const std::uint8_t g = static_cast<std::uint8_t>((i / 2) % 2);
    double center = 0.0;
    switch (kind) {
      case SyntheticKind::separable:
        center = label == 1 ? 0.75 : 0.25;
        break;
      case SyntheticKind::group_symmetric:
        center = label == 1 ? 0.65 : 0.35;
        break;
      case SyntheticKind::group_biased:
        // group b negatives sit farther from the class boundary
        center = label == 1 ? 0.65 : (g == 1 ? 0.2 : 0.35);
        break;
    }
    for (int j = 0; j < 2; ++j) out.features(i, j) = std::clamp(center + noise(rng), 0.0, 1.0);
    out.labels[i] = label;
    group.ids[i] = g;
  }
  out.attributes.push_back(std::move(group));
  for (int j = 0; j < 2; ++j) {
    ColumnMeta m;
    m.name = "x" + std::to_string(j);
    m.kind = ColumnKind::numeric;
    m.offset = j;
    m.width = 1;
    m.min = 0.0;
    m.max = 1.0;
    out.columns.push_back(std::move(m));
  }
  out.diagnostics.rows_read = n;
  return out;
}

void write_encoded_csv(const EncodedDataset& data, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write encoded dump to " + path.string());
  const auto names = data.feature_names();
  for (const auto& n : names) out << n << ',';
  out << "label";
  for (const auto& a : data.attributes) out << ",group_" << a.name;
  out << '\n';
  out.precision(17);
  for (Eigen::Index i = 0; i < data.features.rows(); ++i) {
    for (Eigen::Index j = 0; j < data.features.cols(); ++j) out << data.features(i, j) << ',';
    out << data.labels[i];
    for (const auto& a : data.attributes) out << ',' << static_cast<int>(a.ids[i]);
    out << '\n';
  }
  if (!out) throw DataError("failed writing encoded dump to " + path.string());
}

}  // namespace fairmargin
