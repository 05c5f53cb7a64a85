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

#ifndef FAIRMARGIN_DATA_HPP_
#define FAIRMARGIN_DATA_HPP_

#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "fairmargin/fairloss.hpp"
#include "fairmargin/netcore.hpp"

namespace fairmargin {

class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Predicate over a raw CSV cell.
struct ValueRule {
  enum class Kind { equals, greater_than, at_least };
  Kind kind = Kind::equals;
  std::vector<std::string> values;  // equals
  double threshold = 0.0;           // greater_than / at_least

  bool matches(const std::string& raw) const;
  std::string describe() const;
};

struct ProtectedAttribute {
  std::string name;
  std::string column;
  ValueRule privileged;
  std::string privileged_label = "privileged";
  std::string unprivileged_label = "unprivileged";
};

struct CsvFormat {
  char delimiter = ',';
  bool header = true;
  bool skip_initial_space = false;
  std::string missing_token = "?";
  std::string comment_prefix;  // lines starting with this are ignored
};

enum class MissingPolicy { drop, category };
enum class SplitMode { predefined, shuffle };

/// Declarative description of one tabular benchmark.
struct DatasetSpec {
  std::string name;
  std::filesystem::path csv_path;   // whole file (shuffle) or the train file (predefined)
  std::filesystem::path test_path;  // predefined only
  CsvFormat format;
  std::vector<std::string> column_names;  // required when format.header is false
  std::string label_column;
  ValueRule positive_label;
  std::vector<ProtectedAttribute> protected_attributes;
  std::vector<std::string> numeric_columns;
  std::vector<std::string> categorical_columns;
  MissingPolicy missing = MissingPolicy::drop;
  SplitMode split = SplitMode::shuffle;
  std::uint64_t split_seed = 0;
  std::size_t train_size = 0;  // 0 = not checked (predefined only)
  std::size_t test_size = 0;
  bool clip_test = false;
  // training defaults shipped with the dataset
  double learning_rate = 1e-3;
  std::vector<int> hidden_widths{30, 30};

  void validate() const;
};

/// Parses a spec document; relative paths resolve against `base_dir`.
DatasetSpec dataset_spec_from_json(const nlohmann::json& doc, const std::filesystem::path& base_dir = {});
DatasetSpec load_dataset_spec(const std::filesystem::path& path);
nlohmann::json dataset_spec_to_json(const DatasetSpec& spec);

enum class ColumnKind { numeric, categorical };

struct ColumnMeta {
  std::string name;
  ColumnKind kind = ColumnKind::numeric;
  int offset = 0;  // first encoded column
  int width = 1;   // 1 for numeric, level count for categorical
  double min = 0.0;
  double max = 0.0;
  std::vector<std::string> levels;
};

struct GroupAttribute {
  std::string name;
  GroupIds ids;
  std::string label_a = "a";
  std::string label_b = "b";
};

struct EncodingDiagnostics {
  std::size_t rows_read = 0;
  std::size_t dropped_missing = 0;
  std::size_t unknown_categories = 0;
};

struct EncodedDataset {
  std::string name;
  Matrix features;
  std::vector<int> labels;
  std::vector<GroupAttribute> attributes;
  std::vector<ColumnMeta> columns;
  EncodingDiagnostics diagnostics;

  std::size_t rows() const { return labels.size(); }
  int width() const { return static_cast<int>(features.cols()); }
  /// Throws DataError for an unknown attribute name.
  std::size_t attribute_index(const std::string& name) const;
  const GroupAttribute& attribute(const std::string& name) const { return attributes[attribute_index(name)]; }
  std::vector<std::string> feature_names() const;
  EncodedDataset subset(std::span<const std::size_t> row_indices) const;
};

struct EncodedSplit {
  EncodedDataset train;
  EncodedDataset test;
};

/// Reads, filters, splits and encodes. Scaling statistics and category
/// levels come from the train split only.
EncodedSplit load_and_encode(const DatasetSpec& spec);

enum class SyntheticKind { separable, group_symmetric, group_biased };

SyntheticKind synthetic_kind_from_string(const std::string& s);

/// Two numeric features in [0,1] and one attribute named "group".
EncodedDataset make_synthetic(SyntheticKind kind, std::size_t n, std::uint64_t seed);

/// Dumps features, label and group ids with a header row.
void write_encoded_csv(const EncodedDataset& data, const std::filesystem::path& path);

/// Splits one CSV record; exposed for tests.
std::vector<std::string> split_csv_record(const std::string& line, const CsvFormat& format);

}  // namespace fairmargin

#endif  // FAIRMARGIN_DATA_HPP_
