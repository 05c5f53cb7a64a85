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


#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <numeric>

#include "fairmargin/data.hpp"
#include "support.hpp"

using namespace fairmargin;
using fairmargin::testing::data_dir;

namespace {

struct TempDir {
  std::filesystem::path path;
  TempDir() {
    path = std::filesystem::temp_directory_path() /
           ("fairmargin_data_" + std::to_string(reinterpret_cast<std::uintptr_t>(this)));
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
  std::filesystem::path write(const std::string& name, const std::string& body) const {
    std::ofstream(path / name) << body;
    return path / name;
  }
};

DatasetSpec small_spec(const std::filesystem::path& train, const std::filesystem::path& test) {
  DatasetSpec s;
  s.name = "small";
  s.csv_path = train;
  s.test_path = test;
  s.split = SplitMode::predefined;
  s.label_column = "y";
  s.positive_label.values = {"yes"};
  s.protected_attributes = {ProtectedAttribute{"grp", "grp", ValueRule{ValueRule::Kind::equals, {"p"}, 0.0}}};
  s.numeric_columns = {"num"};
  s.categorical_columns = {"cat"};
  return s;
}

void check_partition(const EncodedDataset& d) {
  for (const auto& a : d.attributes) {
    REQUIRE(a.ids.size() == d.rows());
    for (auto g : a.ids) CHECK((g == 0 || g == 1));
  }
}

void check_one_hot(const EncodedDataset& d, bool allow_unknown) {
  for (const auto& c : d.columns) {
    if (c.kind != ColumnKind::categorical) continue;
    for (Eigen::Index r = 0; r < d.features.rows(); ++r) {
      const double s = d.features.row(r).segment(c.offset, c.width).sum();
      if (allow_unknown) {
        CHECK((s == 1.0 || s == 0.0));
      } else {
        CHECK(s == 1.0);
      }
    }
  }
}

}  // namespace

TEST_CASE("five-row CSV encodes to width four") {
  TempDir tmp;
  const auto train = tmp.write("train.csv",
                               "num,cat,grp,y\n"
                               "10,red,p,yes\n"
                               "20,green,q,no\n"
                               "30,blue,p,no\n"
                               "15,red,q,yes\n"
                               "25,green,p,no\n");
  const auto test = tmp.write("test.csv", "num,cat,grp,y\n40,red,p,yes\n5,violet,q,no\n");
  const auto split = load_and_encode(small_spec(train, test));
  const auto& d = split.train;
  CHECK(d.rows() == 5);
  CHECK(d.width() == 4);
  REQUIRE(d.columns.size() == 2);
  CHECK(d.columns[0].name == "num");
  CHECK(d.columns[0].min == 10.0);
  CHECK(d.columns[0].max == 30.0);
  CHECK(d.columns[1].levels == std::vector<std::string>{"blue", "green", "red"});
  CHECK(d.features.col(0).minCoeff() == 0.0);
  CHECK(d.features.col(0).maxCoeff() == 1.0);
  CHECK(d.features(3, 0) == doctest::Approx(0.25));
  CHECK(d.labels == std::vector<int>{1, 0, 0, 1, 0});
  CHECK(d.attribute("grp").ids == GroupIds{0, 1, 0, 1, 0});
  CHECK(d.feature_names() == std::vector<std::string>{"num", "cat=blue", "cat=green", "cat=red"});
  check_one_hot(d, false);
  check_partition(d);

  // test split: train statistics, unknown level -> zero block, no clipping by default
  const auto& t = split.test;
  CHECK(t.features(0, 0) == doctest::Approx(1.5));
  CHECK(t.features(1, 0) == doctest::Approx(-0.25));
  CHECK(t.features.row(1).segment(1, 3).isZero(0.0));
  CHECK(t.diagnostics.unknown_categories == 1);
  check_one_hot(t, true);

  auto clipped_spec = small_spec(train, test);
  clipped_spec.clip_test = true;
  const auto clipped = load_and_encode(clipped_spec);
  CHECK(clipped.test.features(0, 0) == 1.0);
  CHECK(clipped.test.features(1, 0) == 0.0);
}

TEST_CASE("missing values are dropped or kept as a level") {
  TempDir tmp;
  const auto train = tmp.write("train.csv", "num,cat,grp,y\n1,a,p,yes\n?,b,q,no\n3,?,p,no\n4,b,q,yes\n");
  const auto test = tmp.write("test.csv", "num,cat,grp,y\n2,?,p,no\n2,a,q,yes\n");
  auto spec = small_spec(train, test);
  const auto dropped = load_and_encode(spec);
  CHECK(dropped.train.rows() == 2);
  CHECK(dropped.train.diagnostics.rows_read == 4);
  CHECK(dropped.train.diagnostics.dropped_missing == 2);
  CHECK(dropped.test.rows() == 1);

  spec.missing = MissingPolicy::category;
  // a missing numeric still forces a drop; a missing categorical becomes its own level
  const auto kept = load_and_encode(spec);
  CHECK(kept.train.rows() == 3);
  CHECK(kept.train.columns[1].levels == std::vector<std::string>{"?", "a", "b"});
  CHECK(kept.test.rows() == 2);
}

TEST_CASE("declared sizes are enforced") {
  TempDir tmp;
  const auto train = tmp.write("train.csv", "num,cat,grp,y\n1,a,p,yes\n2,b,q,no\n");
  const auto test = tmp.write("test.csv", "num,cat,grp,y\n2,a,q,yes\n1,b,p,no\n");
  auto spec = small_spec(train, test);
  spec.train_size = 3;
  CHECK_THROWS_WITH_AS(load_and_encode(spec), doctest::Contains("size mismatch"), DataError);
  spec.train_size = 2;
  spec.test_size = 2;
  CHECK_NOTHROW(load_and_encode(spec));
}

TEST_CASE("parse and column errors") {
  TempDir tmp;
  const auto bad = tmp.write("bad.csv", "num,cat,grp,y\n1,a,p\n");
  const auto ok = tmp.write("ok.csv", "num,cat,grp,y\n1,a,p,yes\n2,b,q,no\n");
  CHECK_THROWS_AS(load_and_encode(small_spec(bad, ok)), DataError);
  auto spec = small_spec(ok, ok);
  spec.numeric_columns = {"missing_column"};
  CHECK_THROWS_AS(load_and_encode(spec), DataError);
  CHECK_THROWS_AS(load_and_encode(small_spec(tmp.path / "nope.csv", ok)), DataError);
  auto overlap = small_spec(ok, ok);
  overlap.categorical_columns = {"num"};
  CHECK_THROWS(load_and_encode(overlap));
}

TEST_CASE("value rules") {
  ValueRule eq{ValueRule::Kind::equals, {">50K", ">50K."}, 0.0};
  CHECK(eq.matches(">50K."));
  CHECK_FALSE(eq.matches("<=50K"));
  ValueRule gt{ValueRule::Kind::greater_than, {}, 25.0};
  CHECK(gt.matches("26"));
  CHECK_FALSE(gt.matches("25"));
  ValueRule ge{ValueRule::Kind::at_least, {}, 10.0};
  CHECK(ge.matches("10"));
  CHECK_FALSE(ge.matches("9.5"));
  CHECK_THROWS(gt.matches("abc"));
}

TEST_CASE("record splitting") {
  CsvFormat f;
  f.skip_initial_space = true;
  CHECK(split_csv_record("39, State-gov, 77516", f) == std::vector<std::string>{"39", "State-gov", "77516"});
  CHECK(split_csv_record("\"a, b\",c", f) == std::vector<std::string>{"a, b", "c"});
  CHECK(split_csv_record("x,,z", f) == std::vector<std::string>{"x", "", "z"});
  CsvFormat space;
  space.delimiter = ' ';
  CHECK(split_csv_record("A11 6 A34", space) == std::vector<std::string>{"A11", "6", "A34"});
}

TEST_CASE("canonical Adult spec") {
  const auto spec = load_dataset_spec(data_dir() / "specs" / "adult.json");
  const auto split = load_and_encode(spec);
  CHECK(split.train.rows() == 32561);
  CHECK(split.test.rows() == 16281);
  CHECK(split.train.width() == split.test.width());
  check_partition(split.train);
  check_partition(split.test);
  check_one_hot(split.train, false);
  const auto& sex = split.train.attribute("gender");
  const auto male = std::count(sex.ids.begin(), sex.ids.end(), 0);
  CHECK(male == 21790);  // UCI training file
  const auto positives = std::accumulate(split.train.labels.begin(), split.train.labels.end(), 0);
  CHECK(positives == 7841);
  CHECK(std::accumulate(split.test.labels.begin(), split.test.labels.end(), 0) == 3846);
  CHECK(split.train.attribute("race").ids.size() == split.train.rows());
  for (Eigen::Index c = 0; c < split.train.features.cols(); ++c) {
    CHECK(split.train.features.col(c).minCoeff() >= 0.0);
    CHECK(split.train.features.col(c).maxCoeff() <= 1.0);
  }
}

TEST_CASE("canonical German spec") {
  const auto spec = load_dataset_spec(data_dir() / "specs" / "german.json");
  const auto a = load_and_encode(spec);
  const auto b = load_and_encode(spec);
  CHECK(a.train.rows() == 800);
  CHECK(a.test.rows() == 200);
  CHECK(a.train.features == b.train.features);
  CHECK(a.test.labels == b.test.labels);
  const auto good = std::accumulate(a.train.labels.begin(), a.train.labels.end(), 0) +
                    std::accumulate(a.test.labels.begin(), a.test.labels.end(), 0);
  CHECK(good == 700);
  check_partition(a.train);

  auto reseeded = spec;
  reseeded.split_seed = 1;
  CHECK(load_and_encode(reseeded).test.labels != a.test.labels);
}

TEST_CASE("spec JSON round trip") {
  const auto spec = load_dataset_spec(data_dir() / "specs" / "adult.json");
  const auto again = dataset_spec_from_json(dataset_spec_to_json(spec));
  CHECK(again.csv_path == spec.csv_path);
  CHECK(again.numeric_columns == spec.numeric_columns);
  CHECK(again.protected_attributes.size() == 2);
  CHECK(again.positive_label.values == spec.positive_label.values);
  CHECK(again.missing == MissingPolicy::category);
  CHECK(again.format.comment_prefix == "|");
  CHECK(again.train_size == 32561);
}

TEST_CASE("synthetic fixtures") {
  for (auto kind : {SyntheticKind::separable, SyntheticKind::group_symmetric, SyntheticKind::group_biased}) {
    const auto d = make_synthetic(kind, 100, 3);
    CHECK(d.rows() == 100);
    CHECK(d.width() == 2);
    CHECK(d.features.minCoeff() >= 0.0);
    CHECK(d.features.maxCoeff() <= 1.0);
    CHECK(std::accumulate(d.labels.begin(), d.labels.end(), 0) == 50);
    const auto& g = d.attribute("group").ids;
    CHECK(std::count(g.begin(), g.end(), 1) == 50);
    CHECK(make_synthetic(kind, 100, 3).features == d.features);
  }
  CHECK_THROWS_AS(make_synthetic(SyntheticKind::separable, 5, 1), DataError);
  CHECK_THROWS_AS(make_synthetic(SyntheticKind::separable, 2, 1), DataError);
  CHECK(synthetic_kind_from_string("group_biased") == SyntheticKind::group_biased);
  CHECK_THROWS_AS(synthetic_kind_from_string("nope"), DataError);
}

TEST_CASE("subset and encoded dump") {
  const auto d = make_synthetic(SyntheticKind::separable, 10, 1);
  const std::vector<std::size_t> idx{7, 2};
  const auto s = d.subset(idx);
  CHECK(s.rows() == 2);
  CHECK(s.features.row(0) == d.features.row(7));
  CHECK(s.attribute("group").ids[1] == d.attribute("group").ids[2]);
  TempDir tmp;
  write_encoded_csv(d, tmp.path / "dump.csv");
  std::ifstream in(tmp.path / "dump.csv");
  std::string header;
  std::getline(in, header);
  CHECK(header.find("label") != std::string::npos);
  int lines = 0;
  for (std::string l; std::getline(in, l);) ++lines;
  CHECK(lines == 10);
}
