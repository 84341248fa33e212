/*
 * Copyright 2026 The Revise Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "revise/attribution.h"

#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "revise/error.h"
#include "revise/text_format.h"
#include "support/test_support.h"

namespace revise {
namespace {

using ::testing::ElementsAre;
using ::testing::ElementsAreArray;
using testing::ConstantScorer;
using testing::FunctionScorer;
using testing::LinearScorer;

ErrorCode CodeOf(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an Error";
  return ErrorCode::kInvalidArgument;
}

class FixtureAttribution : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dataset_ = new Dataset(LoadCsv(testing::FixtureCsv()));
    model_ = new LogisticModel(
        LoadModel(testing::FixtureModel(), dataset_->schema()));
    background_ = new BackgroundSet(SampleBackground(*dataset_));
    table_ = new std::vector<AttributionVector>(
        ComputeAttributionTable(*model_, dataset_->records(), *background_));
  }
  static void TearDownTestSuite() {
    delete table_;
    delete background_;
    delete model_;
    delete dataset_;
  }

  static Dataset* dataset_;
  static LogisticModel* model_;
  static BackgroundSet* background_;
  static std::vector<AttributionVector>* table_;
};

Dataset* FixtureAttribution::dataset_ = nullptr;
LogisticModel* FixtureAttribution::model_ = nullptr;
BackgroundSet* FixtureAttribution::background_ = nullptr;
std::vector<AttributionVector>* FixtureAttribution::table_ = nullptr;

// oracle_shapley.csv: subject_id, base, one column per feature.
AttributionTable ReadOracleShapley() {
  std::istringstream in(
      testing::ReadFile(testing::FixturesDir() / "oracle_shapley.csv"));
  std::string line;
  std::getline(in, line);
  const std::vector<std::string> header = SplitCells(line, ',');
  AttributionTable table;
  table.feature_names.assign(header.begin() + 2, header.end());
  while (std::getline(in, line)) {
    const std::vector<std::string> cells = SplitCells(line, ',');
    AttributionVector row;
    row.subject_id = cells[0];
    row.base = ParseDouble(cells[1]).value();
    for (std::size_t c = 2; c < cells.size(); ++c) {
      row.phi.push_back(ParseDouble(cells[c]).value());
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

TEST(SampleBackground, SizeOrderAndDeterminism) {
  const Dataset d = testing::RandomDataset(100, 2, 4);
  const BackgroundSet a = SampleBackground(d, 32, 42);
  const BackgroundSet b = SampleBackground(d, 32, 42);
  const BackgroundSet c = SampleBackground(d, 32, 43);
  EXPECT_EQ(a.source, BackgroundSource::kSampled);
  ASSERT_EQ(a.records.size(), 32u);
  std::vector<std::string> ids_a, ids_b, ids_c;
  for (const auto& r : a.records) ids_a.push_back(r.id);
  for (const auto& r : b.records) ids_b.push_back(r.id);
  for (const auto& r : c.records) ids_c.push_back(r.id);
  EXPECT_EQ(ids_a, ids_b);
  EXPECT_NE(ids_a, ids_c);
  EXPECT_TRUE(std::is_sorted(ids_a.begin(), ids_a.end()));
  EXPECT_EQ(std::adjacent_find(ids_a.begin(), ids_a.end()), ids_a.end());
}

TEST(SampleBackground, SmallDatasetUsesEverySubject) {
  const Dataset d = testing::RandomDataset(32, 2, 4);
  const BackgroundSet bg = SampleBackground(d, 32, 42);
  EXPECT_EQ(bg.source, BackgroundSource::kFull);
  EXPECT_EQ(bg.records.size(), 32u);
  EXPECT_EQ(CodeOf([&] { SampleBackground(d, 0, 42); }),
            ErrorCode::kEmptyBackground);
}

TEST(SampleBackground, FixtureDrawIsFrozen) {
  const Dataset d = LoadCsv(testing::FixtureCsv());
  const BackgroundSet bg = SampleBackground(d);
  std::istringstream frozen(
      testing::ReadFile(testing::FixturesDir() / "background_ids.txt"));
  std::vector<std::string> expected;
  for (std::string line; std::getline(frozen, line);) {
    if (!line.empty()) expected.push_back(line);
  }
  std::vector<std::string> actual;
  for (const auto& r : bg.records) actual.push_back(r.id);
  EXPECT_EQ(actual, expected);
}

TEST(ShapleyExact, ConstantModelHasZeroAttribution) {
  const Dataset d = testing::RandomDataset(40, 5, 3);
  const ConstantScorer scorer(5, 0.37);
  const BackgroundSet bg = SampleBackground(d, 16, 1);
  for (const SubjectRecord& r : d.records()) {
    const AttributionVector av = ShapleyExact(scorer, r, bg);
    EXPECT_NEAR(av.base, 0.37, 1e-15);
    EXPECT_THAT(av.phi, ElementsAre(0, 0, 0, 0, 0));
  }
}

TEST(ShapleyExact, LinearClosedForm) {
  const Dataset d = testing::RandomDataset(200, 11, 21);
  std::mt19937_64 rng(5);
  std::normal_distribution<double> normal(0.0, 2.0);
  std::vector<double> w(11);
  for (double& x : w) x = normal(rng);
  const LinearScorer scorer(w, 0.25, d.schema());
  const BackgroundSet bg = SampleBackground(d);
  std::vector<double> mean_bg(11, 0.0);
  for (const SubjectRecord& b : bg.records) {
    const NormalizedVector n = Normalize(b, d.schema());
    for (std::size_t f = 0; f < 11; ++f) mean_bg[f] += n.values[f];
  }
  for (double& m : mean_bg) m /= static_cast<double>(bg.records.size());

  for (std::size_t s = 0; s < 50; ++s) {
    const SubjectRecord& x = d.records()[s * 4];
    const AttributionVector av = ShapleyExact(scorer, x, bg);
    const NormalizedVector n = Normalize(x, d.schema());
    for (std::size_t f = 0; f < 11; ++f) {
      EXPECT_NEAR(av.phi[f], w[f] * (n.values[f] - mean_bg[f]), 1e-12)
          << x.id << " feature " << f;
    }
  }
}

TEST(ShapleyExact, DummyFeatureIsExactlyZero) {
  const Dataset d = testing::RandomDataset(50, 4, 9);
  const LogisticModel model({1.5, 0.0, -2.0, 0.7}, 0.1, d.schema());
  const BackgroundSet bg = SampleBackground(d, 16, 3);
  for (const SubjectRecord& r : d.records()) {
    EXPECT_EQ(ShapleyExact(model, r, bg).phi[1], 0.0);
  }
}

TEST(ShapleyExact, SymmetricFeaturesGetEqualAttribution) {
  // The model treats a and b interchangeably, and so does the background
  // (every background record has a == b), so the pair is symmetric in v.
  std::ostringstream csv;
  csv << "id,a,b,c\n";
  std::mt19937 rng(2);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  csv << "lo,0,0,0\nhi,1,1,1\n";
  for (int i = 0; i < 30; ++i) {
    const double shared = u(rng);
    csv << "s" << i << ',' << (i % 2 ? shared : u(rng)) << ','
        << (i % 2 ? shared : u(rng)) << ',' << u(rng) << '\n';
  }
  const Dataset d = testing::ParseCsvText(csv.str());
  const FunctionScorer scorer(3, [](std::span<const double> x) {
    return Sigmoid(x[0] + x[1] + 3.0 * x[0] * x[1] - x[2]);
  });
  BackgroundSet bg;
  for (const SubjectRecord& r : d.records()) {
    if (r.values[0] == r.values[1]) bg.records.push_back(r);
  }
  int checked = 0;
  for (const SubjectRecord& r : d.records()) {
    if (r.values[0] != r.values[1]) continue;
    const AttributionVector av = ShapleyExact(scorer, r, bg);
    EXPECT_LE(std::abs(av.phi[0] - av.phi[1]), 1e-12) << r.id;
    ++checked;
  }
  EXPECT_GE(checked, 15);
}

TEST(ShapleyExact, LinearInTheModel) {
  const Dataset d = testing::RandomDataset(60, 6, 13);
  const LinearScorer f({1.0, -2.0, 0.5, 0.0, 3.0, -1.0}, 0.2, d.schema());
  const LinearScorer g({-0.3, 0.8, 2.0, 1.1, 0.0, 0.4}, -0.5, d.schema());
  const double a = 0.7;
  const double b = -1.3;
  const FunctionScorer combo(6, [&](std::span<const double> x) {
    return a * f.Score(x) + b * g.Score(x);
  });
  const BackgroundSet bg = SampleBackground(d, 32, 42);
  for (const SubjectRecord& r : d.records()) {
    const AttributionVector pf = ShapleyExact(f, r, bg);
    const AttributionVector pg = ShapleyExact(g, r, bg);
    const AttributionVector pc = ShapleyExact(combo, r, bg);
    for (std::size_t i = 0; i < 6; ++i) {
      EXPECT_LE(std::abs(pc.phi[i] - (a * pf.phi[i] + b * pg.phi[i])), 1e-12);
    }
  }
}

TEST(ShapleyExact, Errors) {
  const Dataset wide = testing::RandomDataset(4, 16, 1);
  const ConstantScorer c16(16, 0.5);
  EXPECT_EQ(CodeOf([&] {
              ShapleyExact(c16, wide.records()[0], SampleBackground(wide));
            }),
            ErrorCode::kTooManyFeatures);
  const Dataset d = testing::RandomDataset(4, 3, 1);
  const ConstantScorer c3(3, 0.5);
  EXPECT_EQ(CodeOf([&] { ShapleyExact(c3, d.records()[0], BackgroundSet{}); }),
            ErrorCode::kEmptyBackground);
  const ConstantScorer c2(2, 0.5);
  EXPECT_EQ(CodeOf([&] {
              ShapleyExact(c2, d.records()[0], SampleBackground(d));
            }),
            ErrorCode::kSchemaMismatch);
}

TEST(ShapleyExact, FifteenFeaturesIsSupported) {
  const Dataset d = testing::RandomDataset(3, 15, 1);
  std::vector<double> w(15, 0.1);
  const LinearScorer scorer(w, 0.0, d.schema());
  const AttributionVector av =
      ShapleyExact(scorer, d.records()[0], SampleBackground(d));
  EXPECT_NEAR(av.Total(), scorer.Score(d.records()[0].values), 1e-12);
}

TEST_F(FixtureAttribution, EfficiencyOnEverySubject) {
  for (std::size_t i = 0; i < table_->size(); ++i) {
    const double score = Score(*model_, dataset_->records()[i]);
    EXPECT_LE(std::abs(score - (*table_)[i].Total()), 1e-9);
  }
}

TEST_F(FixtureAttribution, MatchesIndependentEnumeration) {
  const AttributionTable oracle = ReadOracleShapley();
  ASSERT_EQ(oracle.rows.size(), table_->size());
  for (std::size_t i = 0; i < table_->size(); ++i) {
    const AttributionVector& got = (*table_)[i];
    const AttributionVector& want = oracle.rows[i];
    ASSERT_EQ(got.subject_id, want.subject_id);
    EXPECT_NEAR(got.base, want.base, 1e-12);
    for (std::size_t f = 0; f < got.phi.size(); ++f) {
      EXPECT_NEAR(got.phi[f], want.phi[f], 1e-12)
          << got.subject_id << ' ' << oracle.feature_names[f];
    }
  }
}

TEST_F(FixtureAttribution, ThreadCountDoesNotChangeResults) {
  const std::span<const SubjectRecord> first(dataset_->records().data(), 20);
  const auto serial = ComputeAttributionTable(*model_, first, *background_, 1);
  const auto parallel =
      ComputeAttributionTable(*model_, first, *background_, 4);
  EXPECT_EQ(serial, parallel);
  for (std::size_t i = 0; i < serial.size(); ++i) {
    EXPECT_EQ(serial[i], (*table_)[i]);
  }
}

TEST_F(FixtureAttribution, ImportanceMatchesOracle) {
  const std::vector<FeatureImportance> ranking =
      RankFeatureImportance(*table_, dataset_->FeatureNames());
  const auto oracle =
      testing::ReadJson(testing::FixturesDir() / "oracle_importance.json");
  ASSERT_EQ(ranking.size(), oracle.size());
  for (std::size_t i = 0; i < ranking.size(); ++i) {
    EXPECT_EQ(ranking[i].feature, oracle[i]["feature"].get<std::string>());
    EXPECT_NEAR(ranking[i].importance, oracle[i]["importance"].get<double>(),
                1e-12);
  }
  EXPECT_THAT(TopFeatures(ranking),
              ElementsAre("loan_percent_income", "loan_interest_rate", "age",
                          "income", "loan_amount", "employment_length"));
}

TEST_F(FixtureAttribution, GroupOthersSumsOmittedFeatures) {
  const std::vector<std::string> top =
      TopFeatures(RankFeatureImportance(*table_, dataset_->FeatureNames()));
  for (const AttributionVector& av : *table_) {
    const AttributionVector g = GroupOthers(av, top, *dataset_);
    double omitted = 0.0;
    for (std::size_t f = 0; f < av.phi.size(); ++f) {
      const std::string& name = dataset_->schema()[f].name;
      if (std::find(top.begin(), top.end(), name) == top.end()) {
        omitted += av.phi[f];
      }
    }
    EXPECT_NEAR(g.others, omitted, 1e-15);
    EXPECT_LE(std::abs(g.GroupedTotal() - av.Total()), 1e-12);
  }
}

TEST_F(FixtureAttribution, StackTopEqualsScore) {
  std::vector<std::size_t> shown = {4, 3, 6, 0, 5, 1};
  for (std::size_t i = 0; i < table_->size(); ++i) {
    const AttributionVector g = GroupOthers((*table_)[i], shown);
    const std::vector<StackSegment> segments =
        StackedSegments(g, dataset_->schema());
    const double score = Score(*model_, dataset_->records()[i]);
    EXPECT_LE(std::abs(segments.back().y_to - score), 1e-9);
  }
}

TEST(GlobalImportance, DummyFeatureRanksLast) {
  const Dataset d = testing::RandomDataset(40, 4, 6);
  const LogisticModel model({1.0, 0.0, -2.0, 0.5}, 0.0, d.schema());
  const auto ranking = GlobalImportance(model, d, d.records(),
                                        SampleBackground(d, 16, 42));
  EXPECT_EQ(ranking.back().feature, "f1");
  EXPECT_EQ(ranking.back().importance, 0.0);
  EXPECT_EQ(ranking.front().feature, "f2");

  const Dataset single = testing::RandomDataset(10, 1, 6);
  const LogisticModel one({1.0}, 0.0, single.schema());
  EXPECT_EQ(GlobalImportance(one, single, single.records(),
                             SampleBackground(single))
                .front()
                .feature,
            "f0");
}

TEST(RankFeatureImportance, TiesBrokenByName) {
  AttributionVector a{"a", 0.5, {0.1, -0.1, 0.2}, 0.0, std::nullopt};
  const std::vector<AttributionVector> table = {a};
  const auto ranking = RankFeatureImportance(table, {"zeta", "alpha", "mid"});
  EXPECT_THAT(ranking, ElementsAre(FeatureImportance{"mid", 0.2},
                                   FeatureImportance{"alpha", 0.1},
                                   FeatureImportance{"zeta", 0.1}));
  EXPECT_THAT(TopFeatures(ranking, 2), ElementsAre("mid", "alpha"));
}

TEST(GroupOthers, AllOrNoneDisplayed) {
  const Dataset d = testing::RandomDataset(8, 6, 5);
  const LogisticModel model({1, -1, 2, 0.5, -0.5, 0.1}, 0.0, d.schema());
  const AttributionVector av =
      ShapleyExact(model, d.records()[0], SampleBackground(d));
  const AttributionVector all =
      GroupOthers(av, {"f0", "f1", "f2", "f3", "f4", "f5"}, d);
  EXPECT_EQ(all.others, 0.0);
  const AttributionVector none = GroupOthers(av, {}, d);
  EXPECT_NEAR(none.others, Score(model, d.records()[0]) - av.base, 1e-12);
  EXPECT_EQ(none.GroupedTotal(), av.base + none.others);
}

TEST(GroupOthers, Errors) {
  const Dataset d = testing::RandomDataset(8, 8, 5);
  AttributionVector av{"x", 0.5, std::vector<double>(8, 0.01), 0.0,
                       std::nullopt};
  EXPECT_EQ(CodeOf([&] { GroupOthers(av, {"f0", "nope"}, d); }),
            ErrorCode::kUnknownFeature);
  EXPECT_EQ(CodeOf([&] {
              GroupOthers(av, {"f0", "f1", "f2", "f3", "f4", "f5", "f6"}, d);
            }),
            ErrorCode::kInvalidArgument);
  EXPECT_EQ(CodeOf([&] { GroupOthers(av, {"f0", "f0"}, d); }),
            ErrorCode::kInvalidArgument);
  EXPECT_EQ(CodeOf([&] { av.GroupedTotal(); }), ErrorCode::kUngroupedVector);
}

Schema TwoFeatureSchema() {
  Schema schema(3);
  schema[0] = testing::MakeFeature("a", 0.0, 1.0, 0.5);
  schema[1] = testing::MakeFeature("b", 0.0, 1.0, 0.5);
  schema[2] = testing::MakeFeature("c", 0.0, 1.0, 0.5);
  return schema;
}

TEST(StackedSegments, WorkedExample) {
  AttributionVector av{"x", 0.5, {-0.2, 0.3, 0.0}, 0.0,
                       std::vector<std::size_t>{0, 1}};
  const auto segments = StackedSegments(av, TwoFeatureSchema());
  ASSERT_EQ(segments.size(), 3u);
  EXPECT_EQ(segments[0], (StackSegment{SegmentKind::kNegative, "a", -0.2, 0.0,
                                       -0.2}));
  EXPECT_EQ(segments[1].kind, SegmentKind::kBase);
  EXPECT_EQ(segments[1].y_from, -0.2);
  EXPECT_DOUBLE_EQ(segments[1].y_to, 0.3);
  EXPECT_EQ(segments[2].key, "b");
  EXPECT_DOUBLE_EQ(segments[2].y_to, 0.6);
}

TEST(StackedSegments, AllZeroGivesSingleBase) {
  AttributionVector av{"x", 0.42, {0.0, 0.0, 0.0}, 0.0,
                       std::vector<std::size_t>{0, 1}};
  const auto segments = StackedSegments(av, TwoFeatureSchema());
  ASSERT_EQ(segments.size(), 1u);
  EXPECT_EQ(segments[0],
            (StackSegment{SegmentKind::kBase, "base", 0.42, 0.0, 0.42}));
}

TEST(StackedSegments, OrderingAndOthers) {
  // others = -0.3 hangs lowest-first by magnitude; ties broken by key.
  AttributionVector av{"x", 0.4, {-0.1, 0.2, 0.2}, -0.3,
                       std::vector<std::size_t>{0, 1, 2}};
  const auto segments = StackedSegments(av, TwoFeatureSchema());
  std::vector<std::string> keys;
  for (const auto& s : segments) keys.push_back(s.key);
  EXPECT_THAT(keys, ElementsAre("others", "a", "base", "b", "c"));
  double down = 0.0;
  for (const auto& s : segments) {
    if (s.kind == SegmentKind::kNegative) down += s.y_from - s.y_to;
  }
  EXPECT_DOUBLE_EQ(down, 0.4);
  EXPECT_DOUBLE_EQ(segments.back().y_to, 0.4 - 0.1 + 0.2 + 0.2 - 0.3);
  EXPECT_EQ(SegmentKindName(SegmentKind::kNegative), "negative");
  AttributionVector ungrouped = av;
  ungrouped.displayed.reset();
  EXPECT_EQ(CodeOf([&] { StackedSegments(ungrouped, TwoFeatureSchema()); }),
            ErrorCode::kUngroupedVector);
}

TEST(AttributionCsv, RoundTrip) {
  std::vector<AttributionVector> table = {
      {"s1", 0.1, {1.0 / 3.0, -2e-17}, 0.0, std::nullopt},
      {"s2", 0.7, {0.25, 0.5}, 0.125, std::nullopt},
  };
  std::stringstream buffer;
  WriteAttributionCsv(table, {"a", "b"}, buffer);
  EXPECT_EQ(buffer.str().substr(0, buffer.str().find('\n')),
            "subject_id,base,a,b,others");
  EXPECT_NE(buffer.str().find("0.33333333333333331"), std::string::npos);
  const AttributionTable back = ReadAttributionCsv(buffer);
  EXPECT_THAT(back.feature_names, ElementsAre("a", "b"));
  EXPECT_EQ(back.rows, table);
}

}  // namespace
}  // namespace revise
