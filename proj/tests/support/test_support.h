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

// Shared helpers for the unit, integration and acceptance suites.

#ifndef REVISE_TESTS_SUPPORT_TEST_SUPPORT_H_
#define REVISE_TESTS_SUPPORT_TEST_SUPPORT_H_

#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "revise/dataset.h"
#include "revise/engine.h"
#include "revise/model.h"

namespace revise::testing {

inline std::filesystem::path SourceDir() { return REVISE_SOURCE_DIR; }
inline std::filesystem::path FixtureCsv() {
  return SourceDir() / "data" / "credit_risk_fixture.csv";
}
inline std::filesystem::path FixtureModel() {
  return SourceDir() / "data" / "credit_risk_model.tsv";
}
inline std::filesystem::path FixturesDir() {
  return SourceDir() / "tests" / "fixtures";
}

inline std::string ReadFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

inline nlohmann::json ReadJson(const std::filesystem::path& path) {
  return nlohmann::json::parse(ReadFile(path));
}

inline FeatureSchema MakeFeature(std::string name, double min, double max,
                                 double mean) {
  FeatureSchema f;
  f.name = std::move(name);
  f.min = min;
  f.max = max;
  f.mean = mean;
  return f;
}

inline Dataset ParseCsvText(const std::string& text) {
  std::istringstream in(text);
  return ParseCsv(in);
}

// Fresh scratch directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("revise_test_" + std::to_string(rd()) + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const {
    return path_ / name;
  }

 private:
  std::filesystem::path path_;
};

// b + sum_f w_f * n_f(x), no squashing. Not a probability; used for the
// closed-form Shapley checks.
class LinearScorer final : public Scorer {
 public:
  LinearScorer(std::vector<double> weights, double bias, const Schema& schema)
      : weights_(std::move(weights)), bias_(bias), schema_(schema) {}

  std::size_t num_features() const override { return weights_.size(); }
  double Score(std::span<const double> raw) const override {
    double total = bias_;
    for (std::size_t f = 0; f < weights_.size(); ++f) {
      total += weights_[f] * ((raw[f] - schema_[f].min) /
                              (schema_[f].max - schema_[f].min));
    }
    return total;
  }

  const std::vector<double>& weights() const { return weights_; }

 private:
  std::vector<double> weights_;
  double bias_;
  Schema schema_;
};

class ConstantScorer final : public Scorer {
 public:
  ConstantScorer(std::size_t num_features, double value)
      : num_features_(num_features), value_(value) {}
  std::size_t num_features() const override { return num_features_; }
  double Score(std::span<const double>) const override { return value_; }

 private:
  std::size_t num_features_;
  double value_;
};

// Wraps an arbitrary function of the raw values.
class FunctionScorer final : public Scorer {
 public:
  FunctionScorer(std::size_t num_features,
                 std::function<double(std::span<const double>)> fn)
      : num_features_(num_features), fn_(std::move(fn)) {}
  std::size_t num_features() const override { return num_features_; }
  double Score(std::span<const double> raw) const override { return fn_(raw); }

 private:
  std::size_t num_features_;
  std::function<double(std::span<const double>)> fn_;
};

inline std::shared_ptr<const Engine> FixtureEngine(EngineOptions options = {}) {
  Dataset dataset = LoadCsv(FixtureCsv());
  auto model =
      std::make_shared<LogisticModel>(LoadModel(FixtureModel(), dataset.schema()));
  return std::make_shared<const Engine>(std::move(dataset), std::move(model),
                                        std::move(options));
}

// Small synthetic dataset: `rows` subjects, `features` uniform columns.
inline Dataset RandomDataset(std::size_t rows, std::size_t features,
                             std::uint32_t seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Schema schema(features);
  std::vector<SubjectRecord> records(rows);
  for (std::size_t r = 0; r < rows; ++r) {
    records[r].id = "r" + std::to_string(1000 + r);
    for (std::size_t f = 0; f < features; ++f) {
      records[r].values.push_back(10.0 * f + 100.0 * unit(rng));
    }
    records[r].label = unit(rng) < 0.5 ? 0 : 1;
  }
  for (std::size_t f = 0; f < features; ++f) {
    schema[f].name = "f" + std::to_string(f);
    schema[f].min = 10.0 * f;
    schema[f].max = 10.0 * f + 100.0;
    double sum = 0.0;
    for (const SubjectRecord& r : records) sum += r.values[f];
    schema[f].mean = sum / static_cast<double>(rows);
  }
  return Dataset(std::move(schema), std::move(records));
}

}  // namespace revise::testing

#endif  // REVISE_TESTS_SUPPORT_TEST_SUPPORT_H_
