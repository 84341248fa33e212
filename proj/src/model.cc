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

#include "revise/model.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <ostream>

#include "revise/error.h"
#include "revise/text_format.h"

namespace revise {
namespace {

constexpr char kBiasKey[] = "__bias__";

// log(1 + exp(z)) without overflow.
double Softplus(double z) {
  return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z)));
}

}  // namespace

double Score(const Scorer& scorer, const SubjectRecord& record) {
  if (record.values.size() != scorer.num_features()) {
    throw Error(ErrorCode::kSchemaMismatch,
                "subject " + record.id + " has " +
                    std::to_string(record.values.size()) +
                    " values, model expects " +
                    std::to_string(scorer.num_features()));
  }
  return scorer.Score(record.values);
}

std::vector<double> ScoreBatch(const Scorer& scorer,
                               std::span<const SubjectRecord> records) {
  std::vector<double> out;
  out.reserve(records.size());
  for (const SubjectRecord& r : records) out.push_back(Score(scorer, r));
  return out;
}

double Sigmoid(double z) {
  double p;
  if (z >= 0) {
    p = 1.0 / (1.0 + std::exp(-z));
  } else {
    const double e = std::exp(z);
    p = e / (1.0 + e);
  }
  // Keep the output strictly inside (0, 1) even for saturated logits.
  return std::clamp(p, std::numeric_limits<double>::denorm_min(),
                    std::nextafter(1.0, 0.0));
}

LogisticModel::LogisticModel(std::vector<double> weights, double bias,
                             const Schema& schema)
    : weights_(std::move(weights)), bias_(bias) {
  if (weights_.size() != schema.size()) {
    throw Error(ErrorCode::kSchemaMismatch,
                "model has " + std::to_string(weights_.size()) +
                    " weights, schema has " + std::to_string(schema.size()));
  }
  feature_order_.reserve(schema.size());
  offset_.reserve(schema.size());
  scale_.reserve(schema.size());
  for (const FeatureSchema& f : schema) {
    feature_order_.push_back(f.name);
    offset_.push_back(f.min);
    scale_.push_back(f.max - f.min);
  }
}

double LogisticModel::Logit(std::span<const double> raw_values) const {
  double z = bias_;
  for (std::size_t i = 0; i < weights_.size(); ++i) {
    z += weights_[i] * ((raw_values[i] - offset_[i]) / scale_[i]);
  }
  return z;
}

double LogisticModel::Score(std::span<const double> raw_values) const {
  return Sigmoid(Logit(raw_values));
}

LogisticObjective::LogisticObjective(
    std::vector<std::vector<double>> normalized_rows,
    std::vector<double> labels, double l2_lambda)
    : rows_(std::move(normalized_rows)),
      labels_(std::move(labels)),
      l2_lambda_(l2_lambda),
      num_features_(rows_.empty() ? 0 : rows_.front().size()) {
  if (rows_.size() != labels_.size() || rows_.empty()) {
    throw Error(ErrorCode::kInvalidArgument,
                "objective needs one label per non-empty row set");
  }
}

LogisticObjective LogisticObjective::FromDataset(const Dataset& dataset,
                                                 double l2_lambda) {
  std::vector<std::vector<double>> rows;
  std::vector<double> labels;
  bool has_positive = false;
  bool has_negative = false;
  for (const SubjectRecord& r : dataset.records()) {
    if (!r.label) {
      throw Error(ErrorCode::kNoLabels, "subject " + r.id + " has no label");
    }
    rows.push_back(Normalize(r, dataset.schema()).values);
    labels.push_back(static_cast<double>(*r.label));
    (*r.label == 1 ? has_positive : has_negative) = true;
  }
  if (!has_positive || !has_negative) {
    throw Error(ErrorCode::kSingleClassData,
                "training data contains a single class");
  }
  return LogisticObjective(std::move(rows), std::move(labels), l2_lambda);
}

double LogisticObjective::Loss(std::span<const double> params) const {
  const double bias = params[num_features_];
  double total = 0.0;
  for (std::size_t n = 0; n < rows_.size(); ++n) {
    double z = bias;
    for (std::size_t j = 0; j < num_features_; ++j) {
      z += params[j] * rows_[n][j];
    }
    // -[y log p + (1 - y) log(1 - p)] = softplus(z) - y z.
    total += Softplus(z) - labels_[n] * z;
  }
  double penalty = 0.0;
  for (std::size_t j = 0; j < num_features_; ++j) {
    penalty += params[j] * params[j];
  }
  return total / static_cast<double>(rows_.size()) +
         0.5 * l2_lambda_ * penalty;
}

std::vector<double> LogisticObjective::Gradient(
    std::span<const double> params) const {
  const double bias = params[num_features_];
  std::vector<double> grad(num_features_ + 1, 0.0);
  for (std::size_t n = 0; n < rows_.size(); ++n) {
    double z = bias;
    for (std::size_t j = 0; j < num_features_; ++j) {
      z += params[j] * rows_[n][j];
    }
    const double residual = Sigmoid(z) - labels_[n];
    for (std::size_t j = 0; j < num_features_; ++j) {
      grad[j] += residual * rows_[n][j];
    }
    grad[num_features_] += residual;
  }
  const double inv_n = 1.0 / static_cast<double>(rows_.size());
  for (std::size_t j = 0; j < num_features_; ++j) {
    grad[j] = grad[j] * inv_n + l2_lambda_ * params[j];
  }
  grad[num_features_] *= inv_n;
  return grad;
}

TrainingResult TrainLogistic(const Dataset& dataset,
                             const TrainingConfig& config) {
  if (!(config.learning_rate > 0) || config.epochs < 0 ||
      !(config.l2_lambda >= 0)) {
    throw Error(ErrorCode::kInvalidArgument,
                "learning rate must be positive, epochs and l2 non-negative");
  }
  const LogisticObjective objective =
      LogisticObjective::FromDataset(dataset, config.l2_lambda);
  std::vector<double> params(objective.num_parameters(), 0.0);
  std::vector<double> history;
  history.reserve(static_cast<std::size_t>(config.epochs) + 1);
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    history.push_back(objective.Loss(params));
    const std::vector<double> grad = objective.Gradient(params);
    for (std::size_t j = 0; j < params.size(); ++j) {
      params[j] -= config.learning_rate * grad[j];
    }
  }
  history.push_back(objective.Loss(params));
  const double bias = params.back();
  params.pop_back();
  return TrainingResult{LogisticModel(std::move(params), bias, dataset.schema()),
                        std::move(history)};
}

void WriteModel(const LogisticModel& model, std::ostream& out) {
  for (std::size_t i = 0; i < model.num_features(); ++i) {
    out << model.feature_order()[i] << '\t' << FormatDouble(model.weights()[i])
        << '\n';
  }
  out << kBiasKey << '\t' << FormatDouble(model.bias()) << '\n';
}

void SaveModel(const LogisticModel& model, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
  WriteModel(model, out);
  if (!out) throw Error(ErrorCode::kIoError, "write failed: " + path.string());
}

LogisticModel ReadModel(std::istream& in, const Schema& schema) {
  std::map<std::string, double> entries;
  std::string line;
  int line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.empty() || line == "\r") continue;
    const std::vector<std::string> cells = SplitCells(line, '\t');
    const std::optional<double> value =
        cells.size() == 2 ? ParseDouble(cells[1]) : std::nullopt;
    if (!value) {
      throw Error(ErrorCode::kMalformedModel,
                  "bad model line " + std::to_string(line_number) + ": '" +
                      line + "'");
    }
    if (!entries.emplace(cells[0], *value).second) {
      throw Error(ErrorCode::kMalformedModel,
                  "duplicate model entry: " + cells[0]);
    }
  }
  const auto bias = entries.find(kBiasKey);
  if (bias == entries.end()) {
    throw Error(ErrorCode::kMalformedModel, "model has no __bias__ line");
  }
  if (entries.size() != schema.size() + 1) {
    throw Error(ErrorCode::kSchemaMismatch,
                "model has " + std::to_string(entries.size() - 1) +
                    " weights, schema has " + std::to_string(schema.size()));
  }
  std::vector<double> weights;
  weights.reserve(schema.size());
  for (const FeatureSchema& f : schema) {
    const auto it = entries.find(f.name);
    if (it == entries.end()) {
      throw Error(ErrorCode::kSchemaMismatch,
                  "model has no weight for feature " + f.name);
    }
    weights.push_back(it->second);
  }
  return LogisticModel(std::move(weights), bias->second, schema);
}

LogisticModel LoadModel(const std::filesystem::path& path,
                        const Schema& schema) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  return ReadModel(in, schema);
}

}  // namespace revise
