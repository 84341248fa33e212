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

#ifndef REVISE_MODEL_H_
#define REVISE_MODEL_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "revise/dataset.h"

namespace revise {

// Black-box probability scorer. Implementations must be deterministic and
// safe to call concurrently.
class Scorer {
 public:
  virtual ~Scorer() = default;

  virtual std::size_t num_features() const = 0;

  // `raw_values` are in raw units, aligned with the dataset schema. Returns
  // the probability of the favorable outcome.
  virtual double Score(std::span<const double> raw_values) const = 0;
};

// Throws kSchemaMismatch if the record width differs from the scorer's.
double Score(const Scorer& scorer, const SubjectRecord& record);
std::vector<double> ScoreBatch(const Scorer& scorer,
                               std::span<const SubjectRecord> records);

double Sigmoid(double z);

// score(x) = sigmoid(bias + sum_f w_f * n_f(x)) where n_f is the min/max
// normalized value of feature f.
class LogisticModel final : public Scorer {
 public:
  // `schema` supplies the normalization ranges; its names must equal
  // `feature_order` and the weight count must match.
  LogisticModel(std::vector<double> weights, double bias, const Schema& schema);

  std::size_t num_features() const override { return weights_.size(); }
  double Score(std::span<const double> raw_values) const override;
  double Logit(std::span<const double> raw_values) const;

  const std::vector<std::string>& feature_order() const {
    return feature_order_;
  }
  const std::vector<double>& weights() const { return weights_; }
  double bias() const { return bias_; }

 private:
  std::vector<std::string> feature_order_;
  std::vector<double> weights_;
  double bias_;
  std::vector<double> offset_;
  std::vector<double> scale_;
};

struct TrainingConfig {
  double learning_rate = 0.1;
  int epochs = 2000;
  double l2_lambda = 1e-3;
  // Full-batch descent from zero weights consumes no randomness; the seed is
  // carried so every command shares the same reproducibility flag.
  std::uint64_t seed = 42;
};

// Mean cross-entropy plus (l2_lambda / 2) * |w|^2 over normalized features.
// Parameters are laid out as (w_0, ..., w_{M-1}, bias); the bias is not
// regularized.
class LogisticObjective {
 public:
  LogisticObjective(std::vector<std::vector<double>> normalized_rows,
                    std::vector<double> labels, double l2_lambda);

  static LogisticObjective FromDataset(const Dataset& dataset,
                                       double l2_lambda);

  std::size_t num_parameters() const { return num_features_ + 1; }
  double Loss(std::span<const double> params) const;
  std::vector<double> Gradient(std::span<const double> params) const;

 private:
  std::vector<std::vector<double>> rows_;
  std::vector<double> labels_;
  double l2_lambda_;
  std::size_t num_features_;
};

struct TrainingResult {
  LogisticModel model;
  // Loss before each epoch, followed by the final loss; epochs + 1 entries.
  std::vector<double> loss_history;
};

// Errors: kNoLabels if any record lacks a label, kSingleClassData if only one
// class is present, kInvalidArgument for a bad config.
TrainingResult TrainLogistic(const Dataset& dataset,
                             const TrainingConfig& config);

// Flat text: `name<TAB>weight` per feature, then `__bias__<TAB>bias`.
void WriteModel(const LogisticModel& model, std::ostream& out);
void SaveModel(const LogisticModel& model, const std::filesystem::path& path);
LogisticModel ReadModel(std::istream& in, const Schema& schema);
LogisticModel LoadModel(const std::filesystem::path& path,
                        const Schema& schema);

}  // namespace revise

#endif  // REVISE_MODEL_H_
