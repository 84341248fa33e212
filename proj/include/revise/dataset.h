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

// Tabular subject data: feature schema, subject records, and the min/max
// normalization shared by the model, the attribution code and the planner.
//
// Feature values are stored as dense vectors aligned with the schema order;
// name-based lookups go through `Dataset::FeatureIndex`.

#ifndef REVISE_DATASET_H_
#define REVISE_DATASET_H_

#include <cstddef>
#include <filesystem>
#include <istream>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace revise {

// Number of features that can be shown in the explorer views.
inline constexpr int kMaxDisplayedFeatures = 6;

struct FeatureSchema {
  std::string name;
  // Raw units.
  double min = 0.0;
  double max = 1.0;
  double mean = 0.0;
  bool is_mutable = true;
  // 1..kMaxDisplayedFeatures for the displayed features, unset otherwise.
  std::optional<int> display_rank;

  bool operator==(const FeatureSchema&) const = default;
};

using Schema = std::vector<FeatureSchema>;

struct SubjectRecord {
  std::string id;
  // Raw values, aligned with the schema.
  std::vector<double> values;
  std::optional<int> label;

  bool operator==(const SubjectRecord&) const = default;
};

// Feature values mapped to [0, 1] by (v - min) / (max - min).
struct NormalizedVector {
  std::vector<double> values;

  bool operator==(const NormalizedVector&) const = default;
};

// Immutable after construction, except for the display-rank and mutability
// annotations which are set once by the owner before sharing.
class Dataset {
 public:
  Dataset(Schema schema, std::vector<SubjectRecord> records);

  const Schema& schema() const { return schema_; }
  const std::vector<SubjectRecord>& records() const { return records_; }
  std::size_t num_features() const { return schema_.size(); }
  std::size_t size() const { return records_.size(); }

  std::vector<std::string> FeatureNames() const;
  std::optional<std::size_t> FeatureIndex(std::string_view name) const;
  // Throws kUnknownFeature.
  std::size_t RequireFeatureIndex(std::string_view name) const;

  std::optional<std::size_t> SubjectIndex(std::string_view id) const;
  // Throws kUnknownSubject.
  const SubjectRecord& Subject(std::string_view id) const;

  // Assigns ranks 1..n to `ordered` (n <= kMaxDisplayedFeatures) and clears
  // every other rank.
  void SetDisplayRanks(const std::vector<std::string>& ordered);
  // Features listed in `immutable` become immutable, all others mutable.
  void SetImmutable(const std::vector<std::string>& immutable);

  // Indices of the ranked features, in rank order.
  std::vector<std::size_t> DisplayedFeatures() const;

 private:
  Schema schema_;
  std::vector<SubjectRecord> records_;
  std::unordered_map<std::string, std::size_t> feature_index_;
  std::unordered_map<std::string, std::size_t> subject_index_;
};

// Reads a header-first CSV with an `id` column, an optional `label` column
// and numeric feature columns. Min, max and mean are computed from the data.
Dataset LoadCsv(const std::filesystem::path& path);
Dataset ParseCsv(std::istream& in);

NormalizedVector Normalize(std::span<const double> values,
                           const Schema& schema);
inline NormalizedVector Normalize(const SubjectRecord& record,
                                  const Schema& schema) {
  return Normalize(record.values, schema);
}

// Inverse of Normalize. Entries further than 1e-12 outside [0, 1] raise
// kOutOfRange.
std::vector<double> Denormalize(const NormalizedVector& normalized,
                                const Schema& schema);

NormalizedVector DatasetMeanNormalized(const Schema& schema);

struct ClampResult {
  std::vector<double> values;
  bool clamped = false;
};

// Clamps externally supplied raw values into each feature's [min, max].
ClampResult ClampToSchema(std::span<const double> values,
                          const Schema& schema);

}  // namespace revise

#endif  // REVISE_DATASET_H_
