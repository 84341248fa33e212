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

#include "revise/dataset.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <unordered_set>

#include "revise/error.h"
#include "revise/text_format.h"

namespace revise {
namespace {

constexpr double kDenormalizeSlack = 1e-12;

}  // namespace

Dataset::Dataset(Schema schema, std::vector<SubjectRecord> records)
    : schema_(std::move(schema)), records_(std::move(records)) {
  for (std::size_t i = 0; i < schema_.size(); ++i) {
    const FeatureSchema& f = schema_[i];
    if (!(f.min < f.max)) {
      throw Error(ErrorCode::kConstantColumn, "constant column: " + f.name);
    }
    if (!feature_index_.emplace(f.name, i).second) {
      throw Error(ErrorCode::kInvalidArgument,
                  "duplicate feature name: " + f.name);
    }
  }
  for (std::size_t i = 0; i < records_.size(); ++i) {
    const SubjectRecord& r = records_[i];
    if (r.values.size() != schema_.size()) {
      throw Error(ErrorCode::kSchemaMismatch,
                  "subject " + r.id + " has " +
                      std::to_string(r.values.size()) + " values, schema has " +
                      std::to_string(schema_.size()));
    }
    if (!subject_index_.emplace(r.id, i).second) {
      throw Error(ErrorCode::kDuplicateId, "duplicate id: " + r.id);
    }
  }
}

std::vector<std::string> Dataset::FeatureNames() const {
  std::vector<std::string> names;
  names.reserve(schema_.size());
  for (const FeatureSchema& f : schema_) names.push_back(f.name);
  return names;
}

std::optional<std::size_t> Dataset::FeatureIndex(std::string_view name) const {
  const auto it = feature_index_.find(std::string(name));
  if (it == feature_index_.end()) return std::nullopt;
  return it->second;
}

std::size_t Dataset::RequireFeatureIndex(std::string_view name) const {
  const auto index = FeatureIndex(name);
  if (!index) {
    throw Error(ErrorCode::kUnknownFeature,
                "unknown feature: " + std::string(name));
  }
  return *index;
}

std::optional<std::size_t> Dataset::SubjectIndex(std::string_view id) const {
  const auto it = subject_index_.find(std::string(id));
  if (it == subject_index_.end()) return std::nullopt;
  return it->second;
}

const SubjectRecord& Dataset::Subject(std::string_view id) const {
  const auto index = SubjectIndex(id);
  if (!index) {
    throw Error(ErrorCode::kUnknownSubject,
                "unknown subject: " + std::string(id));
  }
  return records_[*index];
}

void Dataset::SetDisplayRanks(const std::vector<std::string>& ordered) {
  if (ordered.size() > static_cast<std::size_t>(kMaxDisplayedFeatures)) {
    throw Error(ErrorCode::kInvalidArgument,
                "at most 6 features can be displayed");
  }
  std::vector<std::size_t> indices;
  for (const std::string& name : ordered) {
    const std::size_t index = RequireFeatureIndex(name);
    if (std::find(indices.begin(), indices.end(), index) != indices.end()) {
      throw Error(ErrorCode::kInvalidArgument,
                  "feature listed twice for display: " + name);
    }
    indices.push_back(index);
  }
  for (FeatureSchema& f : schema_) f.display_rank.reset();
  for (std::size_t rank = 0; rank < indices.size(); ++rank) {
    schema_[indices[rank]].display_rank = static_cast<int>(rank + 1);
  }
}

void Dataset::SetImmutable(const std::vector<std::string>& immutable) {
  std::vector<bool> flags(schema_.size(), true);
  for (const std::string& name : immutable) {
    flags[RequireFeatureIndex(name)] = false;
  }
  for (std::size_t i = 0; i < schema_.size(); ++i) {
    schema_[i].is_mutable = flags[i];
  }
}

std::vector<std::size_t> Dataset::DisplayedFeatures() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < schema_.size(); ++i) {
    if (schema_[i].display_rank) out.push_back(i);
  }
  std::sort(out.begin(), out.end(), [&](std::size_t a, std::size_t b) {
    return *schema_[a].display_rank < *schema_[b].display_rank;
  });
  return out;
}

Dataset LoadCsv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  }
  return ParseCsv(in);
}

Dataset ParseCsv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) {
    throw Error(ErrorCode::kMalformedRow, "missing header row");
  }
  // Tolerate a UTF-8 byte order mark.
  if (line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
  const std::vector<std::string> header = SplitCells(line, ',');

  std::optional<std::size_t> id_column;
  std::optional<std::size_t> label_column;
  std::vector<std::size_t> feature_columns;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (header[c] == "id") {
      id_column = c;
    } else if (header[c] == "label") {
      label_column = c;
    } else {
      feature_columns.push_back(c);
    }
  }
  if (!id_column) {
    throw Error(ErrorCode::kMissingIdColumn, "CSV has no `id` column");
  }

  std::vector<SubjectRecord> records;
  std::unordered_set<std::string> seen_ids;
  std::size_t line_number = 1;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.empty() || line == "\r") continue;
    const std::vector<std::string> cells = SplitCells(line, ',');
    if (cells.size() != header.size()) {
      throw Error(ErrorCode::kMalformedRow,
                  "row " + std::to_string(line_number) + " has " +
                      std::to_string(cells.size()) + " cells, expected " +
                      std::to_string(header.size()));
    }
    SubjectRecord record;
    record.id = cells[*id_column];
    if (!seen_ids.insert(record.id).second) {
      throw Error(ErrorCode::kDuplicateId, "duplicate id: " + record.id);
    }
    record.values.reserve(feature_columns.size());
    for (const std::size_t c : feature_columns) {
      const auto value = ParseDouble(cells[c]);
      if (!value) {
        throw Error(ErrorCode::kNonNumericCell,
                    "non-numeric cell at row " + std::to_string(line_number) +
                        ", column " + header[c] + ": '" + cells[c] + "'");
      }
      record.values.push_back(*value);
    }
    if (label_column && !cells[*label_column].empty()) {
      const auto label = ParseDouble(cells[*label_column]);
      if (!label || (*label != 0.0 && *label != 1.0)) {
        throw Error(ErrorCode::kInvalidLabel,
                    "label at row " + std::to_string(line_number) +
                        " must be 0 or 1: '" + cells[*label_column] + "'");
      }
      record.label = static_cast<int>(*label);
    }
    records.push_back(std::move(record));
  }
  if (records.empty()) {
    throw Error(ErrorCode::kMalformedRow, "CSV has no data rows");
  }

  Schema schema;
  schema.reserve(feature_columns.size());
  for (std::size_t f = 0; f < feature_columns.size(); ++f) {
    FeatureSchema feature;
    feature.name = header[feature_columns[f]];
    feature.min = std::numeric_limits<double>::infinity();
    feature.max = -std::numeric_limits<double>::infinity();
    double sum = 0.0;
    for (const SubjectRecord& r : records) {
      feature.min = std::min(feature.min, r.values[f]);
      feature.max = std::max(feature.max, r.values[f]);
      sum += r.values[f];
    }
    if (!(feature.min < feature.max)) {
      throw Error(ErrorCode::kConstantColumn,
                  "constant column: " + feature.name);
    }
    feature.mean = std::clamp(sum / static_cast<double>(records.size()),
                              feature.min, feature.max);
    schema.push_back(std::move(feature));
  }
  return Dataset(std::move(schema), std::move(records));
}

NormalizedVector Normalize(std::span<const double> values,
                           const Schema& schema) {
  if (values.size() != schema.size()) {
    throw Error(ErrorCode::kSchemaMismatch,
                "value count does not match schema");
  }
  NormalizedVector out;
  out.values.resize(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    out.values[i] =
        (values[i] - schema[i].min) / (schema[i].max - schema[i].min);
  }
  return out;
}

std::vector<double> Denormalize(const NormalizedVector& normalized,
                                const Schema& schema) {
  if (normalized.values.size() != schema.size()) {
    throw Error(ErrorCode::kSchemaMismatch,
                "value count does not match schema");
  }
  std::vector<double> out(schema.size());
  for (std::size_t i = 0; i < schema.size(); ++i) {
    double n = normalized.values[i];
    if (!(n >= -kDenormalizeSlack && n <= 1.0 + kDenormalizeSlack)) {
      throw Error(ErrorCode::kOutOfRange,
                  "normalized value out of range for " + schema[i].name);
    }
    n = std::clamp(n, 0.0, 1.0);
    const FeatureSchema& f = schema[i];
    // Endpoints are exact so the bounds map back to min and max bitwise.
    out[i] = n == 1.0 ? f.max : f.min + n * (f.max - f.min);
  }
  return out;
}

NormalizedVector DatasetMeanNormalized(const Schema& schema) {
  NormalizedVector out;
  out.values.reserve(schema.size());
  for (const FeatureSchema& f : schema) {
    out.values.push_back((f.mean - f.min) / (f.max - f.min));
  }
  return out;
}

ClampResult ClampToSchema(std::span<const double> values,
                          const Schema& schema) {
  if (values.size() != schema.size()) {
    throw Error(ErrorCode::kSchemaMismatch,
                "value count does not match schema");
  }
  ClampResult out;
  out.values.resize(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    out.values[i] = std::clamp(values[i], schema[i].min, schema[i].max);
    if (out.values[i] != values[i]) out.clamped = true;
  }
  return out;
}

}  // namespace revise
