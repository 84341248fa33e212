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

#include <algorithm>
#include <bit>
#include <cmath>
#include <exception>
#include <fstream>
#include <numeric>
#include <ostream>
#include <random>
#include <thread>

#include "revise/error.h"
#include "revise/text_format.h"

namespace revise {
namespace {

constexpr char kOthersKey[] = "others";
constexpr char kBaseKey[] = "base";

// Unbiased draw in [0, n). std::uniform_int_distribution is
// implementation-defined, so the reduction is done here to keep samples
// identical across standard libraries.
std::uint64_t UniformBelow(std::mt19937_64& rng, std::uint64_t n) {
  const std::uint64_t threshold = (0 - n) % n;
  while (true) {
    const std::uint64_t r = rng();
    if (r >= threshold) return r % n;
  }
}

// |S|! (M - |S| - 1)! / M! for |S| = 0..M-1, as 1 / (M * C(M-1, |S|)).
std::vector<double> ShapleyWeights(std::size_t m) {
  std::vector<double> weights(m);
  double binom = 1.0;  // C(m-1, s)
  for (std::size_t s = 0; s < m; ++s) {
    weights[s] = 1.0 / (static_cast<double>(m) * binom);
    binom = binom * static_cast<double>(m - 1 - s) / static_cast<double>(s + 1);
  }
  return weights;
}

}  // namespace

BackgroundSet SampleBackground(const Dataset& dataset, std::size_t size,
                               std::uint64_t seed) {
  const std::size_t n = dataset.size();
  if (n == 0 || size == 0) {
    throw Error(ErrorCode::kEmptyBackground, "background set is empty");
  }
  BackgroundSet background;
  if (n <= size) {
    background.records = dataset.records();
    background.source = BackgroundSource::kFull;
    return background;
  }
  std::mt19937_64 rng(seed);
  std::vector<std::size_t> indices(n);
  std::iota(indices.begin(), indices.end(), std::size_t{0});
  for (std::size_t i = 0; i < size; ++i) {
    const std::size_t j = i + UniformBelow(rng, n - i);
    std::swap(indices[i], indices[j]);
  }
  indices.resize(size);
  std::sort(indices.begin(), indices.end());
  background.records.reserve(size);
  for (const std::size_t i : indices) {
    background.records.push_back(dataset.records()[i]);
  }
  background.source = BackgroundSource::kSampled;
  return background;
}

double AttributionVector::Total() const {
  return base + std::accumulate(phi.begin(), phi.end(), 0.0);
}

double AttributionVector::GroupedTotal() const {
  if (!displayed) {
    throw Error(ErrorCode::kUngroupedVector,
                "attribution for " + subject_id + " is not grouped");
  }
  double total = base;
  for (const std::size_t i : *displayed) total += phi[i];
  return total + others;
}

AttributionVector ShapleyExact(const Scorer& scorer,
                               const SubjectRecord& subject,
                               const BackgroundSet& background) {
  const std::size_t m = subject.values.size();
  if (m != scorer.num_features()) {
    throw Error(ErrorCode::kSchemaMismatch,
                "subject " + subject.id + " does not match the model width");
  }
  if (m > kMaxShapleyFeatures) {
    throw Error(ErrorCode::kTooManyFeatures,
                "exact enumeration supports at most 15 features, got " +
                    std::to_string(m));
  }
  if (background.records.empty()) {
    throw Error(ErrorCode::kEmptyBackground, "background set is empty");
  }
  for (const SubjectRecord& b : background.records) {
    if (b.values.size() != m) {
      throw Error(ErrorCode::kSchemaMismatch,
                  "background record " + b.id + " does not match the schema");
    }
  }

  // Coalition values, indexed by bitmask over features.
  const std::size_t num_coalitions = std::size_t{1} << m;
  const double inv_b = 1.0 / static_cast<double>(background.records.size());
  std::vector<double> value(num_coalitions);
  std::vector<double> composite(m);
  for (std::size_t mask = 0; mask < num_coalitions; ++mask) {
    double sum = 0.0;
    for (const SubjectRecord& b : background.records) {
      for (std::size_t f = 0; f < m; ++f) {
        composite[f] = (mask >> f) & 1 ? subject.values[f] : b.values[f];
      }
      sum += scorer.Score(composite);
    }
    value[mask] = sum * inv_b;
  }

  const std::vector<double> weights = ShapleyWeights(m);
  AttributionVector out;
  out.subject_id = subject.id;
  out.base = value[0];
  out.phi.assign(m, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t bit = std::size_t{1} << i;
    double phi = 0.0;
    for (std::size_t mask = 0; mask < num_coalitions; ++mask) {
      if (mask & bit) continue;
      phi += weights[std::popcount(mask)] * (value[mask | bit] - value[mask]);
    }
    out.phi[i] = phi;
  }
  return out;
}

std::vector<AttributionVector> ComputeAttributionTable(
    const Scorer& scorer, std::span<const SubjectRecord> records,
    const BackgroundSet& background, unsigned num_threads) {
  std::vector<AttributionVector> table(records.size());
  if (num_threads == 0) {
    num_threads = std::max(1u, std::thread::hardware_concurrency());
  }
  num_threads = static_cast<unsigned>(
      std::min<std::size_t>(num_threads, std::max<std::size_t>(1, records.size())));
  if (num_threads <= 1) {
    for (std::size_t i = 0; i < records.size(); ++i) {
      table[i] = ShapleyExact(scorer, records[i], background);
    }
    return table;
  }

  std::vector<std::exception_ptr> failures(num_threads);
  std::vector<std::thread> workers;
  workers.reserve(num_threads);
  for (unsigned t = 0; t < num_threads; ++t) {
    workers.emplace_back([&, t] {
      try {
        for (std::size_t i = t; i < records.size(); i += num_threads) {
          table[i] = ShapleyExact(scorer, records[i], background);
        }
      } catch (...) {
        failures[t] = std::current_exception();
      }
    });
  }
  for (std::thread& w : workers) w.join();
  for (const std::exception_ptr& failure : failures) {
    if (failure) std::rethrow_exception(failure);
  }
  return table;
}

AttributionVector GroupOthers(const AttributionVector& attribution,
                              const std::vector<std::string>& displayed,
                              const Dataset& dataset) {
  std::vector<std::size_t> indices;
  indices.reserve(displayed.size());
  for (const std::string& name : displayed) {
    indices.push_back(dataset.RequireFeatureIndex(name));
  }
  return GroupOthers(attribution, std::move(indices));
}

AttributionVector GroupOthers(const AttributionVector& attribution,
                              std::vector<std::size_t> displayed) {
  if (displayed.size() > static_cast<std::size_t>(kMaxDisplayedFeatures)) {
    throw Error(ErrorCode::kInvalidArgument,
                "at most 6 features can be displayed");
  }
  std::vector<bool> shown(attribution.phi.size(), false);
  for (const std::size_t i : displayed) {
    if (i >= shown.size()) {
      throw Error(ErrorCode::kUnknownFeature,
                  "feature index out of range: " + std::to_string(i));
    }
    if (shown[i]) {
      throw Error(ErrorCode::kInvalidArgument,
                  "feature displayed twice: " + std::to_string(i));
    }
    shown[i] = true;
  }
  AttributionVector out = attribution;
  out.others = 0.0;
  for (std::size_t i = 0; i < shown.size(); ++i) {
    if (!shown[i]) out.others += attribution.phi[i];
  }
  out.displayed = std::move(displayed);
  return out;
}

std::vector<FeatureImportance> RankFeatureImportance(
    std::span<const AttributionVector> table,
    const std::vector<std::string>& feature_names) {
  std::vector<FeatureImportance> ranking(feature_names.size());
  for (std::size_t f = 0; f < feature_names.size(); ++f) {
    ranking[f].feature = feature_names[f];
  }
  for (const AttributionVector& row : table) {
    if (row.phi.size() != feature_names.size()) {
      throw Error(ErrorCode::kSchemaMismatch,
                  "attribution row width does not match the feature list");
    }
    for (std::size_t f = 0; f < feature_names.size(); ++f) {
      ranking[f].importance += std::abs(row.phi[f]);
    }
  }
  if (!table.empty()) {
    for (FeatureImportance& entry : ranking) {
      entry.importance /= static_cast<double>(table.size());
    }
  }
  std::sort(ranking.begin(), ranking.end(),
            [](const FeatureImportance& a, const FeatureImportance& b) {
              if (a.importance != b.importance) {
                return a.importance > b.importance;
              }
              return a.feature < b.feature;
            });
  return ranking;
}

std::vector<FeatureImportance> GlobalImportance(
    const Scorer& scorer, const Dataset& dataset,
    std::span<const SubjectRecord> subjects, const BackgroundSet& background) {
  if (subjects.empty()) {
    throw Error(ErrorCode::kInvalidArgument,
                "global importance needs at least one subject");
  }
  const std::vector<AttributionVector> table =
      ComputeAttributionTable(scorer, subjects, background);
  return RankFeatureImportance(table, dataset.FeatureNames());
}

std::vector<std::string> TopFeatures(
    const std::vector<FeatureImportance>& ranking, std::size_t count) {
  count = std::min({count, ranking.size(),
                    static_cast<std::size_t>(kMaxDisplayedFeatures)});
  std::vector<std::string> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(ranking[i].feature);
  return out;
}

std::vector<StackSegment> StackedSegments(const AttributionVector& attribution,
                                          const Schema& schema) {
  if (!attribution.displayed) {
    throw Error(ErrorCode::kUngroupedVector,
                "attribution for " + attribution.subject_id +
                    " is not grouped");
  }
  struct Entry {
    std::string key;
    double phi;
  };
  std::vector<Entry> negative;
  std::vector<Entry> positive;
  auto add = [&](const std::string& key, double phi) {
    if (phi < 0) {
      negative.push_back({key, phi});
    } else if (phi > 0) {
      positive.push_back({key, phi});
    }
  };
  for (const std::size_t i : *attribution.displayed) {
    add(schema.at(i).name, attribution.phi.at(i));
  }
  add(kOthersKey, attribution.others);

  auto by_magnitude = [](const Entry& a, const Entry& b) {
    const double ma = std::abs(a.phi);
    const double mb = std::abs(b.phi);
    if (ma != mb) return ma > mb;
    return a.key < b.key;
  };
  std::sort(negative.begin(), negative.end(), by_magnitude);
  std::sort(positive.begin(), positive.end(), by_magnitude);

  std::vector<StackSegment> segments;
  segments.reserve(negative.size() + positive.size() + 1);
  double y = 0.0;
  for (const Entry& e : negative) {
    segments.push_back({SegmentKind::kNegative, e.key, e.phi, y, y + e.phi});
    y += e.phi;
  }
  segments.push_back(
      {SegmentKind::kBase, kBaseKey, attribution.base, y, y + attribution.base});
  y += attribution.base;
  for (const Entry& e : positive) {
    segments.push_back({SegmentKind::kPositive, e.key, e.phi, y, y + e.phi});
    y += e.phi;
  }
  return segments;
}

std::string_view SegmentKindName(SegmentKind kind) {
  switch (kind) {
    case SegmentKind::kNegative:
      return "negative";
    case SegmentKind::kBase:
      return "base";
    case SegmentKind::kPositive:
      return "positive";
  }
  return "unknown";
}

void WriteAttributionCsv(std::span<const AttributionVector> table,
                         const std::vector<std::string>& feature_names,
                         std::ostream& out) {
  out << "subject_id,base";
  for (const std::string& name : feature_names) out << ',' << name;
  out << ",others\n";
  for (const AttributionVector& row : table) {
    if (row.phi.size() != feature_names.size()) {
      throw Error(ErrorCode::kSchemaMismatch,
                  "attribution row width does not match the feature list");
    }
    out << row.subject_id << ',' << FormatDouble(row.base);
    for (const double phi : row.phi) out << ',' << FormatDouble(phi);
    out << ',' << FormatDouble(row.others) << '\n';
  }
}

void SaveAttributionCsv(std::span<const AttributionVector> table,
                        const std::vector<std::string>& feature_names,
                        const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
  WriteAttributionCsv(table, feature_names, out);
  if (!out) throw Error(ErrorCode::kIoError, "write failed: " + path.string());
}

AttributionTable ReadAttributionCsv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) {
    throw Error(ErrorCode::kMalformedRow, "attribution CSV has no header");
  }
  const std::vector<std::string> header = SplitCells(line, ',');
  if (header.size() < 3 || header[0] != "subject_id" || header[1] != "base" ||
      header.back() != kOthersKey) {
    throw Error(ErrorCode::kMalformedRow,
                "attribution CSV header must be subject_id,base,...,others");
  }
  AttributionTable table;
  table.feature_names.assign(header.begin() + 2, header.end() - 1);
  std::size_t line_number = 1;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.empty() || line == "\r") continue;
    const std::vector<std::string> cells = SplitCells(line, ',');
    if (cells.size() != header.size()) {
      throw Error(ErrorCode::kMalformedRow,
                  "attribution row " + std::to_string(line_number) +
                      " has the wrong number of cells");
    }
    AttributionVector row;
    row.subject_id = cells[0];
    std::vector<double> numbers;
    for (std::size_t c = 1; c < cells.size(); ++c) {
      const auto value = ParseDouble(cells[c]);
      if (!value) {
        throw Error(ErrorCode::kNonNumericCell,
                    "non-numeric cell at row " + std::to_string(line_number) +
                        ", column " + header[c]);
      }
      numbers.push_back(*value);
    }
    row.base = numbers.front();
    row.others = numbers.back();
    row.phi.assign(numbers.begin() + 1, numbers.end() - 1);
    table.rows.push_back(std::move(row));
  }
  return table;
}

}  // namespace revise
