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

// Exact interventional Shapley values by coalition enumeration.
//
// For a subject x, a background set {b_1..b_B} and a coalition S of features,
// the value function is
//
//   v(S) = 1/B * sum_k score(x_S, (b_k)_{N \ S})
//
// i.e. the subject's values on S and the background record's values
// elsewhere. Attributions follow the Shapley formula
//
//   phi_i = sum_{S ⊆ N \ {i}} |S|! (M - |S| - 1)! / M! * (v(S ∪ {i}) - v(S))
//
// with base = v(∅). Each of the 2^M coalition values is evaluated once per
// subject, so M is bounded by kMaxShapleyFeatures.

#ifndef REVISE_ATTRIBUTION_H_
#define REVISE_ATTRIBUTION_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "revise/dataset.h"
#include "revise/model.h"

namespace revise {

inline constexpr std::size_t kMaxShapleyFeatures = 15;
inline constexpr std::size_t kDefaultBackgroundSize = 32;
inline constexpr std::uint64_t kDefaultSeed = 42;

enum class BackgroundSource { kSampled, kFull };

struct BackgroundSet {
  std::vector<SubjectRecord> records;
  BackgroundSource source = BackgroundSource::kFull;
};

// Uniform sample of `size` subjects without replacement, returned in dataset
// order. The whole dataset is used when it has at most `size` subjects. The
// draw only depends on the seed and the dataset size.
BackgroundSet SampleBackground(const Dataset& dataset,
                               std::size_t size = kDefaultBackgroundSize,
                               std::uint64_t seed = kDefaultSeed);

struct AttributionVector {
  std::string subject_id;
  // v(∅), probability units.
  double base = 0.0;
  // One entry per schema feature, always complete.
  std::vector<double> phi;
  // Sum of phi over the features outside `displayed`. Zero until grouped.
  double others = 0.0;
  // Displayed feature indices in display order; set by GroupOthers.
  std::optional<std::vector<std::size_t>> displayed;

  bool grouped() const { return displayed.has_value(); }
  // base + sum of all phi.
  double Total() const;
  // base + sum of displayed phi + others. Requires grouped().
  double GroupedTotal() const;

  bool operator==(const AttributionVector&) const = default;
};

// Errors: kTooManyFeatures, kEmptyBackground, kSchemaMismatch.
AttributionVector ShapleyExact(const Scorer& scorer,
                               const SubjectRecord& subject,
                               const BackgroundSet& background);

// Attributions for every record; subjects are spread over `num_threads`
// workers (0 = hardware concurrency). Output order follows `records`.
std::vector<AttributionVector> ComputeAttributionTable(
    const Scorer& scorer, std::span<const SubjectRecord> records,
    const BackgroundSet& background, unsigned num_threads = 0);

// Collapses every feature outside `displayed` into `others`. Errors:
// kUnknownFeature, kInvalidArgument (more than six or repeated features).
AttributionVector GroupOthers(const AttributionVector& attribution,
                              const std::vector<std::string>& displayed,
                              const Dataset& dataset);
AttributionVector GroupOthers(const AttributionVector& attribution,
                              std::vector<std::size_t> displayed);

struct FeatureImportance {
  std::string feature;
  double importance = 0.0;

  bool operator==(const FeatureImportance&) const = default;
};

// Mean |phi| per feature over `table`, sorted descending with ties broken by
// ascending name.
std::vector<FeatureImportance> RankFeatureImportance(
    std::span<const AttributionVector> table,
    const std::vector<std::string>& feature_names);

std::vector<FeatureImportance> GlobalImportance(
    const Scorer& scorer, const Dataset& dataset,
    std::span<const SubjectRecord> subjects, const BackgroundSet& background);

// First min(6, n) names of a ranking; these get display ranks 1..6.
std::vector<std::string> TopFeatures(
    const std::vector<FeatureImportance>& ranking,
    std::size_t count = kMaxDisplayedFeatures);

enum class SegmentKind { kNegative, kBase, kPositive };

struct StackSegment {
  SegmentKind kind = SegmentKind::kBase;
  // Feature name, "others" or "base".
  std::string key;
  // Signed attribution, or the base value for the base segment.
  double value = 0.0;
  double y_from = 0.0;
  double y_to = 0.0;

  bool operator==(const StackSegment&) const = default;
};

// Outcome-monitor stack for a grouped vector. Negative entries (displayed
// features and others) hang downward from zero in descending |phi| order; the
// base segment rises from the lowest point; positive entries follow in
// descending phi order. Ties are broken by key. Entries with phi exactly zero
// produce no segment. The top of the last segment equals base + sum phi.
// Errors: kUngroupedVector.
std::vector<StackSegment> StackedSegments(const AttributionVector& attribution,
                                          const Schema& schema);

std::string_view SegmentKindName(SegmentKind kind);

// Attribution table CSV: subject_id, base, one phi column per feature, others.
void WriteAttributionCsv(std::span<const AttributionVector> table,
                         const std::vector<std::string>& feature_names,
                         std::ostream& out);
void SaveAttributionCsv(std::span<const AttributionVector> table,
                        const std::vector<std::string>& feature_names,
                        const std::filesystem::path& path);

struct AttributionTable {
  std::vector<std::string> feature_names;
  std::vector<AttributionVector> rows;
};

// Rows come back ungrouped with `others` as stored.
AttributionTable ReadAttributionCsv(std::istream& in);

}  // namespace revise

#endif  // REVISE_ATTRIBUTION_H_
