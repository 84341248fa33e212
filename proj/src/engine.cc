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

#include "revise/engine.h"

#include "revise/error.h"

namespace revise {

Engine::Engine(Dataset dataset, std::shared_ptr<const Scorer> scorer,
               EngineOptions options)
    : dataset_(std::move(dataset)),
      scorer_(std::move(scorer)),
      options_(std::move(options)) {
  if (!scorer_) {
    throw Error(ErrorCode::kInvalidArgument, "engine needs a scorer");
  }
  if (scorer_->num_features() != dataset_.num_features()) {
    throw Error(ErrorCode::kSchemaMismatch,
                "model width does not match the dataset schema");
  }
  if (options_.display_count > kMaxDisplayedFeatures) {
    throw Error(ErrorCode::kInvalidArgument,
                "display count must be between 0 and 6");
  }
  dataset_.SetImmutable(options_.immutable_features);

  background_ =
      SampleBackground(dataset_, options_.background_size, options_.seed);
  outcomes_ = ScoreBatch(*scorer_, dataset_.records());
  normalized_.reserve(dataset_.size());
  for (const SubjectRecord& r : dataset_.records()) {
    normalized_.push_back(Normalize(r, dataset_.schema()));
  }

  std::vector<AttributionVector> table = ComputeAttributionTable(
      *scorer_, dataset_.records(), background_, options_.num_threads);
  importance_ = RankFeatureImportance(table, dataset_.FeatureNames());
  dataset_.SetDisplayRanks(TopFeatures(importance_, options_.display_count));
  displayed_ = dataset_.DisplayedFeatures();
  mean_normalized_ = DatasetMeanNormalized(dataset_.schema());

  attributions_.reserve(table.size());
  for (const AttributionVector& row : table) {
    attributions_.push_back(GroupOthers(row, displayed_));
  }
}

std::size_t Engine::RequireSubject(std::string_view id) const {
  const auto index = dataset_.SubjectIndex(id);
  if (!index) {
    throw Error(ErrorCode::kUnknownSubject,
                "unknown subject: " + std::string(id));
  }
  return *index;
}

}  // namespace revise
