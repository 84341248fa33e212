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

#ifndef REVISE_ENGINE_H_
#define REVISE_ENGINE_H_

#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "revise/attribution.h"
#include "revise/dataset.h"
#include "revise/model.h"

namespace revise {

struct EngineOptions {
  std::size_t background_size = kDefaultBackgroundSize;
  std::uint64_t seed = kDefaultSeed;
  // Number of top-importance features shown individually (0..6).
  std::size_t display_count = kMaxDisplayedFeatures;
  // Marked immutable in the schema; also the default session constraint.
  std::vector<std::string> immutable_features;
  // Attribution precompute workers, 0 = hardware concurrency.
  unsigned num_threads = 0;
};

// Read-only planning context shared by every path and session: the dataset
// with display ranks assigned, the scorer, the background set, and the
// precomputed per-subject outcomes, normalized values and grouped
// attributions.
class Engine {
 public:
  Engine(Dataset dataset, std::shared_ptr<const Scorer> scorer,
         EngineOptions options = {});

  const Dataset& dataset() const { return dataset_; }
  const Schema& schema() const { return dataset_.schema(); }
  const Scorer& scorer() const { return *scorer_; }
  const BackgroundSet& background() const { return background_; }
  const EngineOptions& options() const { return options_; }

  // Indexed like dataset().records().
  const std::vector<double>& outcomes() const { return outcomes_; }
  const std::vector<NormalizedVector>& normalized() const {
    return normalized_;
  }
  const std::vector<AttributionVector>& attributions() const {
    return attributions_;
  }

  const NormalizedVector& mean_normalized() const { return mean_normalized_; }
  const std::vector<FeatureImportance>& importance() const {
    return importance_;
  }
  const std::vector<std::size_t>& displayed() const { return displayed_; }

  // Throws kUnknownSubject.
  std::size_t RequireSubject(std::string_view id) const;

 private:
  Dataset dataset_;
  std::shared_ptr<const Scorer> scorer_;
  EngineOptions options_;
  BackgroundSet background_;
  std::vector<double> outcomes_;
  std::vector<NormalizedVector> normalized_;
  std::vector<AttributionVector> attributions_;
  NormalizedVector mean_normalized_;
  std::vector<FeatureImportance> importance_;
  std::vector<std::size_t> displayed_;
};

}  // namespace revise

#endif  // REVISE_ENGINE_H_
