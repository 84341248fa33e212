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

// Incremental recourse planning over real dataset subjects.
//
// A path starts at one subject and moves, one selection at a time, to other
// subjects. Candidates for the next state are ranked by projection, the
// outcome gain per unit of normalized L1 feature change:
//
//   l1_change    = sum_f |n_f(candidate) - n_f(current)|
//   outcome_gain = score(candidate) - outcome(current)
//   projection   = outcome_gain / max(1e-6, l1_change)
//
// Paths are values: Extend and Undo return new paths and never modify their
// argument.

#ifndef REVISE_RECOURSE_H_
#define REVISE_RECOURSE_H_

#include <cstddef>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "revise/attribution.h"
#include "revise/engine.h"

namespace revise {

inline constexpr double kProjectionEpsilon = 1e-6;
inline constexpr double kDefaultTargetOutcome = 0.8;
inline constexpr int kDefaultMaxSteps = 10;
inline constexpr int kTopCandidates = 3;

struct ConstraintSet {
  std::vector<std::string> immutable_features;
  // Normalized units.
  double immutable_tolerance = 0.05;
  bool require_improvement = true;
  // Normalized L1 radius; unbounded when unset.
  std::optional<double> max_l1_radius;
  bool exclude_visited = true;

  // Throws kUnknownFeature or kInvalidArgument.
  void Validate(const Dataset& dataset) const;

  bool operator==(const ConstraintSet&) const = default;
};

struct Projection {
  double projection = 0.0;
  double l1_change = 0.0;
  double outcome_gain = 0.0;

  bool operator==(const Projection&) const = default;
};

struct FeatureDelta {
  // Raw units.
  double value = 0.0;
  double phi = 0.0;

  bool operator==(const FeatureDelta&) const = default;
};

struct CandidateTarget {
  std::string subject_id;
  double projection = 0.0;
  double l1_change = 0.0;
  double outcome_gain = 0.0;
  double outcome = 0.0;
  // candidate - current, one per schema feature.
  std::vector<FeatureDelta> per_feature_delta;
  bool top3 = false;

  bool operator==(const CandidateTarget&) const = default;
};

struct RecourseState {
  std::string subject_id;
  std::vector<double> values;
  double outcome = 0.0;
  // Grouped to the engine's displayed features.
  AttributionVector attribution;
  // Normalized value minus normalized dataset mean, per feature.
  std::vector<double> deviation;
  // Projection metadata of the move into this state; unset for the start.
  std::optional<Projection> step;

  bool operator==(const RecourseState&) const = default;
};

struct RecoursePath {
  std::vector<RecourseState> states;
  double target_outcome = kDefaultTargetOutcome;

  bool empty() const { return states.empty(); }
  std::size_t size() const { return states.size(); }
  const RecourseState& last() const { return states.back(); }

  bool operator==(const RecoursePath&) const = default;
};

// Projection arithmetic on normalized vectors.
Projection ComputeProjection(std::span<const double> current_normalized,
                             double current_outcome,
                             std::span<const double> candidate_normalized,
                             double candidate_outcome);

// Scores `candidate` with the engine's model. Errors: kSameSubject.
Projection ProjectionScore(const Engine& engine, const RecourseState& current,
                           const SubjectRecord& candidate);

// n_f(values) - mean_f for every feature.
std::vector<double> DeviationStats(std::span<const double> values,
                                   const Schema& schema);

// State for a dataset subject, built from the engine's precomputed values.
RecourseState MakeState(const Engine& engine, std::size_t subject_index);

// Ranked next-state candidates for the last state of `path`, sorted by
// projection descending, then l1_change ascending, then subject id. The first
// three carry top3. An empty path has no candidates.
std::vector<CandidateTarget> FindCandidates(const Engine& engine,
                                            const RecoursePath& path,
                                            const ConstraintSet& constraints);

// Single-state path. Errors: kUnknownSubject.
RecoursePath StartPath(const Engine& engine, std::string_view subject_id,
                       double target_outcome = kDefaultTargetOutcome);

// Appends `chosen`, which must be among FindCandidates(path). Errors:
// kEmptyPath, kNotACandidate.
RecoursePath ExtendPath(const Engine& engine, const RecoursePath& path,
                        std::string_view chosen,
                        const ConstraintSet& constraints);

// Drops the last state. Errors: kEmptyPath.
RecoursePath Undo(const RecoursePath& path);

// (phi_f(b) - phi_f(a)) / (x_f(b) - x_f(a)) in raw units; unset when the
// feature did not move by more than 1e-12.
std::optional<double> TrajectorySlope(const RecourseState& a,
                                      const RecourseState& b,
                                      std::size_t feature);

enum class Termination { kTargetReached, kStuck, kBudget };

std::string_view TerminationName(Termination reason);

struct PlanResult {
  RecoursePath path;
  Termination reason = Termination::kStuck;
};

// Repeatedly extends with the top-ranked candidate until the outcome reaches
// the target, no candidate remains, or `max_steps` extensions were made.
// Errors: kUnknownSubject, kInvalidArgument (max_steps < 1).
PlanResult GreedyPlan(const Engine& engine, std::string_view start_id,
                      const ConstraintSet& constraints,
                      double target_outcome = kDefaultTargetOutcome,
                      int max_steps = kDefaultMaxSteps);

// One row per state: step, subject_id, outcome, base, phi of each displayed
// feature, others, deviation of every feature, projection, l1_change. The
// start state leaves projection and l1_change empty.
void WritePathCsv(const Engine& engine, const RecoursePath& path,
                  std::ostream& out);

}  // namespace revise

#endif  // REVISE_RECOURSE_H_
