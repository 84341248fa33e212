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

#include "revise/recourse.h"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "revise/error.h"
#include "revise/text_format.h"

namespace revise {
namespace {

constexpr double kSlopeMinDelta = 1e-12;

bool RankedBefore(const CandidateTarget& a, const CandidateTarget& b) {
  if (a.projection != b.projection) return a.projection > b.projection;
  if (a.l1_change != b.l1_change) return a.l1_change < b.l1_change;
  return a.subject_id < b.subject_id;
}

}  // namespace

void ConstraintSet::Validate(const Dataset& dataset) const {
  for (const std::string& name : immutable_features) {
    dataset.RequireFeatureIndex(name);
  }
  if (!(immutable_tolerance >= 0.0)) {
    throw Error(ErrorCode::kInvalidArgument,
                "immutable_tolerance must be non-negative");
  }
  if (max_l1_radius && !(*max_l1_radius > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument,
                "max_l1_radius must be positive when set");
  }
}

Projection ComputeProjection(std::span<const double> current_normalized,
                             double current_outcome,
                             std::span<const double> candidate_normalized,
                             double candidate_outcome) {
  Projection out;
  for (std::size_t f = 0; f < current_normalized.size(); ++f) {
    out.l1_change += std::abs(candidate_normalized[f] - current_normalized[f]);
  }
  out.outcome_gain = candidate_outcome - current_outcome;
  out.projection =
      out.outcome_gain / std::max(kProjectionEpsilon, out.l1_change);
  return out;
}

Projection ProjectionScore(const Engine& engine, const RecourseState& current,
                           const SubjectRecord& candidate) {
  if (candidate.id == current.subject_id) {
    throw Error(ErrorCode::kSameSubject,
                "candidate equals the current subject: " + candidate.id);
  }
  const double candidate_outcome = Score(engine.scorer(), candidate);
  return ComputeProjection(Normalize(current.values, engine.schema()).values,
                           current.outcome,
                           Normalize(candidate, engine.schema()).values,
                           candidate_outcome);
}

std::vector<double> DeviationStats(std::span<const double> values,
                                   const Schema& schema) {
  const NormalizedVector current = Normalize(values, schema);
  const NormalizedVector mean = DatasetMeanNormalized(schema);
  std::vector<double> deviation(schema.size());
  for (std::size_t f = 0; f < schema.size(); ++f) {
    deviation[f] = current.values[f] - mean.values[f];
  }
  return deviation;
}

RecourseState MakeState(const Engine& engine, std::size_t subject_index) {
  const SubjectRecord& record = engine.dataset().records().at(subject_index);
  RecourseState state;
  state.subject_id = record.id;
  state.values = record.values;
  state.outcome = engine.outcomes()[subject_index];
  state.attribution = engine.attributions()[subject_index];
  state.deviation = DeviationStats(record.values, engine.schema());
  return state;
}

std::vector<CandidateTarget> FindCandidates(const Engine& engine,
                                            const RecoursePath& path,
                                            const ConstraintSet& constraints) {
  if (path.empty()) return {};
  const RecourseState& current = path.last();
  const std::size_t current_index = engine.RequireSubject(current.subject_id);
  const NormalizedVector& current_normalized =
      engine.normalized()[current_index];

  std::vector<std::size_t> immutable;
  for (const std::string& name : constraints.immutable_features) {
    immutable.push_back(engine.dataset().RequireFeatureIndex(name));
  }
  std::unordered_set<std::string_view> visited;
  if (constraints.exclude_visited) {
    for (const RecourseState& s : path.states) visited.insert(s.subject_id);
  }

  const auto& records = engine.dataset().records();
  std::vector<CandidateTarget> candidates;
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (i == current_index || visited.contains(records[i].id)) continue;
    const NormalizedVector& normalized = engine.normalized()[i];
    const bool immutable_ok =
        std::all_of(immutable.begin(), immutable.end(), [&](std::size_t f) {
          return std::abs(normalized.values[f] -
                          current_normalized.values[f]) <=
                 constraints.immutable_tolerance;
        });
    if (!immutable_ok) continue;
    const Projection p =
        ComputeProjection(current_normalized.values, current.outcome,
                          normalized.values, engine.outcomes()[i]);
    if (constraints.max_l1_radius && p.l1_change > *constraints.max_l1_radius) {
      continue;
    }
    if (constraints.require_improvement && !(p.outcome_gain > 0.0)) continue;

    CandidateTarget candidate;
    candidate.subject_id = records[i].id;
    candidate.projection = p.projection;
    candidate.l1_change = p.l1_change;
    candidate.outcome_gain = p.outcome_gain;
    candidate.outcome = engine.outcomes()[i];
    const AttributionVector& phi = engine.attributions()[i];
    candidate.per_feature_delta.reserve(records[i].values.size());
    for (std::size_t f = 0; f < records[i].values.size(); ++f) {
      candidate.per_feature_delta.push_back(
          {records[i].values[f] - current.values[f],
           phi.phi[f] - current.attribution.phi[f]});
    }
    candidates.push_back(std::move(candidate));
  }
  std::sort(candidates.begin(), candidates.end(), RankedBefore);
  for (std::size_t i = 0;
       i < candidates.size() && i < static_cast<std::size_t>(kTopCandidates);
       ++i) {
    candidates[i].top3 = true;
  }
  return candidates;
}

RecoursePath StartPath(const Engine& engine, std::string_view subject_id,
                       double target_outcome) {
  RecoursePath path;
  path.target_outcome = target_outcome;
  path.states.push_back(MakeState(engine, engine.RequireSubject(subject_id)));
  return path;
}

RecoursePath ExtendPath(const Engine& engine, const RecoursePath& path,
                        std::string_view chosen,
                        const ConstraintSet& constraints) {
  if (path.empty()) {
    throw Error(ErrorCode::kEmptyPath, "no start state has been selected");
  }
  const std::vector<CandidateTarget> candidates =
      FindCandidates(engine, path, constraints);
  const auto it = std::find_if(
      candidates.begin(), candidates.end(),
      [&](const CandidateTarget& c) { return c.subject_id == chosen; });
  if (it == candidates.end()) {
    throw Error(ErrorCode::kNotACandidate,
                "subject " + std::string(chosen) +
                    " is not a candidate for the current state");
  }
  RecoursePath next = path;
  RecourseState state = MakeState(engine, engine.RequireSubject(chosen));
  state.step = Projection{it->projection, it->l1_change, it->outcome_gain};
  next.states.push_back(std::move(state));
  return next;
}

RecoursePath Undo(const RecoursePath& path) {
  if (path.empty()) {
    throw Error(ErrorCode::kEmptyPath, "nothing to undo");
  }
  RecoursePath previous = path;
  previous.states.pop_back();
  return previous;
}

std::optional<double> TrajectorySlope(const RecourseState& a,
                                      const RecourseState& b,
                                      std::size_t feature) {
  const double dx = b.values.at(feature) - a.values.at(feature);
  if (!(std::abs(dx) > kSlopeMinDelta)) return std::nullopt;
  return (b.attribution.phi.at(feature) - a.attribution.phi.at(feature)) / dx;
}

std::string_view TerminationName(Termination reason) {
  switch (reason) {
    case Termination::kTargetReached:
      return "target_reached";
    case Termination::kStuck:
      return "stuck";
    case Termination::kBudget:
      return "budget";
  }
  return "unknown";
}

PlanResult GreedyPlan(const Engine& engine, std::string_view start_id,
                      const ConstraintSet& constraints, double target_outcome,
                      int max_steps) {
  if (max_steps < 1) {
    throw Error(ErrorCode::kInvalidArgument, "max_steps must be at least 1");
  }
  constraints.Validate(engine.dataset());
  PlanResult result;
  result.path = StartPath(engine, start_id, target_outcome);
  for (int step = 0;; ++step) {
    if (result.path.last().outcome >= target_outcome) {
      result.reason = Termination::kTargetReached;
      return result;
    }
    if (step == max_steps) {
      result.reason = Termination::kBudget;
      return result;
    }
    const std::vector<CandidateTarget> candidates =
        FindCandidates(engine, result.path, constraints);
    if (candidates.empty()) {
      result.reason = Termination::kStuck;
      return result;
    }
    result.path = ExtendPath(engine, result.path, candidates.front().subject_id,
                             constraints);
  }
}

void WritePathCsv(const Engine& engine, const RecoursePath& path,
                  std::ostream& out) {
  const Schema& schema = engine.schema();
  out << "step,subject_id,outcome,base";
  for (const std::size_t f : engine.displayed()) {
    out << ",phi_" << schema[f].name;
  }
  out << ",others";
  for (const FeatureSchema& f : schema) out << ",dev_" << f.name;
  out << ",projection,l1_change\n";
  for (std::size_t i = 0; i < path.states.size(); ++i) {
    const RecourseState& s = path.states[i];
    out << i << ',' << s.subject_id << ',' << FormatDouble(s.outcome) << ','
        << FormatDouble(s.attribution.base);
    for (const std::size_t f : engine.displayed()) {
      out << ',' << FormatDouble(s.attribution.phi[f]);
    }
    out << ',' << FormatDouble(s.attribution.others);
    for (const double d : s.deviation) out << ',' << FormatDouble(d);
    if (s.step) {
      out << ',' << FormatDouble(s.step->projection) << ','
          << FormatDouble(s.step->l1_change);
    } else {
      out << ",,";
    }
    out << '\n';
  }
}

}  // namespace revise
