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

#include "revise/service.h"

#include <algorithm>

#include "httplib.h"
#include "revise/error.h"

namespace revise {
namespace {

constexpr char kJsonContentType[] = "application/json";

ApiResponse Reply(int status, const Json& document) {
  return ApiResponse{status, DumpJson(document)};
}

ApiResponse ReplyError(int status, std::string_view code,
                       std::string_view message) {
  return Reply(status, ErrorDocument(code, message));
}

ApiResponse NotReady() {
  return ReplyError(503, "NotReady", "engine is still initializing");
}

ApiResponse SessionNotFound(std::string_view session_id) {
  return ReplyError(404, "SessionNotFound",
                    "no session " + std::string(session_id));
}

int StatusFor(ErrorCode code) {
  switch (code) {
    case ErrorCode::kUnknownSubject:
      return 404;
    case ErrorCode::kNotACandidate:
    case ErrorCode::kEmptyPath:
      return 409;
    case ErrorCode::kUnknownFeature:
    case ErrorCode::kInvalidArgument:
      return 400;
    default:
      return 500;
  }
}

ApiResponse ReplyError(const Error& error) {
  return ReplyError(StatusFor(error.code()), ErrorCodeName(error.code()),
                    error.what());
}

Json FeatureValues(const Schema& schema, const std::vector<double>& values) {
  Json out = Json::object();
  for (std::size_t f = 0; f < schema.size(); ++f) {
    out[schema[f].name] = values[f];
  }
  return out;
}

Json DisplayedPhi(const Engine& engine, const AttributionVector& attribution) {
  Json out = Json::object();
  for (const std::size_t f : engine.displayed()) {
    out[engine.schema()[f].name] = attribution.phi[f];
  }
  return out;
}

Json OptionalNumber(const std::optional<double>& value) {
  return value ? Json(*value) : Json(nullptr);
}

}  // namespace

Json ErrorDocument(std::string_view code, std::string_view message) {
  Json out = Json::object();
  out["code"] = std::string(code);
  out["message"] = std::string(message);
  return out;
}

Json SchemaDocument(const Engine& engine) {
  Json features = Json::array();
  for (const FeatureSchema& f : engine.schema()) {
    Json feature = Json::object();
    feature["name"] = f.name;
    feature["min"] = f.min;
    feature["max"] = f.max;
    feature["mean"] = f.mean;
    feature["mutable"] = f.is_mutable;
    if (f.display_rank) feature["display_rank"] = *f.display_rank;
    features.push_back(std::move(feature));
  }
  Json displayed = Json::array();
  for (const std::size_t f : engine.displayed()) {
    displayed.push_back(engine.schema()[f].name);
  }
  Json out = Json::object();
  out["features"] = std::move(features);
  out["displayed"] = std::move(displayed);
  return out;
}

Json SubjectsDocument(const Engine& engine) {
  Json subjects = Json::array();
  const auto& records = engine.dataset().records();
  for (std::size_t i = 0; i < records.size(); ++i) {
    const AttributionVector& attribution = engine.attributions()[i];
    Json subject = Json::object();
    subject["id"] = records[i].id;
    subject["label"] =
        records[i].label ? Json(*records[i].label) : Json(nullptr);
    subject["values"] = FeatureValues(engine.schema(), records[i].values);
    subject["outcome"] = engine.outcomes()[i];
    subject["base"] = attribution.base;
    subject["phi"] = DisplayedPhi(engine, attribution);
    subject["others"] = attribution.others;
    subjects.push_back(std::move(subject));
  }
  Json out = Json::object();
  out["subjects"] = std::move(subjects);
  return out;
}

Json StateDocument(const Engine& engine, const RecourseState& state,
                   std::size_t step) {
  const Schema& schema = engine.schema();
  Json out = Json::object();
  out["step"] = step;
  out["subject_id"] = state.subject_id;
  out["values"] = FeatureValues(schema, state.values);
  out["outcome"] = state.outcome;
  out["base"] = state.attribution.base;
  out["phi"] = DisplayedPhi(engine, state.attribution);
  out["others"] = state.attribution.others;
  out["projection"] = OptionalNumber(
      state.step ? std::optional<double>(state.step->projection) : std::nullopt);
  out["l1_change"] = OptionalNumber(
      state.step ? std::optional<double>(state.step->l1_change) : std::nullopt);
  out["outcome_gain"] =
      OptionalNumber(state.step ? std::optional<double>(state.step->outcome_gain)
                                : std::nullopt);

  Json segments = Json::array();
  for (const StackSegment& s : StackedSegments(state.attribution, schema)) {
    Json segment = Json::object();
    segment["kind"] = std::string(SegmentKindName(s.kind));
    segment["key"] = s.key;
    segment["value"] = s.value;
    segment["y_from"] = s.y_from;
    segment["y_to"] = s.y_to;
    segments.push_back(std::move(segment));
  }
  out["segments"] = std::move(segments);

  const NormalizedVector current = Normalize(state.values, schema);
  Json deviations = Json::array();
  for (std::size_t f = 0; f < schema.size(); ++f) {
    Json row = Json::object();
    row["feature"] = schema[f].name;
    row["displayed"] = schema[f].display_rank.has_value();
    row["range"] = Json::array({0.0, 1.0});
    row["mean"] = engine.mean_normalized().values[f];
    row["current"] = current.values[f];
    row["deviation"] = state.deviation[f];
    deviations.push_back(std::move(row));
  }
  out["deviations"] = std::move(deviations);
  return out;
}

Json PathDocument(const Engine& engine, const RecoursePath& path) {
  Json states = Json::array();
  for (std::size_t i = 0; i < path.states.size(); ++i) {
    states.push_back(StateDocument(engine, path.states[i], i));
  }
  Json out = Json::object();
  out["target_outcome"] = path.target_outcome;
  out["states"] = std::move(states);
  return out;
}

Json CandidatesDocument(const Engine& engine,
                        const std::vector<CandidateTarget>& candidates,
                        std::size_t cap) {
  const Schema& schema = engine.schema();
  Json list = Json::array();
  const std::size_t shown = std::min(cap, candidates.size());
  for (std::size_t i = 0; i < shown; ++i) {
    const CandidateTarget& c = candidates[i];
    Json deltas = Json::object();
    for (std::size_t f = 0; f < schema.size(); ++f) {
      Json delta = Json::object();
      delta["value"] = c.per_feature_delta[f].value;
      delta["phi"] = c.per_feature_delta[f].phi;
      deltas[schema[f].name] = std::move(delta);
    }
    Json entry = Json::object();
    entry["subject_id"] = c.subject_id;
    entry["rank"] = i + 1;
    entry["projection"] = c.projection;
    entry["l1_change"] = c.l1_change;
    entry["outcome_gain"] = c.outcome_gain;
    entry["outcome"] = c.outcome;
    entry["top3"] = c.top3;
    entry["per_feature_delta"] = std::move(deltas);
    list.push_back(std::move(entry));
  }
  Json out = Json::object();
  out["candidate_count"] = candidates.size();
  out["candidates"] = std::move(list);
  return out;
}

ConstraintSet ParseConstraints(std::string_view body, const Engine& engine,
                               const ConstraintSet& defaults,
                               double& target_outcome) {
  ConstraintSet constraints = defaults;
  const bool blank = std::all_of(body.begin(), body.end(), [](char c) {
    return c == ' ' || c == '\n' || c == '\r' || c == '\t';
  });
  if (blank) {
    constraints.Validate(engine.dataset());
    return constraints;
  }
  const Json doc = Json::parse(body, nullptr, /*allow_exceptions=*/false);
  if (doc.is_discarded() || !doc.is_object()) {
    throw Error(ErrorCode::kInvalidArgument,
                "session body must be a JSON object");
  }
  auto bad = [](const std::string& key, const char* expected) {
    return Error(ErrorCode::kInvalidArgument,
                 "field '" + key + "' must be " + expected);
  };
  for (auto it = doc.begin(); it != doc.end(); ++it) {
    const std::string& key = it.key();
    const Json& value = it.value();
    if (key == "immutable_features") {
      if (!value.is_array()) throw bad(key, "an array of feature names");
      constraints.immutable_features.clear();
      for (const Json& name : value) {
        if (!name.is_string()) throw bad(key, "an array of feature names");
        constraints.immutable_features.push_back(name.get<std::string>());
      }
    } else if (key == "immutable_tolerance") {
      if (!value.is_number()) throw bad(key, "a number");
      constraints.immutable_tolerance = value.get<double>();
    } else if (key == "require_improvement") {
      if (!value.is_boolean()) throw bad(key, "a boolean");
      constraints.require_improvement = value.get<bool>();
    } else if (key == "exclude_visited") {
      if (!value.is_boolean()) throw bad(key, "a boolean");
      constraints.exclude_visited = value.get<bool>();
    } else if (key == "max_l1_radius") {
      if (value.is_null()) {
        constraints.max_l1_radius.reset();
      } else if (value.is_number()) {
        constraints.max_l1_radius = value.get<double>();
      } else {
        throw bad(key, "a number or null");
      }
    } else if (key == "target_outcome") {
      if (!value.is_number()) throw bad(key, "a number");
      const double target = value.get<double>();
      if (!(target > 0.0 && target <= 1.0)) throw bad(key, "in (0, 1]");
      target_outcome = target;
    } else {
      throw Error(ErrorCode::kInvalidArgument, "unknown field '" + key + "'");
    }
  }
  constraints.Validate(engine.dataset());
  return constraints;
}

RecourseService::RecourseService(std::shared_ptr<const Engine> engine,
                                 ServiceOptions options)
    : options_(options), engine_(std::move(engine)) {}

void RecourseService::SetEngine(std::shared_ptr<const Engine> engine) {
  std::lock_guard lock(engine_mutex_);
  engine_ = std::move(engine);
}

std::shared_ptr<const Engine> RecourseService::engine() const {
  std::lock_guard lock(engine_mutex_);
  return engine_;
}

std::size_t RecourseService::session_count() const {
  std::lock_guard lock(sessions_mutex_);
  return sessions_.size();
}

void RecourseService::EvictIdle() {
  if (!options_.idle_eviction) return;
  const auto now = std::chrono::steady_clock::now();
  std::lock_guard lock(sessions_mutex_);
  std::erase_if(sessions_, [&](const auto& entry) {
    std::unique_lock session_lock(entry.second->mutex, std::try_to_lock);
    return session_lock.owns_lock() &&
           now - entry.second->last_used > *options_.idle_eviction;
  });
}

std::shared_ptr<Session> RecourseService::FindSession(
    std::string_view session_id) {
  EvictIdle();
  std::lock_guard lock(sessions_mutex_);
  const auto it = sessions_.find(std::string(session_id));
  return it == sessions_.end() ? nullptr : it->second;
}

ApiResponse RecourseService::GetSchema() const {
  const auto engine = this->engine();
  if (!engine) return NotReady();
  return Reply(200, SchemaDocument(*engine));
}

ApiResponse RecourseService::GetSubjects() const {
  const auto engine = this->engine();
  if (!engine) return NotReady();
  return Reply(200, SubjectsDocument(*engine));
}

ApiResponse RecourseService::PostSession(std::string_view body) {
  const auto engine = this->engine();
  if (!engine) return NotReady();
  ConstraintSet defaults;
  defaults.immutable_features = engine->options().immutable_features;
  double target = kDefaultTargetOutcome;
  ConstraintSet constraints;
  try {
    constraints = ParseConstraints(body, *engine, defaults, target);
  } catch (const Error& e) {
    return ReplyError(400, ErrorCodeName(e.code()), e.what());
  }
  EvictIdle();
  auto session = std::make_shared<Session>();
  session->constraints = std::move(constraints);
  session->path.target_outcome = target;
  session->created_at = std::chrono::system_clock::now();
  session->last_used = std::chrono::steady_clock::now();
  {
    std::lock_guard lock(sessions_mutex_);
    session->session_id = "session-" + std::to_string(next_session_++);
    sessions_.emplace(session->session_id, session);
  }
  Json out = Json::object();
  out["session_id"] = session->session_id;
  return Reply(201, out);
}

ApiResponse RecourseService::PathAndCandidates(const Engine& engine,
                                               const Session& session,
                                               bool limit_all) const {
  const std::vector<CandidateTarget> candidates =
      FindCandidates(engine, session.path, session.constraints);
  Json out = Json::object();
  out["session_id"] = session.session_id;
  out["path"] = PathDocument(engine, session.path);
  const Json listing = CandidatesDocument(
      engine, candidates, limit_all ? candidates.size() : options_.candidate_cap);
  out["candidate_count"] = listing["candidate_count"];
  out["candidates"] = listing["candidates"];
  return Reply(200, out);
}

ApiResponse RecourseService::PostSelect(std::string_view session_id,
                                        std::string_view body,
                                        bool limit_all) {
  const auto engine = this->engine();
  if (!engine) return NotReady();
  const auto session = FindSession(session_id);
  if (!session) return SessionNotFound(session_id);

  const Json doc = Json::parse(body, nullptr, /*allow_exceptions=*/false);
  if (doc.is_discarded() || !doc.is_object() || !doc.contains("subject_id") ||
      !doc["subject_id"].is_string()) {
    return ReplyError(400, "MalformedRequest",
                      "select body must be {\"subject_id\": string}");
  }
  const std::string subject_id = doc["subject_id"].get<std::string>();

  std::lock_guard lock(session->mutex);
  session->last_used = std::chrono::steady_clock::now();
  try {
    engine->RequireSubject(subject_id);
    if (session->path.empty()) {
      session->path =
          StartPath(*engine, subject_id, session->path.target_outcome);
    } else {
      session->path = ExtendPath(*engine, session->path, subject_id,
                                 session->constraints);
    }
    return PathAndCandidates(*engine, *session, limit_all);
  } catch (const Error& e) {
    return ReplyError(e);
  }
}

ApiResponse RecourseService::PostUndo(std::string_view session_id,
                                      bool limit_all) {
  const auto engine = this->engine();
  if (!engine) return NotReady();
  const auto session = FindSession(session_id);
  if (!session) return SessionNotFound(session_id);
  std::lock_guard lock(session->mutex);
  session->last_used = std::chrono::steady_clock::now();
  try {
    session->path = Undo(session->path);
    return PathAndCandidates(*engine, *session, limit_all);
  } catch (const Error& e) {
    return ReplyError(e);
  }
}

ApiResponse RecourseService::GetPath(std::string_view session_id) {
  const auto engine = this->engine();
  if (!engine) return NotReady();
  const auto session = FindSession(session_id);
  if (!session) return SessionNotFound(session_id);
  std::lock_guard lock(session->mutex);
  session->last_used = std::chrono::steady_clock::now();
  return Reply(200, PathDocument(*engine, session->path));
}

ApiResponse RecourseService::GetCandidates(std::string_view session_id,
                                           bool limit_all) {
  const auto engine = this->engine();
  if (!engine) return NotReady();
  const auto session = FindSession(session_id);
  if (!session) return SessionNotFound(session_id);
  std::lock_guard lock(session->mutex);
  session->last_used = std::chrono::steady_clock::now();
  const std::vector<CandidateTarget> candidates =
      FindCandidates(*engine, session->path, session->constraints);
  return Reply(200, CandidatesDocument(*engine, candidates,
                                       limit_all ? candidates.size()
                                                 : options_.candidate_cap));
}

void RecourseService::RegisterRoutes(
    httplib::Server& server, const std::optional<std::filesystem::path>& ui_dir) {
  auto send = [](httplib::Response& res, const ApiResponse& api) {
    res.status = api.status;
    res.set_content(api.body, kJsonContentType);
  };
  auto limit_all = [](const httplib::Request& req) {
    return req.has_param("limit") && req.get_param_value("limit") == "all";
  };

  server.Get("/api/schema",
             [this, send](const httplib::Request&, httplib::Response& res) {
               send(res, GetSchema());
             });
  server.Get("/api/subjects",
             [this, send](const httplib::Request&, httplib::Response& res) {
               send(res, GetSubjects());
             });
  server.Post("/api/session",
              [this, send](const httplib::Request& req, httplib::Response& res) {
                send(res, PostSession(req.body));
              });
  server.Post(R"(/api/session/([^/]+)/select)",
              [this, send, limit_all](const httplib::Request& req,
                                      httplib::Response& res) {
                send(res, PostSelect(req.matches[1].str(), req.body,
                                     limit_all(req)));
              });
  server.Post(R"(/api/session/([^/]+)/undo)",
              [this, send, limit_all](const httplib::Request& req,
                                      httplib::Response& res) {
                send(res, PostUndo(req.matches[1].str(), limit_all(req)));
              });
  server.Get(R"(/api/session/([^/]+)/path)",
             [this, send](const httplib::Request& req, httplib::Response& res) {
               send(res, GetPath(req.matches[1].str()));
             });
  server.Get(R"(/api/session/([^/]+)/candidates)",
             [this, send, limit_all](const httplib::Request& req,
                                     httplib::Response& res) {
               send(res, GetCandidates(req.matches[1].str(), limit_all(req)));
             });
  // Unrouted API paths still answer with an error document.
  server.set_error_handler([](const httplib::Request& req,
                              httplib::Response& res) {
    if (req.path.rfind("/api/", 0) == 0 && res.body.empty()) {
      res.set_content(DumpJson(ErrorDocument("NotFound", "no route for " +
                                                             req.method + " " +
                                                             req.path)),
                      kJsonContentType);
    }
  });
  if (ui_dir) server.set_mount_point("/", ui_dir->string());
}

}  // namespace revise
