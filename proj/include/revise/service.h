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

// HTTP API for the companion UI.
//
//   GET  /api/schema
//   GET  /api/subjects
//   POST /api/session                     body: optional constraint overrides
//   POST /api/session/{id}/select         body: {"subject_id": "..."}
//   POST /api/session/{id}/undo
//   GET  /api/session/{id}/path
//   GET  /api/session/{id}/candidates
//
// Candidate lists are capped at 50 entries unless `?limit=all` is given.
// Errors are {"code": ..., "message": ...} documents. Handlers are exposed
// transport-free so they can be driven without a socket.

#ifndef REVISE_SERVICE_H_
#define REVISE_SERVICE_H_

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "revise/engine.h"
#include "revise/json_format.h"
#include "revise/recourse.h"

namespace httplib {
class Server;
}  // namespace httplib

namespace revise {

inline constexpr char kDefaultHost[] = "127.0.0.1";
inline constexpr int kDefaultPort = 8750;
inline constexpr std::size_t kCandidateCap = 50;

struct ServiceOptions {
  std::size_t candidate_cap = kCandidateCap;
  // Sessions untouched for longer are dropped; never when unset.
  std::optional<std::chrono::seconds> idle_eviction;
};

struct ApiResponse {
  int status = 200;
  std::string body;
};

struct Session {
  std::string session_id;
  RecoursePath path;
  ConstraintSet constraints;
  std::chrono::system_clock::time_point created_at;
  std::chrono::steady_clock::time_point last_used;
  // Serializes mutations of this session.
  std::mutex mutex;
};

class RecourseService {
 public:
  explicit RecourseService(std::shared_ptr<const Engine> engine = nullptr,
                           ServiceOptions options = {});

  // Until an engine is set every endpoint answers 503.
  void SetEngine(std::shared_ptr<const Engine> engine);

  ApiResponse GetSchema() const;
  ApiResponse GetSubjects() const;
  ApiResponse PostSession(std::string_view body);
  ApiResponse PostSelect(std::string_view session_id, std::string_view body,
                         bool limit_all = false);
  ApiResponse PostUndo(std::string_view session_id, bool limit_all = false);
  ApiResponse GetPath(std::string_view session_id);
  ApiResponse GetCandidates(std::string_view session_id,
                            bool limit_all = false);

  // Installs the API routes, and a static mount at "/" when `ui_dir` is set.
  void RegisterRoutes(httplib::Server& server,
                      const std::optional<std::filesystem::path>& ui_dir = {});

  std::size_t session_count() const;

 private:
  std::shared_ptr<const Engine> engine() const;
  std::shared_ptr<Session> FindSession(std::string_view session_id);
  void EvictIdle();
  ApiResponse PathAndCandidates(const Engine& engine, const Session& session,
                                bool limit_all) const;

  ServiceOptions options_;
  mutable std::mutex engine_mutex_;
  std::shared_ptr<const Engine> engine_;
  mutable std::mutex sessions_mutex_;
  std::unordered_map<std::string, std::shared_ptr<Session>> sessions_;
  std::uint64_t next_session_ = 1;
};

// Document builders, shared with the CLI and tests.
Json SchemaDocument(const Engine& engine);
Json SubjectsDocument(const Engine& engine);
Json StateDocument(const Engine& engine, const RecourseState& state,
                   std::size_t step);
Json PathDocument(const Engine& engine, const RecoursePath& path);
Json CandidatesDocument(const Engine& engine,
                        const std::vector<CandidateTarget>& candidates,
                        std::size_t cap);
Json ErrorDocument(std::string_view code, std::string_view message);

// Parses the optional session-creation body over `defaults`. Errors:
// kInvalidArgument for malformed JSON or fields, kUnknownFeature.
ConstraintSet ParseConstraints(std::string_view body, const Engine& engine,
                               const ConstraintSet& defaults,
                               double& target_outcome);

}  // namespace revise

#endif  // REVISE_SERVICE_H_
