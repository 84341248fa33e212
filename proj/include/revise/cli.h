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

// Subcommands of the `revise` tool. Each returns a process exit code:
// 0 success, 1 domain error, 2 usage error.

#ifndef REVISE_CLI_H_
#define REVISE_CLI_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "revise/attribution.h"
#include "revise/model.h"
#include "revise/recourse.h"
#include "revise/service.h"

namespace revise::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitDomainError = 1;
inline constexpr int kExitUsage = 2;

struct TrainArgs {
  std::string data;
  std::string out;
  TrainingConfig config;
};

struct ExplainArgs {
  std::string data;
  std::string model;
  std::string out;
  std::size_t background_size = kDefaultBackgroundSize;
  std::uint64_t seed = kDefaultSeed;
  // Optional list of background subject ids, one per line.
  std::string background_out;
};

struct PlanArgs {
  std::string data;
  std::string model;
  std::string start;
  double target = kDefaultTargetOutcome;
  int max_steps = kDefaultMaxSteps;
  std::vector<std::string> immutable;
  double immutable_tolerance = 0.05;
  std::optional<double> max_l1_radius;
  std::string csv_out;
  std::size_t background_size = kDefaultBackgroundSize;
  std::uint64_t seed = kDefaultSeed;
};

struct ServeArgs {
  std::string data;
  std::string model;
  std::string host = kDefaultHost;
  int port = kDefaultPort;
  std::string ui_dir;
  std::size_t background_size = kDefaultBackgroundSize;
  std::uint64_t seed = kDefaultSeed;
  std::size_t display_count = kMaxDisplayedFeatures;
  std::vector<std::string> immutable;
  // Called once the socket is bound, before requests are served. Lets
  // embedders (tests) learn the port and stop the server.
  std::function<void(httplib::Server&, int port)> on_bound;
};

int RunTrain(const TrainArgs& args, std::ostream& out, std::ostream& err);
int RunExplain(const ExplainArgs& args, std::ostream& out, std::ostream& err);
int RunPlan(const PlanArgs& args, std::ostream& out, std::ostream& err);
int RunServe(const ServeArgs& args, std::ostream& out, std::ostream& err);

// Parses argv (CLI11) and dispatches. REVISE_PORT overrides --port for
// `serve`.
int Main(int argc, const char* const* argv, std::ostream& out,
         std::ostream& err);

}  // namespace revise::cli

#endif  // REVISE_CLI_H_
