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

#include "revise/cli.h"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <memory>

#include "CLI11.hpp"
#include "httplib.h"
#include "revise/error.h"
#include "revise/text_format.h"

namespace revise::cli {
namespace {

constexpr double kEfficiencyTolerance = 1e-9;
constexpr char kPortEnv[] = "REVISE_PORT";

int ReportError(const Error& e, std::ostream& err) {
  err << "error: " << ErrorCodeName(e.code()) << ": " << e.what() << '\n';
  return kExitDomainError;
}

std::shared_ptr<const Engine> BuildEngine(const std::string& data,
                                          const std::string& model,
                                          EngineOptions options) {
  Dataset dataset = LoadCsv(data);
  auto scorer =
      std::make_shared<LogisticModel>(LoadModel(model, dataset.schema()));
  return std::make_shared<const Engine>(std::move(dataset), std::move(scorer),
                                        std::move(options));
}

}  // namespace

int RunTrain(const TrainArgs& args, std::ostream& out, std::ostream& err) {
  try {
    const Dataset dataset = LoadCsv(args.data);
    const TrainingResult result = TrainLogistic(dataset, args.config);
    SaveModel(result.model, args.out);
    out << "trained on " << dataset.size() << " subjects, "
        << args.config.epochs << " epochs\n"
        << "final loss: " << FormatDouble(result.loss_history.back()) << '\n';
    return kExitOk;
  } catch (const Error& e) {
    return ReportError(e, err);
  }
}

int RunExplain(const ExplainArgs& args, std::ostream& out, std::ostream& err) {
  try {
    const Dataset dataset = LoadCsv(args.data);
    const LogisticModel model = LoadModel(args.model, dataset.schema());
    const BackgroundSet background =
        SampleBackground(dataset, args.background_size, args.seed);
    const std::vector<AttributionVector> table =
        ComputeAttributionTable(model, dataset.records(), background);
    const std::vector<std::string> names = dataset.FeatureNames();
    const std::vector<std::string> displayed =
        TopFeatures(RankFeatureImportance(table, names));

    std::vector<AttributionVector> grouped;
    grouped.reserve(table.size());
    for (std::size_t i = 0; i < table.size(); ++i) {
      const double outcome = Score(model, dataset.records()[i]);
      const double gap = std::abs(outcome - table[i].Total());
      if (!(gap <= kEfficiencyTolerance)) {
        throw Error(ErrorCode::kEfficiencyViolation,
                    "subject " + table[i].subject_id +
                        ": |score - (base + sum phi)| = " + FormatDouble(gap));
      }
      grouped.push_back(GroupOthers(table[i], displayed, dataset));
    }
    SaveAttributionCsv(grouped, names, args.out);
    if (!args.background_out.empty()) {
      std::ofstream ids(args.background_out);
      if (!ids) {
        throw Error(ErrorCode::kIoError, "cannot write " + args.background_out);
      }
      for (const SubjectRecord& r : background.records) ids << r.id << '\n';
    }
    out << "wrote " << grouped.size() << " attribution rows to " << args.out
        << " (background " << background.records.size() << ")\n";
    return kExitOk;
  } catch (const Error& e) {
    return ReportError(e, err);
  }
}

int RunPlan(const PlanArgs& args, std::ostream& out, std::ostream& err) {
  try {
    EngineOptions options;
    options.background_size = args.background_size;
    options.seed = args.seed;
    options.immutable_features = args.immutable;
    const auto engine = BuildEngine(args.data, args.model, options);

    ConstraintSet constraints;
    constraints.immutable_features = args.immutable;
    constraints.immutable_tolerance = args.immutable_tolerance;
    constraints.max_l1_radius = args.max_l1_radius;
    const PlanResult plan = GreedyPlan(*engine, args.start, constraints,
                                       args.target, args.max_steps);

    for (std::size_t i = 0; i < plan.path.states.size(); ++i) {
      const RecourseState& s = plan.path.states[i];
      out << "step " << i << ' ' << s.subject_id;
      if (s.step) {
        out << " projection=" << FormatDouble(s.step->projection);
      } else {
        out << " start";
      }
      out << " outcome=" << FormatDouble(s.outcome) << '\n';
    }
    out << "termination: " << TerminationName(plan.reason) << '\n';

    if (!args.csv_out.empty()) {
      std::ofstream csv(args.csv_out);
      if (!csv) throw Error(ErrorCode::kIoError, "cannot write " + args.csv_out);
      WritePathCsv(*engine, plan.path, csv);
    }
    return kExitOk;
  } catch (const Error& e) {
    return ReportError(e, err);
  }
}

int RunServe(const ServeArgs& args, std::ostream& out, std::ostream& err) {
  if (args.port < 0 || args.port > 65535) {
    err << "error: invalid port " << args.port << '\n';
    return kExitDomainError;
  }
  std::shared_ptr<const Engine> engine;
  try {
    EngineOptions options;
    options.background_size = args.background_size;
    options.seed = args.seed;
    options.display_count = args.display_count;
    options.immutable_features = args.immutable;
    const auto start = std::chrono::steady_clock::now();
    engine = BuildEngine(args.data, args.model, options);
    const auto elapsed = std::chrono::duration<double>(
        std::chrono::steady_clock::now() - start);
    out << "precomputed attributions for " << engine->dataset().size()
        << " subjects in " << elapsed.count() << " s\n";
  } catch (const Error& e) {
    return ReportError(e, err);
  }

  RecourseService service(engine);
  httplib::Server server;
  // httplib's default adds SO_REUSEPORT, which lets a second server share a
  // busy port silently. Plain SO_REUSEADDR makes that bind fail instead.
  server.set_socket_options([](socket_t sock) {
    int yes = 1;
    setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof(yes));
  });
  std::optional<std::filesystem::path> ui_dir;
  if (!args.ui_dir.empty()) {
    if (!std::filesystem::is_directory(args.ui_dir)) {
      err << "error: ui directory not found: " << args.ui_dir << '\n';
      return kExitDomainError;
    }
    ui_dir = args.ui_dir;
  }
  service.RegisterRoutes(server, ui_dir);
  server.set_logger([&out](const httplib::Request& req,
                           const httplib::Response& res) {
    out << req.method << ' ' << req.path << ' ' << res.status << std::endl;
  });

  int port = args.port;
  if (port == 0) {
    port = server.bind_to_any_port(args.host);
    if (port < 0) {
      err << "error: cannot bind " << args.host << '\n';
      return kExitDomainError;
    }
  } else if (!server.bind_to_port(args.host, port)) {
    err << "error: cannot bind " << args.host << ':' << port << '\n';
    return kExitDomainError;
  }
  out << "listening on http://" << args.host << ':' << port << std::endl;
  if (args.on_bound) args.on_bound(server, port);
  if (!server.listen_after_bind()) {
    err << "error: server stopped unexpectedly\n";
    return kExitDomainError;
  }
  return kExitOk;
}

int Main(int argc, const char* const* argv, std::ostream& out,
         std::ostream& err) {
  CLI::App app{"Incremental recourse planning: train, explain, plan, serve."};
  app.require_subcommand(1);

  TrainArgs train;
  auto* train_cmd = app.add_subcommand("train", "Train the logistic scorer.");
  train_cmd->add_option("--data", train.data, "Labelled CSV")->required();
  train_cmd->add_option("--out", train.out, "Model output path")->required();
  train_cmd->add_option("--lr,--learning-rate", train.config.learning_rate,
                        "Gradient-descent step size")
      ->capture_default_str();
  train_cmd->add_option("--epochs", train.config.epochs, "Full-batch epochs")
      ->capture_default_str();
  train_cmd->add_option("--l2,--l2-lambda", train.config.l2_lambda,
                        "L2 penalty on the weights")
      ->capture_default_str();
  train_cmd->add_option("--seed", train.config.seed)->capture_default_str();

  ExplainArgs explain;
  auto* explain_cmd =
      app.add_subcommand("explain", "Write the exact Shapley attribution table.");
  explain_cmd->add_option("--data", explain.data, "Subject CSV")->required();
  explain_cmd->add_option("--model", explain.model, "Model file")->required();
  explain_cmd->add_option("--out", explain.out, "Attribution CSV")->required();
  explain_cmd->add_option("--background-size", explain.background_size)
      ->capture_default_str();
  explain_cmd->add_option("--seed", explain.seed)->capture_default_str();
  explain_cmd->add_option("--background-out", explain.background_out,
                          "Write the background subject ids here");

  PlanArgs plan;
  auto* plan_cmd =
      app.add_subcommand("plan", "Greedy recourse path from one subject.");
  plan_cmd->add_option("--data", plan.data, "Subject CSV")->required();
  plan_cmd->add_option("--model", plan.model, "Model file")->required();
  plan_cmd->add_option("--start", plan.start, "Start subject id")->required();
  plan_cmd->add_option("--target", plan.target, "Target outcome")
      ->capture_default_str();
  plan_cmd->add_option("--max-steps", plan.max_steps)->capture_default_str();
  plan_cmd->add_option("--immutable", plan.immutable,
                       "Features that must stay within tolerance")
      ->delimiter(',');
  plan_cmd->add_option("--immutable-tolerance", plan.immutable_tolerance)
      ->capture_default_str();
  plan_cmd->add_option("--max-l1-radius", plan.max_l1_radius);
  plan_cmd->add_option("--csv", plan.csv_out, "Path export CSV");
  plan_cmd->add_option("--background-size", plan.background_size)
      ->capture_default_str();
  plan_cmd->add_option("--seed", plan.seed)->capture_default_str();

  ServeArgs serve;
  auto* serve_cmd = app.add_subcommand("serve", "Run the HTTP API.");
  serve_cmd->add_option("--data", serve.data, "Subject CSV")->required();
  serve_cmd->add_option("--model", serve.model, "Model file")->required();
  serve_cmd->add_option("--host", serve.host)->capture_default_str();
  serve_cmd->add_option("--port", serve.port)->capture_default_str();
  serve_cmd->add_option("--ui-dir", serve.ui_dir, "Static UI assets");
  serve_cmd->add_option("--background-size", serve.background_size)
      ->capture_default_str();
  serve_cmd->add_option("--seed", serve.seed)->capture_default_str();
  serve_cmd->add_option("--display-count", serve.display_count)
      ->capture_default_str();
  serve_cmd->add_option("--immutable", serve.immutable)->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << '\n'
        << "run with --help for usage\n";
    return kExitUsage;
  }

  if (*train_cmd) return RunTrain(train, out, err);
  if (*explain_cmd) return RunExplain(explain, out, err);
  if (*plan_cmd) return RunPlan(plan, out, err);
  if (const char* env = std::getenv(kPortEnv); env && *env) {
    const auto port = ParseDouble(env);
    if (!port || *port != std::floor(*port)) {
      err << "error: " << kPortEnv << " is not a port number: " << env << '\n';
      return kExitDomainError;
    }
    serve.port = static_cast<int>(*port);
  }
  return RunServe(serve, out, err);
}

}  // namespace revise::cli
