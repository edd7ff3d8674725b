// Copyright 2026 The clonalnas Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Client for external training workers.
//
// Protocol: one UTF-8 JSON document per line over the worker's stdin/stdout.
//
//   worker -> engine, first line:
//     {"hello": {"protocol": 1, "parallelism": P, "datasets": ["mnist", ...]}}
//   engine -> worker:
//     {"id": N, "model": {"cells": [code...], "candidate": code, "k": K},
//      "dataset": "mnist", "budget": {"train_fraction": F, "epochs": E},
//      "seed": S}
//   worker -> engine:
//     {"id": N, "affinity": A}   or   {"id": N, "error": "message"}
//   engine -> worker:
//     {"shutdown": true}
//
// Unknown fields are ignored. Worker lines starting with '#' are diagnostics.

#ifndef CLONALNAS_WORKER_H_
#define CLONALNAS_WORKER_H_

#include <sys/types.h>

#include <chrono>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "clonalnas/evaluator.h"

namespace clonalnas {

inline constexpr int kProtocolVersion = 1;

struct WorkerHandshake {
  int protocol = kProtocolVersion;
  int parallelism = 1;
  std::vector<std::string> datasets;
};

nlohmann::json RequestToJson(const EvaluationRequest& request);
// Throws ProtocolError on a malformed request.
EvaluationRequest RequestFromJson(const nlohmann::json& message);

// Throws ProtocolError unless the line is a valid protocol-1 handshake.
WorkerHandshake ParseHandshake(std::string_view line);

// Throws ProtocolError for anything but a well-formed response.
EvaluationResponse ParseResponse(std::string_view line);

std::string ResponseToLine(const EvaluationResponse& response);

// A child process started through /bin/sh -c with its stdin and stdout
// piped. SIGPIPE is ignored process-wide once a worker is spawned.
class WorkerProcess {
 public:
  explicit WorkerProcess(const std::string& command);
  ~WorkerProcess();

  WorkerProcess(const WorkerProcess&) = delete;
  WorkerProcess& operator=(const WorkerProcess&) = delete;

  // Throws WorkerExitedError if the pipe is closed.
  void WriteLine(std::string_view line);

  // nullopt on timeout. Throws WorkerExitedError at end of stream.
  std::optional<std::string> ReadLine(std::chrono::milliseconds timeout);

  void CloseInput();

  // Waits up to `grace` for the child, then kills it. Returns the raw wait
  // status, or -1 if the child had already been reaped.
  int Terminate(std::chrono::milliseconds grace);

  // Non-blocking check; describes how the child exited if it has.
  std::optional<std::string> ExitDescription();

  pid_t pid() const { return pid_; }

 private:
  pid_t pid_ = -1;
  int to_child_ = -1;
  int from_child_ = -1;
  std::string buffer_;
  std::optional<int> status_;
};

struct WorkerOptions {
  std::chrono::milliseconds request_timeout{std::chrono::minutes(30)};
  std::chrono::milliseconds handshake_timeout{std::chrono::seconds(60)};
  std::chrono::milliseconds shutdown_grace{std::chrono::seconds(5)};
};

// Pipelines up to the handshake's parallelism. A request that times out
// comes back as an error response (the engine scores it 0) and any late reply
// to it is dropped. Malformed output, unknown ids and worker exit throw.
class WorkerEvaluator : public Evaluator {
 public:
  WorkerEvaluator(const std::string& command, WorkerOptions options);
  ~WorkerEvaluator() override;

  std::vector<EvaluationResponse> Evaluate(
      std::span<const EvaluationRequest> requests) override;

  int parallelism() const override { return handshake_.parallelism; }
  const WorkerHandshake& handshake() const { return handshake_; }

  // Sends the shutdown message and reaps the worker. Returns its exit code,
  // or -1 if it had to be killed or was already gone.
  int Shutdown();

 private:
  [[noreturn]] void ThrowExited(const std::string& context);

  WorkerOptions options_;
  WorkerProcess process_;
  WorkerHandshake handshake_;
  std::vector<std::uint64_t> timed_out_;
  bool shut_down_ = false;
};

}  // namespace clonalnas

#endif  // CLONALNAS_WORKER_H_
