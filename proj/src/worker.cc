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

#include "clonalnas/worker.h"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <csignal>
#include <cstring>
#include <map>
#include <thread>

#include <spdlog/spdlog.h>

extern char** environ;

namespace clonalnas {

namespace {

using Clock = std::chrono::steady_clock;
using nlohmann::json;

json ParseLine(std::string_view line, const char* what) {
  json message = json::parse(line, nullptr, /*allow_exceptions=*/false);
  if (message.is_discarded() || !message.is_object()) {
    throw ProtocolError(std::string("malformed ") + what + ": '" +
                        std::string(line.substr(0, 200)) + "'");
  }
  return message;
}

std::uint64_t RequireId(const json& message, std::string_view line) {
  auto it = message.find("id");
  if (it == message.end() || !it->is_number_integer() ||
      it->get<std::int64_t>() < 0) {
    throw ProtocolError("message without a valid id: '" +
                        std::string(line.substr(0, 200)) + "'");
  }
  return it->get<std::uint64_t>();
}

CellCode CodeField(const json& value) {
  if (!value.is_string()) throw ProtocolError("cell code must be a string");
  try {
    return FromText(value.get<std::string>());
  } catch (const CodeParseError& e) {
    throw ProtocolError(e.what());
  }
}

std::string DescribeStatus(int status) {
  if (WIFEXITED(status)) {
    return "exited with status " + std::to_string(WEXITSTATUS(status));
  }
  if (WIFSIGNALED(status)) {
    return "was killed by signal " + std::to_string(WTERMSIG(status));
  }
  return "stopped";
}

}  // namespace

json RequestToJson(const EvaluationRequest& request) {
  json cells = json::array();
  for (const CellCode& c : request.model.frozen_cells) cells.push_back(ToText(c));
  return {
      {"id", request.id},
      {"model",
       {{"cells", cells},
        {"candidate", ToText(request.model.candidate_cell)},
        {"k", request.model.layers_per_cell}}},
      {"dataset", request.dataset},
      {"budget",
       {{"train_fraction", request.budget.train_fraction},
        {"epochs", request.budget.epochs}}},
      {"seed", request.seed},
  };
}

EvaluationRequest RequestFromJson(const json& message) {
  try {
    EvaluationRequest request;
    request.id = message.at("id").get<std::uint64_t>();
    const json& model = message.at("model");
    std::vector<CellCode> frozen;
    for (const json& c : model.at("cells")) frozen.push_back(CodeField(c));
    request.model =
        ModelSpec::ForCandidate(std::move(frozen), CodeField(model.at("candidate")));
    const int k = model.at("k").get<int>();
    if (k != request.model.layers_per_cell) {
      throw ProtocolError("declared k does not match the candidate code");
    }
    request.dataset = message.at("dataset").get<std::string>();
    request.budget.train_fraction =
        message.at("budget").at("train_fraction").get<double>();
    request.budget.epochs = message.at("budget").at("epochs").get<int>();
    request.seed = message.at("seed").get<std::int64_t>();
    return request;
  } catch (const json::exception& e) {
    throw ProtocolError(std::string("malformed request: ") + e.what());
  }
}

WorkerHandshake ParseHandshake(std::string_view line) {
  const json message = ParseLine(line, "handshake");
  auto hello = message.find("hello");
  if (hello == message.end() || !hello->is_object()) {
    throw ProtocolError("expected a hello handshake, got '" +
                        std::string(line.substr(0, 200)) + "'");
  }
  WorkerHandshake handshake;
  try {
    handshake.protocol = hello->at("protocol").get<int>();
    handshake.parallelism = hello->value("parallelism", 1);
    if (hello->contains("datasets")) {
      handshake.datasets =
          hello->at("datasets").get<std::vector<std::string>>();
    }
  } catch (const json::exception& e) {
    throw ProtocolError(std::string("malformed handshake: ") + e.what());
  }
  if (handshake.protocol != kProtocolVersion) {
    throw ProtocolError("unsupported protocol version " +
                        std::to_string(handshake.protocol));
  }
  if (handshake.parallelism < 1) {
    throw ProtocolError("handshake parallelism must be at least 1");
  }
  return handshake;
}

EvaluationResponse ParseResponse(std::string_view line) {
  const json message = ParseLine(line, "response");
  EvaluationResponse response;
  response.id = RequireId(message, line);
  auto affinity = message.find("affinity");
  auto error = message.find("error");
  const bool has_affinity = affinity != message.end() && !affinity->is_null();
  const bool has_error = error != message.end() && !error->is_null();
  if (has_affinity == has_error) {
    throw ProtocolError("response " + std::to_string(response.id) +
                        " must carry exactly one of affinity and error");
  }
  if (has_affinity) {
    if (!affinity->is_number()) {
      throw ProtocolError("response " + std::to_string(response.id) +
                          ": affinity is not a number");
    }
    const double value = affinity->get<double>();
    if (!(value >= 0.0 && value <= 1.0)) {
      throw ProtocolError("response " + std::to_string(response.id) +
                          ": affinity " + std::to_string(value) +
                          " outside [0, 1]");
    }
    response.affinity = value;
  } else {
    if (!error->is_string()) {
      throw ProtocolError("response " + std::to_string(response.id) +
                          ": error is not a string");
    }
    response.error = error->get<std::string>();
  }
  auto metrics = message.find("metrics");
  if (metrics != message.end() && metrics->is_object()) {
    for (const auto& [key, value] : metrics->items()) {
      if (value.is_number()) response.metrics[key] = value.get<double>();
    }
  }
  return response;
}

std::string ResponseToLine(const EvaluationResponse& response) {
  json message = {{"id", response.id}};
  if (response.affinity) message["affinity"] = *response.affinity;
  if (response.error) message["error"] = *response.error;
  if (!response.metrics.empty()) message["metrics"] = response.metrics;
  return message.dump();
}

WorkerProcess::WorkerProcess(const std::string& command) {
  std::signal(SIGPIPE, SIG_IGN);
  int to_child[2];
  int from_child[2];
  if (pipe2(to_child, O_CLOEXEC) != 0) {
    throw EvaluatorError(std::string("pipe: ") + std::strerror(errno));
  }
  if (pipe2(from_child, O_CLOEXEC) != 0) {
    close(to_child[0]);
    close(to_child[1]);
    throw EvaluatorError(std::string("pipe: ") + std::strerror(errno));
  }
  posix_spawn_file_actions_t actions;
  posix_spawn_file_actions_init(&actions);
  posix_spawn_file_actions_adddup2(&actions, to_child[0], STDIN_FILENO);
  posix_spawn_file_actions_adddup2(&actions, from_child[1], STDOUT_FILENO);
  std::string shell_command = command;
  char arg0[] = "sh";
  char arg1[] = "-c";
  char* argv[] = {arg0, arg1, shell_command.data(), nullptr};
  const int rc =
      posix_spawn(&pid_, "/bin/sh", &actions, nullptr, argv, environ);
  posix_spawn_file_actions_destroy(&actions);
  close(to_child[0]);
  close(from_child[1]);
  if (rc != 0) {
    close(to_child[1]);
    close(from_child[0]);
    throw EvaluatorError("cannot start worker '" + command +
                         "': " + std::strerror(rc));
  }
  to_child_ = to_child[1];
  from_child_ = from_child[0];
}

WorkerProcess::~WorkerProcess() {
  if (pid_ > 0 && !status_) Terminate(std::chrono::milliseconds(200));
  if (to_child_ >= 0) close(to_child_);
  if (from_child_ >= 0) close(from_child_);
}

void WorkerProcess::WriteLine(std::string_view line) {
  if (to_child_ < 0) throw WorkerExitedError("worker input already closed");
  std::string data(line);
  data += '\n';
  std::size_t written = 0;
  while (written < data.size()) {
    const ssize_t n =
        write(to_child_, data.data() + written, data.size() - written);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw WorkerExitedError(std::string("cannot write to worker: ") +
                              std::strerror(errno));
    }
    written += static_cast<std::size_t>(n);
  }
}

std::optional<std::string> WorkerProcess::ReadLine(
    std::chrono::milliseconds timeout) {
  const Clock::time_point deadline = Clock::now() + timeout;
  while (true) {
    const std::size_t newline = buffer_.find('\n');
    if (newline != std::string::npos) {
      std::string line = buffer_.substr(0, newline);
      buffer_.erase(0, newline + 1);
      if (!line.empty() && line.back() == '\r') line.pop_back();
      return line;
    }
    const auto remaining = std::chrono::duration_cast<std::chrono::milliseconds>(
        deadline - Clock::now());
    if (remaining.count() <= 0) return std::nullopt;
    pollfd fd{from_child_, POLLIN, 0};
    const int ready = poll(&fd, 1, static_cast<int>(std::min<long long>(
                                       remaining.count(), 1 << 30)));
    if (ready < 0) {
      if (errno == EINTR) continue;
      throw EvaluatorError(std::string("poll: ") + std::strerror(errno));
    }
    if (ready == 0) return std::nullopt;
    char chunk[4096];
    const ssize_t n = read(from_child_, chunk, sizeof(chunk));
    if (n < 0) {
      if (errno == EINTR) continue;
      throw WorkerExitedError(std::string("cannot read from worker: ") +
                              std::strerror(errno));
    }
    if (n == 0) {
      if (!buffer_.empty()) {
        std::string line = std::move(buffer_);
        buffer_.clear();
        return line;
      }
      throw WorkerExitedError("worker closed its output");
    }
    buffer_.append(chunk, static_cast<std::size_t>(n));
  }
}

void WorkerProcess::CloseInput() {
  if (to_child_ >= 0) {
    close(to_child_);
    to_child_ = -1;
  }
}

int WorkerProcess::Terminate(std::chrono::milliseconds grace) {
  CloseInput();
  if (status_) return *status_;
  if (pid_ <= 0) return -1;
  const Clock::time_point deadline = Clock::now() + grace;
  int status = 0;
  while (true) {
    const pid_t r = waitpid(pid_, &status, WNOHANG);
    if (r == pid_) {
      status_ = status;
      return status;
    }
    if (r < 0) return -1;
    if (Clock::now() >= deadline) break;
    std::this_thread::sleep_for(std::chrono::milliseconds(5));
  }
  kill(pid_, SIGKILL);
  if (waitpid(pid_, &status, 0) == pid_) status_ = status;
  return status_.value_or(-1);
}

std::optional<std::string> WorkerProcess::ExitDescription() {
  if (!status_ && pid_ > 0) {
    int status = 0;
    if (waitpid(pid_, &status, WNOHANG) == pid_) status_ = status;
  }
  if (!status_) return std::nullopt;
  return DescribeStatus(*status_);
}

WorkerEvaluator::WorkerEvaluator(const std::string& command,
                                 WorkerOptions options)
    : options_(options), process_(command) {
  const Clock::time_point deadline = Clock::now() + options_.handshake_timeout;
  while (true) {
    const auto remaining = std::chrono::duration_cast<std::chrono::milliseconds>(
        deadline - Clock::now());
    std::optional<std::string> line;
    try {
      line = process_.ReadLine(std::max(remaining, std::chrono::milliseconds(0)));
    } catch (const WorkerExitedError&) {
      ThrowExited("before completing the handshake");
    }
    if (!line) {
      throw ProtocolError("worker sent no handshake within " +
                          std::to_string(options_.handshake_timeout.count()) +
                          " ms");
    }
    if (line->empty() || line->front() == '#') continue;
    handshake_ = ParseHandshake(*line);
    break;
  }
  spdlog::debug("worker {} ready: parallelism {}", process_.pid(),
                handshake_.parallelism);
}

WorkerEvaluator::~WorkerEvaluator() {
  try {
    Shutdown();
  } catch (...) {
  }
}

void WorkerEvaluator::ThrowExited(const std::string& context) {
  std::optional<std::string> how;
  for (int i = 0; i < 100 && !how; ++i) {
    how = process_.ExitDescription();
    if (!how) std::this_thread::sleep_for(std::chrono::milliseconds(5));
  }
  throw WorkerExitedError("worker " + how.value_or("closed its output") + " " +
                          context);
}

std::vector<EvaluationResponse> WorkerEvaluator::Evaluate(
    std::span<const EvaluationRequest> requests) {
  if (shut_down_) throw WorkerExitedError("worker already shut down");
  struct Outstanding {
    std::size_t index;
    Clock::time_point deadline;
  };
  std::vector<EvaluationResponse> responses(requests.size());
  std::map<std::uint64_t, Outstanding> outstanding;
  std::size_t next = 0;
  std::size_t done = 0;

  while (done < requests.size()) {
    while (next < requests.size() &&
           static_cast<int>(outstanding.size()) < handshake_.parallelism) {
      const EvaluationRequest& request = requests[next];
      if (outstanding.count(request.id)) {
        throw std::invalid_argument("duplicate request id " +
                                    std::to_string(request.id));
      }
      try {
        process_.WriteLine(RequestToJson(request).dump());
      } catch (const WorkerExitedError&) {
        ThrowExited("while receiving request " + std::to_string(request.id));
      }
      outstanding[request.id] = {next, Clock::now() + options_.request_timeout};
      ++next;
    }

    const Clock::time_point now = Clock::now();
    for (auto it = outstanding.begin(); it != outstanding.end();) {
      if (it->second.deadline > now) {
        ++it;
        continue;
      }
      spdlog::warn("request {} timed out after {} ms; scoring it 0", it->first,
                   options_.request_timeout.count());
      responses[it->second.index] = EvaluationResponse::Failure(
          it->first, "timeout after " +
                         std::to_string(options_.request_timeout.count()) +
                         " ms");
      timed_out_.push_back(it->first);
      ++done;
      it = outstanding.erase(it);
    }
    if (outstanding.empty()) continue;

    Clock::time_point earliest = Clock::time_point::max();
    for (const auto& [id, o] : outstanding) {
      earliest = std::min(earliest, o.deadline);
    }
    const auto wait = std::chrono::duration_cast<std::chrono::milliseconds>(
                          earliest - now) +
                      std::chrono::milliseconds(1);
    std::optional<std::string> line;
    try {
      line = process_.ReadLine(wait);
    } catch (const WorkerExitedError&) {
      ThrowExited("with " + std::to_string(outstanding.size()) +
                  " requests outstanding");
    }
    if (!line) continue;
    if (line->empty() || line->front() == '#') {
      spdlog::debug("worker: {}", *line);
      continue;
    }
    EvaluationResponse response = ParseResponse(*line);
    auto it = outstanding.find(response.id);
    if (it == outstanding.end()) {
      if (std::find(timed_out_.begin(), timed_out_.end(), response.id) !=
          timed_out_.end()) {
        spdlog::info("dropping late response for timed-out request {}",
                     response.id);
        continue;
      }
      throw ProtocolError("response for unknown request id " +
                              std::to_string(response.id),
                          response.id);
    }
    if (response.error) {
      spdlog::warn("worker failed request {}: {}", response.id,
                   *response.error);
    }
    responses[it->second.index] = std::move(response);
    outstanding.erase(it);
    ++done;
  }
  return responses;
}

int WorkerEvaluator::Shutdown() {
  if (shut_down_) return -1;
  shut_down_ = true;
  try {
    process_.WriteLine(json{{"shutdown", true}}.dump());
  } catch (const WorkerExitedError&) {
  }
  const int status = process_.Terminate(options_.shutdown_grace);
  if (status >= 0 && WIFEXITED(status)) return WEXITSTATUS(status);
  return -1;
}

}  // namespace clonalnas
