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

#ifndef CLONALNAS_EVALUATOR_H_
#define CLONALNAS_EVALUATOR_H_

#include <cstdint>
#include <future>
#include <map>
#include <mutex>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "clonalnas/graph.h"

namespace clonalnas {

struct EvaluationBudget {
  double train_fraction = 1.0;
  int epochs = 1;

  friend bool operator==(const EvaluationBudget&,
                         const EvaluationBudget&) = default;
};

struct EvaluationRequest {
  std::uint64_t id = 0;
  ModelSpec model;
  std::string dataset;
  EvaluationBudget budget;
  std::int64_t seed = 0;
};

// Exactly one of affinity / error is set.
struct EvaluationResponse {
  std::uint64_t id = 0;
  std::optional<double> affinity;
  std::map<std::string, double> metrics;
  std::optional<std::string> error;

  static EvaluationResponse Success(std::uint64_t id, double affinity);
  static EvaluationResponse Failure(std::uint64_t id, std::string message);
};

// Raised when an evaluator cannot produce responses at all. Per-request
// failures (a model that would not train, a timeout) come back as
// EvaluationResponse::error instead.
class EvaluatorError : public std::runtime_error {
 public:
  explicit EvaluatorError(const std::string& message,
                          std::optional<std::uint64_t> request_id = {})
      : std::runtime_error(message), request_id_(request_id) {}

  std::optional<std::uint64_t> request_id() const { return request_id_; }

 private:
  std::optional<std::uint64_t> request_id_;
};

// The worker broke the wire protocol.
class ProtocolError : public EvaluatorError {
 public:
  using EvaluatorError::EvaluatorError;
};

// The worker process went away.
class WorkerExitedError : public EvaluatorError {
 public:
  using EvaluatorError::EvaluatorError;
};

class Evaluator {
 public:
  virtual ~Evaluator() = default;

  // Responses are aligned with `requests` by position. Implementations may
  // work on several requests at once.
  virtual std::vector<EvaluationResponse> Evaluate(
      std::span<const EvaluationRequest> requests) = 0;

  virtual int parallelism() const { return 1; }
};

// Cache key: full model chain plus dataset and budget. Seeds and ids are not
// part of the key.
std::string CacheKey(const EvaluationRequest& request);

// Memoizes successful responses. Concurrent callers share in-flight work, so
// each key reaches the inner evaluator at most once until it fails; failures
// are never stored.
class CachedEvaluator : public Evaluator {
 public:
  explicit CachedEvaluator(Evaluator& inner) : inner_(inner) {}

  std::vector<EvaluationResponse> Evaluate(
      std::span<const EvaluationRequest> requests) override;

  int parallelism() const override { return inner_.parallelism(); }

  std::uint64_t requests() const;
  std::uint64_t hits() const;
  // Requests forwarded to the inner evaluator (= requests - hits).
  std::uint64_t inner_calls() const;

 private:
  Evaluator& inner_;
  mutable std::mutex mutex_;
  std::unordered_map<std::string, std::shared_future<EvaluationResponse>>
      entries_;
  std::uint64_t requests_ = 0;
  std::uint64_t hits_ = 0;
};

}  // namespace clonalnas

#endif  // CLONALNAS_EVALUATOR_H_
