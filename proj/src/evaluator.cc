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

#include "clonalnas/evaluator.h"

#include <exception>
#include <sstream>

namespace clonalnas {

EvaluationResponse EvaluationResponse::Success(std::uint64_t id,
                                               double affinity) {
  EvaluationResponse r;
  r.id = id;
  r.affinity = affinity;
  return r;
}

EvaluationResponse EvaluationResponse::Failure(std::uint64_t id,
                                               std::string message) {
  EvaluationResponse r;
  r.id = id;
  r.error = std::move(message);
  return r;
}

std::string CacheKey(const EvaluationRequest& request) {
  std::ostringstream key;
  key.precision(17);
  key << request.model.CanonicalText() << '#' << request.dataset << '#'
      << request.budget.train_fraction << '#' << request.budget.epochs;
  return key.str();
}

std::vector<EvaluationResponse> CachedEvaluator::Evaluate(
    std::span<const EvaluationRequest> requests) {
  std::vector<std::shared_future<EvaluationResponse>> futures;
  futures.reserve(requests.size());
  std::vector<EvaluationRequest> forward;
  std::vector<std::string> forward_keys;
  std::vector<std::promise<EvaluationResponse>> promises;

  {
    std::lock_guard<std::mutex> lock(mutex_);
    for (const EvaluationRequest& request : requests) {
      ++requests_;
      std::string key = CacheKey(request);
      auto it = entries_.find(key);
      if (it != entries_.end()) {
        ++hits_;
        futures.push_back(it->second);
        continue;
      }
      promises.emplace_back();
      std::shared_future<EvaluationResponse> future =
          promises.back().get_future().share();
      entries_.emplace(key, future);
      futures.push_back(future);
      forward.push_back(request);
      forward_keys.push_back(std::move(key));
    }
  }

  if (!forward.empty()) {
    std::vector<EvaluationResponse> fresh;
    try {
      fresh = inner_.Evaluate(forward);
      if (fresh.size() != forward.size()) {
        throw EvaluatorError("evaluator returned " +
                             std::to_string(fresh.size()) + " responses for " +
                             std::to_string(forward.size()) + " requests");
      }
    } catch (...) {
      std::lock_guard<std::mutex> lock(mutex_);
      for (std::size_t i = 0; i < forward.size(); ++i) {
        entries_.erase(forward_keys[i]);
        promises[i].set_exception(std::current_exception());
      }
      throw;
    }
    std::lock_guard<std::mutex> lock(mutex_);
    for (std::size_t i = 0; i < forward.size(); ++i) {
      if (fresh[i].error) entries_.erase(forward_keys[i]);
      promises[i].set_value(std::move(fresh[i]));
    }
  }

  std::vector<EvaluationResponse> responses;
  responses.reserve(requests.size());
  for (std::size_t i = 0; i < requests.size(); ++i) {
    EvaluationResponse r = futures[i].get();
    r.id = requests[i].id;
    responses.push_back(std::move(r));
  }
  return responses;
}

std::uint64_t CachedEvaluator::requests() const {
  std::lock_guard<std::mutex> lock(mutex_);
  return requests_;
}

std::uint64_t CachedEvaluator::hits() const {
  std::lock_guard<std::mutex> lock(mutex_);
  return hits_;
}

std::uint64_t CachedEvaluator::inner_calls() const {
  std::lock_guard<std::mutex> lock(mutex_);
  return requests_ - hits_;
}

}  // namespace clonalnas
