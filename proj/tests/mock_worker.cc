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

// Scripted stand-in for a training worker.
//
//   mock_worker MODE [PARALLELISM] [ARG]
//
// MODE:
//   echo         answer every request in order
//   reverse      collect PARALLELISM requests, answer them last-first
//   error        answer every request with an error
//   error-odd    error for odd ids, affinity for even ids
//   slow         sleep ARG ms before each answer
//   hang         never answer
//   exit         exit 7 before the handshake
//   die          handshake, read one request, exit 5
//   garbage      answer with a non-JSON line
//   unknown-id   answer with an id that was never sent
//   out-of-range answer with affinity 1.5
//   bad-hello    protocol-2 handshake
//   comments     like echo, with '#' diagnostic lines interleaved
//   record       like echo, appending every received line to file ARG
//
// Affinity for a request is a hash of its candidate code mapped to [0, 1).
// {"shutdown": true} exits 0 in every mode.

#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

namespace {

using nlohmann::json;

double HashAffinity(const std::string& text) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return static_cast<double>(h >> 11) / 9007199254740992.0;
}

void Emit(const json& message) {
  std::cout << message.dump() << '\n' << std::flush;
}

json Answer(const json& request) {
  return {{"id", request.at("id")},
          {"affinity",
           HashAffinity(request.at("model").at("candidate").get<std::string>())},
          {"metrics", {{"epochs", request.at("budget").at("epochs")}}}};
}

}  // namespace

int main(int argc, char** argv) {
  const std::string mode = argc > 1 ? argv[1] : "echo";
  const int parallelism = argc > 2 ? std::atoi(argv[2]) : 1;
  const std::string arg = argc > 3 ? argv[3] : "";

  if (mode == "exit") return 7;
  if (mode == "comments") std::cout << "# warming up\n";
  if (mode == "bad-hello") {
    Emit({{"hello", {{"protocol", 2}, {"parallelism", 1}}}});
  } else {
    Emit({{"hello",
           {{"protocol", 1},
            {"parallelism", parallelism},
            {"datasets", {"mnist", "cifar10"}}}}});
  }

  std::vector<json> held;
  std::string line;
  while (std::getline(std::cin, line)) {
    if (mode == "record") {
      std::ofstream(arg, std::ios::app) << line << '\n';
    }
    const json message = json::parse(line);
    if (message.value("shutdown", false)) return 0;
    const std::uint64_t id = message.at("id").get<std::uint64_t>();

    if (mode == "die") return 5;
    if (mode == "hang") continue;
    if (mode == "garbage") {
      std::cout << "this is not json\n" << std::flush;
      continue;
    }
    if (mode == "unknown-id") {
      Emit({{"id", id + 1000}, {"affinity", 0.5}});
      continue;
    }
    if (mode == "out-of-range") {
      Emit({{"id", id}, {"affinity", 1.5}});
      continue;
    }
    if (mode == "error" || (mode == "error-odd" && id % 2 == 1)) {
      Emit({{"id", id}, {"error", "training diverged"}});
      continue;
    }
    if (mode == "slow") {
      std::this_thread::sleep_for(std::chrono::milliseconds(std::atoi(arg.c_str())));
    }
    if (mode == "reverse") {
      held.push_back(message);
      if (static_cast<int>(held.size()) < parallelism) continue;
      for (auto it = held.rbegin(); it != held.rend(); ++it) Emit(Answer(*it));
      held.clear();
      continue;
    }
    if (mode == "comments") std::cout << "# training " << id << '\n';
    Emit(Answer(message));
  }
  // Flush partial reverse batches when input closes.
  for (auto it = held.rbegin(); it != held.rend(); ++it) Emit(Answer(*it));
  return 0;
}
