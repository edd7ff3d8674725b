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

#ifndef CLONALNAS_TOOLS_CLI_H_
#define CLONALNAS_TOOLS_CLI_H_

#include <ostream>
#include <string>
#include <vector>

namespace clonalnas::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInternal = 1;
inline constexpr int kExitInvalidInput = 2;
inline constexpr int kExitEvaluator = 3;

// Default config path when search gets no --config.
inline constexpr const char* kConfigEnvVar = "CLONALNAS_CONFIG";

// args excludes the program name.
int Run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err);

}  // namespace clonalnas::cli

#endif  // CLONALNAS_TOOLS_CLI_H_
