// Copyright 2026 The kistruct authors
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

#pragma once

#include <string>
#include <vector>

namespace kistruct::cli {

/// Command-line driver. Exit codes: 0 on success or a certified/feasible
/// verdict, 2 on a negative verdict (violated, ill-posed, refuted,
/// infeasible, undecided), 1 on I/O or validation errors.
int run(const std::vector<std::string>& args);
int run(int argc, char** argv);

}  // namespace kistruct::cli
