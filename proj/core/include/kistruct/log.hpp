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

namespace kistruct {

enum class LogLevel { kError = 0, kWarn = 1, kInfo = 2, kDebug = 3 };

/// Current diagnostics threshold. Initialized from the KISTRUCT_LOG
/// environment variable (error|warn|info|debug, default warn).
LogLevel log_level();
void set_log_level(LogLevel level);

/// Write a diagnostic line to stderr when `level` is at or below the
/// current threshold.
void log_message(LogLevel level, const std::string& message);

}  // namespace kistruct
