// Copyright 2026 The polarproj Authors
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

#include <functional>
#include <string_view>

namespace polarproj {

// Library-wide settings. Both are process-global and thread-safe to read.

/// Strict mode turns recoverable realizability violations (DoLP > 1 beyond
/// the 1e-6 slack) into errors instead of clamping them with a warning.
/// Initialized from POLARPROJ_STRICT=1 on first use.
bool strict_mode();
void set_strict_mode(bool strict);

/// Upper bound on worker threads used by dense per-pixel operations.
/// 0 means std::thread::hardware_concurrency().
int thread_limit();
void set_thread_limit(int threads);

using WarningHandler = std::function<void(std::string_view)>;

/// Replaces the warning sink (default: first occurrence of each message
/// prefix goes to stderr). Returns the previous handler.
WarningHandler set_warning_handler(WarningHandler handler);
void warn(std::string_view message);

}  // namespace polarproj
