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

#include <doctest.h>

#include <polarproj/config.hpp>
#include <polarproj/error.hpp>

#include <functional>
#include <optional>
#include <vector>
#include <string>

namespace testing {

/// Runs `f` and returns the kind of the polarproj::Error it throws.
template <class F>
std::optional<polarproj::ErrorKind> error_kind(F&& f) {
  try {
    f();
  } catch (const polarproj::Error& e) {
    return e.kind();
  }
  return std::nullopt;
}

template <class F>
std::string error_message(F&& f) {
  try {
    f();
  } catch (const polarproj::Error& e) {
    return e.what();
  }
  return {};
}

/// Scoped strict-mode switch.
struct StrictScope {
  bool previous;
  explicit StrictScope(bool strict) : previous(polarproj::strict_mode()) { polarproj::set_strict_mode(strict); }
  ~StrictScope() { polarproj::set_strict_mode(previous); }
};

/// Collects warnings instead of printing them.
struct WarningSink {
  std::vector<std::string> messages;
  polarproj::WarningHandler previous;
  WarningSink() {
    previous = polarproj::set_warning_handler([this](std::string_view m) { messages.emplace_back(m); });
  }
  ~WarningSink() { polarproj::set_warning_handler(previous); }
};

}  // namespace testing

#define CHECK_ERROR(expr, kind) CHECK(testing::error_kind([&] { (void)(expr); }) == (kind))
