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

#include <stdexcept>
#include <string>
#include <string_view>

namespace polarproj {

/// Every failure the library reports carries one of these kinds. The CLI maps
/// them onto exit codes and prints `name(kind)` as the error-class prefix.
enum class ErrorKind {
  ZeroIntensity,
  UndefinedAngle,
  Unrealizable,
  SingularIntrinsics,
  DegenerateRay,
  DegeneratePolarizer,
  RankDeficient,
  LayoutMismatch,
  DomainError,
  NoSolution,
  FrameMismatch,
  DegenerateSystem,
  EmptyMask,
  InvisiblePlane,
  UnsupportedFormat,
  CorruptFile,
  SchemaError,
  IoError,
};

constexpr std::string_view name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::ZeroIntensity: return "ZeroIntensity";
    case ErrorKind::UndefinedAngle: return "UndefinedAngle";
    case ErrorKind::Unrealizable: return "Unrealizable";
    case ErrorKind::SingularIntrinsics: return "SingularIntrinsics";
    case ErrorKind::DegenerateRay: return "DegenerateRay";
    case ErrorKind::DegeneratePolarizer: return "DegeneratePolarizer";
    case ErrorKind::RankDeficient: return "RankDeficient";
    case ErrorKind::LayoutMismatch: return "LayoutMismatch";
    case ErrorKind::DomainError: return "DomainError";
    case ErrorKind::NoSolution: return "NoSolution";
    case ErrorKind::FrameMismatch: return "FrameMismatch";
    case ErrorKind::DegenerateSystem: return "DegenerateSystem";
    case ErrorKind::EmptyMask: return "EmptyMask";
    case ErrorKind::InvisiblePlane: return "InvisiblePlane";
    case ErrorKind::UnsupportedFormat: return "UnsupportedFormat";
    case ErrorKind::CorruptFile: return "CorruptFile";
    case ErrorKind::SchemaError: return "SchemaError";
    case ErrorKind::IoError: return "IoError";
  }
  return "Error";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(name(kind)) + ": " + message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

}  // namespace polarproj
