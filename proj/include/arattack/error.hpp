/*
 * Copyright 2026 The arattack Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <stdexcept>
#include <string>

namespace arattack {

enum class ErrorKind {
  kOrderOverflow,
  kDomain,
  kZeroWeight,
  kSchedule,
  kDivergence,
  kDimensionMismatch,
  kSolverInstability,
  kInsufficientData,
  kUnsupportedPattern,
  kConfig,
  kExhausted,
  kInsufficientTrials,
};

const char* to_string(ErrorKind kind);

// Every library failure is reported through this type; kind() lets callers
// (the CLI in particular) map failures to exit codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

// Raised when a rollout leaves the representable range.
class DivergenceError : public Error {
 public:
  DivergenceError(int time, double value);

  int time() const noexcept { return time_; }
  double value() const noexcept { return value_; }

 private:
  int time_;
  double value_;
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kOrderOverflow: return "order overflow";
    case ErrorKind::kDomain: return "domain error";
    case ErrorKind::kZeroWeight: return "zero weight";
    case ErrorKind::kSchedule: return "schedule error";
    case ErrorKind::kDivergence: return "divergence";
    case ErrorKind::kDimensionMismatch: return "dimension mismatch";
    case ErrorKind::kSolverInstability: return "solver instability";
    case ErrorKind::kInsufficientData: return "insufficient data";
    case ErrorKind::kUnsupportedPattern: return "unsupported pattern";
    case ErrorKind::kConfig: return "config error";
    case ErrorKind::kExhausted: return "controller exhausted";
    case ErrorKind::kInsufficientTrials: return "insufficient trials";
  }
  return "unknown";
}

inline DivergenceError::DivergenceError(int time, double value)
    : Error(ErrorKind::kDivergence,
            "state " + std::to_string(value) + " at t=" + std::to_string(time)),
      time_(time),
      value_(value) {}

}  // namespace arattack
