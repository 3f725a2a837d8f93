// Copyright 2026 The lengthctl Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace lengthctl {

enum class ErrorKind {
  // prompt
  MissingPlaceholder,
  KindMismatch,
  ZeroTarget,
  InvalidTask,
  UnknownVariant,
  // parse
  EmptyResponse,
  ThinkingOnly,
  // client
  AuthError,
  RateLimited,
  ProviderError,
  Timeout,
  // metrics
  EmptyGroup,
  ZeroBaseline,
  LengthMismatch,
  TooFewPairs,
  // judge
  UnknownDimension,
  NoScoreFound,
  ScoreOutOfRange,
  // runner
  EmptyAxis,
  InvalidPlan,
  PlanMismatch,
  // report
  EmptyStore,
  MissingFamily,
  // ingest / io
  NotFound,
  InvalidEncoding,
  EmptyDocument,
  IoError,
  InvalidArgument,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// The single exception type thrown by the library. `kind()` is the stable
/// error class persisted in failed records and mapped to CLI exit codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// ProviderError carrying the HTTP status (0 for transport failures).
class ProviderError : public Error {
 public:
  ProviderError(int status, const std::string& message)
      : Error(ErrorKind::ProviderError, "HTTP " + std::to_string(status) + ": " + message),
        status_(status) {}

  int status() const noexcept { return status_; }

 private:
  int status_;
};

}  // namespace lengthctl
