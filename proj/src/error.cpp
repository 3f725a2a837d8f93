// Copyright 2026 The lengthctl Authors
// SPDX-License-Identifier: Apache-2.0

#include "lengthctl/error.hpp"

namespace lengthctl {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::MissingPlaceholder: return "MissingPlaceholder";
    case ErrorKind::KindMismatch: return "KindMismatch";
    case ErrorKind::ZeroTarget: return "ZeroTarget";
    case ErrorKind::InvalidTask: return "InvalidTask";
    case ErrorKind::UnknownVariant: return "UnknownVariant";
    case ErrorKind::EmptyResponse: return "EmptyResponse";
    case ErrorKind::ThinkingOnly: return "ThinkingOnly";
    case ErrorKind::AuthError: return "AuthError";
    case ErrorKind::RateLimited: return "RateLimited";
    case ErrorKind::ProviderError: return "ProviderError";
    case ErrorKind::Timeout: return "Timeout";
    case ErrorKind::EmptyGroup: return "EmptyGroup";
    case ErrorKind::ZeroBaseline: return "ZeroBaseline";
    case ErrorKind::LengthMismatch: return "LengthMismatch";
    case ErrorKind::TooFewPairs: return "TooFewPairs";
    case ErrorKind::UnknownDimension: return "UnknownDimension";
    case ErrorKind::NoScoreFound: return "NoScoreFound";
    case ErrorKind::ScoreOutOfRange: return "ScoreOutOfRange";
    case ErrorKind::EmptyAxis: return "EmptyAxis";
    case ErrorKind::InvalidPlan: return "InvalidPlan";
    case ErrorKind::PlanMismatch: return "PlanMismatch";
    case ErrorKind::EmptyStore: return "EmptyStore";
    case ErrorKind::MissingFamily: return "MissingFamily";
    case ErrorKind::NotFound: return "NotFound";
    case ErrorKind::InvalidEncoding: return "InvalidEncoding";
    case ErrorKind::EmptyDocument: return "EmptyDocument";
    case ErrorKind::IoError: return "IoError";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

}  // namespace lengthctl
