// Copyright 2026 The lengthctl Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "lengthctl/error.hpp"

namespace lengthctl {

/// Per-record length fidelity: absolute error, absolute percentage deviation
/// (as a fraction) and the generated/target ratio.
struct LengthMetrics {
  std::int64_t generated_words = 0;
  std::int64_t target_words = 0;
  std::int64_t abs_error = 0;
  double apd = 0.0;
  double ratio = 0.0;
};

/// Throws Error(ZeroTarget) for target_words < 1 and Error(InvalidArgument)
/// for a negative generated count.
LengthMetrics length_metrics(std::int64_t generated_words, std::int64_t target_words);

enum class StdKind { Population, Sample };

std::string_view to_string(StdKind kind) noexcept;

struct AggregateStats {
  double mean = 0.0;
  double std = 0.0;
  std::size_t n = 0;
};

/// Mean and standard deviation. A sample std over a single value is 0.
/// Throws Error(EmptyGroup) on an empty input.
AggregateStats summarize(std::span<const double> values, StdKind kind = StdKind::Population);

/// Groups (key, value) pairs and summarizes each group. Keys are any ordered
/// type; tuples of (endpoint), (endpoint, variant) and
/// (endpoint, variant, target) are the usual groupings.
template <class Key>
std::map<Key, AggregateStats> aggregate(std::span<const std::pair<Key, double>> values,
                                        StdKind kind = StdKind::Population) {
  std::map<Key, std::vector<double>> groups;
  for (const auto& [key, value] : values) groups[key].push_back(value);
  std::map<Key, AggregateStats> out;
  for (const auto& [key, group] : groups) out.emplace(key, summarize(group, kind));
  return out;
}

template <class Key>
std::map<Key, AggregateStats> aggregate(const std::vector<std::pair<Key, double>>& values,
                                        StdKind kind = StdKind::Population) {
  return aggregate(std::span<const std::pair<Key, double>>(values), kind);
}

/// 100 * (baseline - candidate) / baseline. Throws Error(ZeroBaseline).
double relative_improvement(double candidate_mapd, double baseline_mapd);

struct SignificanceResult {
  double statistic = 0.0;  // mean paired difference a - b
  double p_value = 1.0;
  std::size_t n_pairs = 0;
  std::size_t n_resamples = 0;  // 0 when enumerated exactly
  std::uint64_t seed = 0;
  bool exact = true;
};

/// Largest pair count that is enumerated exactly (2^12 = 4096 sign patterns).
inline constexpr std::size_t k_max_exact_pairs = 12;

/// Two-sided paired sign-flip permutation test on the differences a[i] - b[i].
/// The p-value is the share of sign assignments whose |mean difference| is at
/// least the observed one; above k_max_exact_pairs it is estimated from
/// `n_resamples` seeded draws as (hits + 1) / (n_resamples + 1).
///
/// Throws Error(LengthMismatch) or Error(TooFewPairs) (fewer than 2).
SignificanceResult paired_significance(std::span<const double> a, std::span<const double> b,
                                       std::size_t n_resamples = 10000, std::uint64_t seed = 0);

/// Pairing key for aligning two attempt series.
struct PairKey {
  int target_words = 0;
  int attempt = 0;
  auto operator<=>(const PairKey&) const = default;
};

/// Aligns a and b by key before testing. Keys must match one-to-one,
/// otherwise Error(LengthMismatch).
SignificanceResult paired_significance(const std::map<PairKey, double>& a, const std::map<PairKey, double>& b,
                                       std::size_t n_resamples = 10000, std::uint64_t seed = 0);

}  // namespace lengthctl
