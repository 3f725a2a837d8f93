// Copyright 2026 The lengthctl Authors
// SPDX-License-Identifier: Apache-2.0

#include "lengthctl/metrics.hpp"

#include <algorithm>
#include <random>

namespace lengthctl {

namespace {

// Tolerance for "at least as extreme": flipped sums differ from the observed
// one only by rounding when they are mathematically equal.
double tie_tolerance(std::span<const double> diffs) {
  double scale = 0.0;
  for (double d : diffs) scale += std::fabs(d);
  return 1e-12 * std::max(scale, 1.0);
}

}  // namespace

LengthMetrics length_metrics(std::int64_t generated_words, std::int64_t target_words) {
  if (target_words < 1) throw Error(ErrorKind::ZeroTarget, "target_words must be >= 1");
  if (generated_words < 0) throw Error(ErrorKind::InvalidArgument, "generated_words must be >= 0");
  LengthMetrics m;
  m.generated_words = generated_words;
  m.target_words = target_words;
  m.abs_error = generated_words > target_words ? generated_words - target_words : target_words - generated_words;
  m.apd = static_cast<double>(m.abs_error) / static_cast<double>(target_words);
  m.ratio = static_cast<double>(generated_words) / static_cast<double>(target_words);
  return m;
}

std::string_view to_string(StdKind kind) noexcept { return kind == StdKind::Population ? "population" : "sample"; }

AggregateStats summarize(std::span<const double> values, StdKind kind) {
  if (values.empty()) throw Error(ErrorKind::EmptyGroup, "cannot summarize an empty group");
  const auto n = static_cast<double>(values.size());
  double sum = 0.0;
  for (double v : values) sum += v;
  const double mean = sum / n;
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  double var = 0.0;
  if (kind == StdKind::Population) {
    var = ss / n;
  } else if (values.size() > 1) {
    var = ss / (n - 1.0);
  }
  return AggregateStats{mean, std::sqrt(var), values.size()};
}

double relative_improvement(double candidate_mapd, double baseline_mapd) {
  if (!(baseline_mapd > 0.0)) throw Error(ErrorKind::ZeroBaseline, "baseline MAPD must be > 0");
  return 100.0 * (baseline_mapd - candidate_mapd) / baseline_mapd;
}

SignificanceResult paired_significance(std::span<const double> a, std::span<const double> b,
                                       std::size_t n_resamples, std::uint64_t seed) {
  if (a.size() != b.size()) {
    throw Error(ErrorKind::LengthMismatch,
                "paired samples differ in size: " + std::to_string(a.size()) + " vs " + std::to_string(b.size()));
  }
  if (a.size() < 2) throw Error(ErrorKind::TooFewPairs, "need at least 2 pairs");

  const std::size_t n = a.size();
  std::vector<double> diffs(n);
  double observed = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    diffs[i] = a[i] - b[i];
    observed += diffs[i];
  }
  const double threshold = std::fabs(observed) - tie_tolerance(diffs);

  SignificanceResult result;
  result.statistic = observed / static_cast<double>(n);
  result.n_pairs = n;
  result.seed = seed;

  auto flipped_sum = [&](auto&& sign_bit) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += sign_bit(i) ? -diffs[i] : diffs[i];
    return s;
  };

  if (n <= k_max_exact_pairs) {
    const std::uint64_t patterns = std::uint64_t{1} << n;
    std::uint64_t hits = 0;
    for (std::uint64_t mask = 0; mask < patterns; ++mask) {
      const double s = flipped_sum([mask](std::size_t i) { return (mask >> i) & 1U; });
      if (std::fabs(s) >= threshold) ++hits;
    }
    result.p_value = static_cast<double>(hits) / static_cast<double>(patterns);
    result.exact = true;
    result.n_resamples = 0;
    return result;
  }

  if (n_resamples == 0) throw Error(ErrorKind::InvalidArgument, "n_resamples must be > 0 above 12 pairs");
  std::mt19937_64 rng(seed);
  std::uint64_t hits = 0;
  std::vector<bool> signs(n);
  for (std::size_t r = 0; r < n_resamples; ++r) {
    std::uint64_t bits = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (i % 64 == 0) bits = rng();
      signs[i] = (bits >> (i % 64)) & 1U;
    }
    const double s = flipped_sum([&](std::size_t i) { return signs[i]; });
    if (std::fabs(s) >= threshold) ++hits;
  }
  result.p_value = static_cast<double>(hits + 1) / static_cast<double>(n_resamples + 1);
  result.exact = false;
  result.n_resamples = n_resamples;
  return result;
}

SignificanceResult paired_significance(const std::map<PairKey, double>& a, const std::map<PairKey, double>& b,
                                       std::size_t n_resamples, std::uint64_t seed) {
  if (a.size() != b.size()) {
    throw Error(ErrorKind::LengthMismatch, "paired samples differ in size");
  }
  std::vector<double> xs;
  std::vector<double> ys;
  xs.reserve(a.size());
  ys.reserve(b.size());
  for (const auto& [key, value] : a) {
    const auto it = b.find(key);
    if (it == b.end()) {
      throw Error(ErrorKind::LengthMismatch, "no pair for target " + std::to_string(key.target_words) +
                                                 " attempt " + std::to_string(key.attempt));
    }
    xs.push_back(value);
    ys.push_back(it->second);
  }
  return paired_significance(xs, ys, n_resamples, seed);
}

}  // namespace lengthctl
