// Copyright 2026 The lengthctl Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <atomic>
#include <filesystem>
#include <string>
#include <unistd.h>

#include "lengthctl/runner.hpp"
#include "lengthctl/store.hpp"

namespace lengthctl::testing {

inline std::filesystem::path data_dir() { return LENGTHCTL_TEST_DATA_DIR; }

/// A fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("lengthctl-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::string file(const std::string& name) const { return (path_ / name).string(); }

 private:
  std::filesystem::path path_;
};

inline SourceDocument sample_document() {
  SourceDocument doc;
  doc.path = "inline";
  doc.text =
      "Amazon had a strong year in 2023. Revenue grew 12% to $575 billion, operating income improved, "
      "and free cash flow rose. AWS, advertising and Prime Video contributed.";
  doc.char_count = doc.text.size();
  doc.word_count = 28;
  return doc;
}

/// A summarize plan over mock endpoints with no pacing.
inline ExperimentPlan mock_plan(std::vector<ModelEndpoint> endpoints, std::vector<VariantId> variants,
                                std::vector<int> targets, int attempts, std::string output_path) {
  ExperimentPlan plan;
  plan.endpoints = std::move(endpoints);
  for (auto id : variants) plan.variants.push_back(PromptVariant::builtin(id));
  plan.targets = std::move(targets);
  plan.attempts = attempts;
  plan.inter_attempt_delay_ms = 0;
  plan.document = sample_document();
  plan.output_path = std::move(output_path);
  return plan;
}

inline std::vector<VariantId> summary_variants() {
  return {VariantId::VanillaV1, VariantId::VanillaV2, VariantId::ThinkingV1, VariantId::ThinkingV2};
}

/// A successful record with consistent metrics, for report fixtures.
inline GenerationRecord synthetic_record(const std::string& endpoint, const std::string& variant, Family family,
                                         int target, int attempt, std::int64_t words) {
  GenerationRecord r;
  r.endpoint_id = endpoint;
  r.variant_id = variant;
  r.family = family;
  r.target_words = target;
  r.attempt_index = attempt;
  r.record_id = record_key(endpoint, variant, target, attempt);
  r.word_count = words;
  r.metrics = length_metrics(words, target);
  r.rules_version = "treebank-v2";
  return r;
}

}  // namespace lengthctl::testing
