// Copyright 2026 The lengthctl Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "lengthctl/client.hpp"
#include "lengthctl/ingest.hpp"
#include "lengthctl/prompt.hpp"
#include "lengthctl/store.hpp"

namespace lengthctl {

inline const std::vector<int> k_default_targets = {20, 50, 100, 200, 500, 1000, 2000, 5000};

/// The experiment grid: endpoints x variants x targets x attempts.
struct ExperimentPlan {
  std::vector<ModelEndpoint> endpoints;
  std::vector<PromptVariant> variants;
  std::vector<int> targets = k_default_targets;
  int attempts = 5;
  int inter_attempt_delay_ms = 1000;
  int concurrency_limit = 1;  // in-flight calls per endpoint
  TaskKind task_kind = TaskKind::Summarize;
  std::optional<SourceDocument> document;  // text source, counted and inlinable
  std::optional<Attachment> attachment;    // overrides the text document on the wire
  std::string output_path;
  std::uint64_t seed = 0;

  /// Throws Error(EmptyAxis) for an empty axis and Error(InvalidPlan) for
  /// duplicates, non-positive targets or variants of the wrong task kind.
  void validate() const;

  std::size_t cell_count() const noexcept {
    return endpoints.size() * variants.size() * targets.size() * static_cast<std::size_t>(attempts);
  }

  /// Hash over everything that determines which cells exist and what they
  /// ask: endpoints, variant templates, targets, attempts, task and document.
  /// Pacing and concurrency are excluded so a resume may change them.
  std::string fingerprint() const;
};

/// Parses a plan file. Relative paths resolve against `base_dir`.
ExperimentPlan plan_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir);
ExperimentPlan load_plan(const std::string& path);

struct Cell {
  std::size_t endpoint = 0;
  std::size_t variant = 0;
  int target_words = 0;
  int attempt = 0;
};

/// Cells in (endpoint, variant, target, attempt) order, following the plan's
/// axis order.
std::vector<Cell> expand(const ExperimentPlan& plan);

using ModelFactory = std::function<std::unique_ptr<Model>(const ModelEndpoint&)>;

struct RunOptions {
  ModelFactory factory;  // defaults to make_model
  bool durable = true;   // fsync after every record
};

struct RunSummary {
  std::size_t completed = 0;  // new successful records
  std::size_t failed = 0;     // new failed records
  std::size_t skipped = 0;    // cells already complete in the store (resume)
};

/// render -> generate -> extract -> strip -> count -> metrics for one cell.
/// Never throws for cell-level problems; they become a failed record.
GenerationRecord execute_cell(const ExperimentPlan& plan, const Cell& cell, const Model& model);

/// Runs every cell into a fresh store at plan.output_path.
RunSummary run(const ExperimentPlan& plan, const RunOptions& options = {});

/// Runs only the cells without a successful record in the existing store.
/// Failed records for retried cells are dropped so keys stay unique. Falls
/// back to `run` when the store does not exist yet.
/// Throws Error(PlanMismatch) when the store came from a different plan.
RunSummary resume(const ExperimentPlan& plan, const RunOptions& options = {});

StoreHeader make_header(const ExperimentPlan& plan);

}  // namespace lengthctl
