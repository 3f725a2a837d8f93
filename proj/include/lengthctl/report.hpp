// Copyright 2026 The lengthctl Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lengthctl/judge.hpp"
#include "lengthctl/metrics.hpp"
#include "lengthctl/store.hpp"

namespace lengthctl {

/// Report label for a variant id: the built-in display name ("Thinking V1")
/// or the id itself for custom variants.
std::string variant_label(std::string_view variant_id);

/// Endpoint and variant ids in report order: the order the store header lists
/// them in, then any others in order of first appearance.
std::vector<std::string> endpoint_order(const RecordStore& store);
std::vector<std::string> variant_order(const RecordStore& store);

struct ReportCell {
  AggregateStats stats;
  bool best = false;
};

/// Rows are endpoints, columns variants. A missing combination is an empty
/// cell. Within a row every cell whose mean equals the row minimum is best.
struct ReportTable {
  std::string caption;
  std::vector<std::string> rows;
  std::vector<std::string> columns;
  std::vector<std::vector<std::optional<ReportCell>>> cells;
  StdKind std_kind = StdKind::Population;

  const std::optional<ReportCell>& at(std::size_t row, std::size_t column) const { return cells[row][column]; }
  std::vector<std::string> best_columns(std::size_t row) const;
};

/// MAPD (mean apd +- std over attempts) per endpoint and variant, successful
/// records only. Throws Error(EmptyStore) when there are none.
ReportTable mapd_table(const RecordStore& store, StdKind kind = StdKind::Population);

/// "| Model | Vanilla V1 | ... | Best |" with "0.088 ± 0.079" cells, the best
/// ones in bold, and "n/a" for empty cells.
std::string to_markdown(const ReportTable& table);

/// Long format: endpoint,variant,mean,std,n,best.
std::string to_csv(const ReportTable& table);

/// Best thinking-family variant against the best vanilla-family variant of
/// one endpoint.
struct Improvement {
  std::string endpoint_id;
  std::string best_vanilla;
  double vanilla_mapd = 0.0;
  std::string best_thinking;
  double thinking_mapd = 0.0;
  double improvement_pct = 0.0;  // relative_improvement(thinking, vanilla)
};

/// One entry per endpoint that has both families. Throws Error(EmptyStore).
std::vector<Improvement> improvement_summary(const RecordStore& store, StdKind kind = StdKind::Population);

/// "ep: best Thinking V1 0.088 vs best Vanilla V1 0.141, 37.6% improvement".
std::string format_improvements(const std::vector<Improvement>& improvements);

/// Best variant per endpoint plus the improvement lines, as printed by analyze.
std::string format_best_summary(const ReportTable& table, const std::vector<Improvement>& improvements);

enum class Deviation { Over, Under, Exact };

std::string_view to_string(Deviation d) noexcept;

/// Over when ratio > 1, Under when ratio < 1.
Deviation classify_ratio(double ratio) noexcept;

struct FidelityPoint {
  std::string endpoint_id;
  std::string variant_id;
  int target_words = 0;
  int attempt_index = 0;
  double ratio = 0.0;
  Deviation deviation = Deviation::Exact;
};

/// One point per successful record, in (endpoint, variant, target, attempt)
/// report order. Throws Error(EmptyStore).
std::vector<FidelityPoint> fidelity_points(const RecordStore& store);

struct OverlayRow {
  std::string endpoint_id;
  int target_words = 0;
  AggregateStats ratio;
};

/// Mean and std of the ratio per (endpoint, target).
std::vector<OverlayRow> fidelity_overlay(const std::vector<FidelityPoint>& points, StdKind kind = StdKind::Population);

/// Header "endpoint,variant,target,attempt,ratio,class"; ratios use %.17g so
/// reading the file back reproduces them exactly.
std::string to_csv(const std::vector<FidelityPoint>& points);
std::vector<FidelityPoint> read_fidelity_csv(std::string_view csv);

/// Header "endpoint,target,mean,std,n".
std::string to_csv(const std::vector<OverlayRow>& overlay);

struct FamilyCost {
  double avg_tokens = 0.0;      // input + output per record
  double avg_latency_ms = 0.0;  // per record
  std::size_t n = 0;
};

struct CostTable {
  FamilyCost vanilla;
  FamilyCost thinking;
  double token_ratio = 0.0;    // thinking / vanilla, rounded to 2 decimals
  double latency_ratio = 0.0;  // thinking / vanilla, rounded to 2 decimals
  bool tokens_estimated = false;
};

/// Rounds half away from zero to two decimals.
double round2(double value) noexcept;

/// Builds the table from family averages.
CostTable make_cost_table(const FamilyCost& vanilla, const FamilyCost& thinking);

/// Per-family averages over successful records. Throws Error(MissingFamily)
/// when either family has no records.
CostTable cost_table(const RecordStore& store);

/// "| Thinking | 8,046 (1.02×) | 1,573.8 ms (1.57×) |" layout.
std::string to_markdown(const CostTable& table);

/// Significance of the apd difference between two variants of one endpoint,
/// paired by (target, attempt).
struct SignificanceRow {
  std::string endpoint_id;
  std::string variant_a;
  std::string variant_b;
  SignificanceResult result;
};

/// Every variant pair of every endpoint with at least two common pairs.
std::vector<SignificanceRow> significance_tests(const RecordStore& store, std::size_t n_resamples = 10000,
                                                std::uint64_t seed = 0);

/// Header "endpoint,variant_a,variant_b,n_pairs,mean_diff,p_value,exact,resamples,seed".
std::string to_csv(const std::vector<SignificanceRow>& rows);

/// Mean judge score per variant and dimension.
struct QualityRow {
  std::string variant_id;
  std::array<std::optional<double>, 4> means;  // indexed like k_dimensions
  std::array<std::size_t, 4> counts{};
};

/// Joins scores to records by record_id. Scores for unknown records are
/// ignored; missing dimension scores are left out of that mean.
std::vector<QualityRow> quality_table(const RecordStore& store, const std::vector<QualityScores>& scores);

/// Columns follow the published layout: Correctness, Faithfulness,
/// Completeness, Relevance; best per column in bold.
std::string to_markdown(const std::vector<QualityRow>& rows);
std::string to_csv(const std::vector<QualityRow>& rows);

/// One record per line in the store schema.
std::string to_jsonl(const RecordStore& store);

}  // namespace lengthctl
