// Copyright 2026 The lengthctl Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "lengthctl/client.hpp"
#include "lengthctl/store.hpp"

namespace lengthctl {

enum class Dimension { Correctness, Completeness, Faithfulness, Relevance };

inline constexpr std::array<Dimension, 4> k_dimensions = {Dimension::Correctness, Dimension::Completeness,
                                                          Dimension::Faithfulness, Dimension::Relevance};

/// "correctness", "completeness", ...
std::string_view to_string(Dimension dimension) noexcept;

/// Throws Error(UnknownDimension).
Dimension parse_dimension(std::string_view name);

/// The rubric sentence quoted in each judge prompt.
std::string_view definition(Dimension dimension) noexcept;

/// A single-dimension rubric prompt asking for {"score": x, "rationale": "..."}.
/// Throws Error(InvalidArgument) when the document or summary is blank.
std::string build_judge_prompt(Dimension dimension, std::string_view document, std::string_view summary);

/// Score from the first JSON object in `raw` that carries a numeric "score".
/// Throws Error(NoScoreFound), or Error(ScoreOutOfRange) outside [0, 1].
double parse_judge_response(std::string_view raw);

struct DimensionScore {
  std::optional<double> score;  // empty when the call or the parse failed
  std::string raw;
  std::string error_class;
  std::string error_message;
};

struct QualityScores {
  std::string record_id;
  std::string judge_model_id;
  std::array<DimensionScore, 4> dimensions;  // indexed like k_dimensions

  const DimensionScore& at(Dimension d) const { return dimensions[static_cast<std::size_t>(d)]; }
  DimensionScore& at(Dimension d) { return dimensions[static_cast<std::size_t>(d)]; }
  bool complete() const noexcept;
};

/// Judge temperature used when the endpoint sets none.
inline constexpr double k_judge_temperature = 0.0;

/// One judge call per dimension. A failing dimension is recorded and the
/// remaining ones still run. Throws Error(InvalidArgument) for a record
/// without final text.
QualityScores evaluate_quality(const GenerationRecord& record, std::string_view document, const Model& judge);

/// Scores every successful record of `store`, `concurrency` records at a time.
/// Records already present in `skip` are left out.
std::vector<QualityScores> judge_store(const RecordStore& store, std::string_view document, const Model& judge,
                                       int concurrency = 1, const std::vector<std::string>& skip = {});

nlohmann::json scores_to_json(const QualityScores& scores);
QualityScores scores_from_json(const nlohmann::json& j);

/// Scores file: one JSON object per line, keyed by record_id. A torn final
/// line is ignored.
std::vector<QualityScores> read_scores(const std::string& path);
void append_scores(const std::string& path, const std::vector<QualityScores>& scores);

}  // namespace lengthctl
