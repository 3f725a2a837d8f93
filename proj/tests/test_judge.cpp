// Copyright 2026 The lengthctl Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <atomic>
#include <fstream>
#include <mutex>

#include "lengthctl/error.hpp"
#include "lengthctl/judge.hpp"
#include "lengthctl/report.hpp"
#include "test_support.hpp"

namespace lengthctl {
namespace {

template <class F>
ErrorKind kind_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no Error thrown";
  return ErrorKind::InvalidArgument;
}

// Scores each prompt by looking up its dimension; counts calls and records
// the temperature it was asked for.
class ScriptedJudge final : public Model {
 public:
  explicit ScriptedJudge(std::map<std::string, std::string> replies) : replies_(std::move(replies)) {
    endpoint_.id = "scripted-judge";
  }

  const ModelEndpoint& endpoint() const noexcept override { return endpoint_; }

  ModelResponse generate(const GenerateRequest& request) const override {
    ++calls_;
    {
      std::lock_guard lock(mutex_);
      temperatures_.push_back(request.temperature);
    }
    for (const auto& [needle, reply] : replies_) {
      if (request.prompt.find(needle) != std::string::npos) return ModelResponse{reply};
    }
    return ModelResponse{R"({"score": 0.5, "rationale": "default"})"};
  }

  int calls() const { return calls_; }
  std::vector<std::optional<double>> temperatures() const {
    std::lock_guard lock(mutex_);
    return temperatures_;
  }

 private:
  ModelEndpoint endpoint_;
  std::map<std::string, std::string> replies_;
  mutable std::atomic<int> calls_{0};
  mutable std::mutex mutex_;
  mutable std::vector<std::optional<double>> temperatures_;
};

GenerationRecord judged_record(const std::string& variant, int attempt, const std::string& text) {
  auto family = variant.starts_with("thinking") ? Family::Thinking : Family::Vanilla;
  auto r = testing::synthetic_record("gpt", variant, family, 20, attempt, 3);
  r.final_text = text;
  return r;
}

TEST(JudgePrompt, QuotesTheDefinitionAndBothTexts) {
  for (auto d : k_dimensions) {
    const auto p = build_judge_prompt(d, "The source text.", "A summary.");
    EXPECT_NE(p.find("Definition: " + std::string(definition(d))), std::string::npos);
    EXPECT_NE(p.find("<source_document>\nThe source text.\n</source_document>"), std::string::npos);
    EXPECT_NE(p.find("<summary>\nA summary.\n</summary>"), std::string::npos);
    EXPECT_NE(p.find(R"({"score": <number between 0 and 1>)"), std::string::npos);
  }
  EXPECT_NE(definition(Dimension::Faithfulness).find("without introducing facts or claims"), std::string::npos);
  EXPECT_EQ(kind_of([] { build_judge_prompt(Dimension::Relevance, " ", "x"); }), ErrorKind::InvalidArgument);
  EXPECT_EQ(kind_of([] { build_judge_prompt(Dimension::Relevance, "x", "\n"); }), ErrorKind::InvalidArgument);
}

TEST(JudgeDimensions, NamesRoundTrip) {
  for (auto d : k_dimensions) EXPECT_EQ(parse_dimension(to_string(d)), d);
  EXPECT_EQ(parse_dimension("Faithfulness"), Dimension::Faithfulness);
  EXPECT_EQ(kind_of([] { parse_dimension("fluency"); }), ErrorKind::UnknownDimension);
}

TEST(JudgeParse, ScoreExtraction) {
  EXPECT_DOUBLE_EQ(parse_judge_response(R"({"score": 0.82, "rationale": "..."})"), 0.82);
  EXPECT_DOUBLE_EQ(parse_judge_response("Here you go:\n```json\n{\"score\": 0.7, \"rationale\": \"a {brace}\"}\n```"),
                   0.7);
  EXPECT_DOUBLE_EQ(parse_judge_response(R"({"note": "x"} then {"score": 1})"), 1.0);
  EXPECT_DOUBLE_EQ(parse_judge_response(R"({"score": 0})"), 0.0);
  EXPECT_EQ(kind_of([] { parse_judge_response("I would rate it highly."); }), ErrorKind::NoScoreFound);
  EXPECT_EQ(kind_of([] { parse_judge_response(R"({"score": "high"})"); }), ErrorKind::NoScoreFound);
  EXPECT_EQ(kind_of([] { parse_judge_response(R"({"score": 8})"); }), ErrorKind::ScoreOutOfRange);
  EXPECT_EQ(kind_of([] { parse_judge_response(R"({"score": -0.1})"); }), ErrorKind::ScoreOutOfRange);
}

TEST(JudgeEvaluate, OneCallPerDimensionAtZeroTemperature) {
  ScriptedJudge judge({{"Dimension: Correctness", R"({"score": 0.9})"},
                       {"Dimension: Completeness", R"({"score": 0.6})"},
                       {"Dimension: Faithfulness", R"({"score": 1.0})"},
                       {"Dimension: Relevance", R"({"score": 0.8})"}});
  const auto s = evaluate_quality(judged_record("thinking-v1", 0, "A short summary."), "Source.", judge);
  EXPECT_EQ(judge.calls(), 4);
  EXPECT_TRUE(s.complete());
  EXPECT_EQ(s.judge_model_id, "scripted-judge");
  EXPECT_DOUBLE_EQ(*s.at(Dimension::Completeness).score, 0.6);
  EXPECT_DOUBLE_EQ(*s.at(Dimension::Faithfulness).score, 1.0);
  for (const auto& t : judge.temperatures()) EXPECT_EQ(t, 0.0);
}

TEST(JudgeEvaluate, MalformedDimensionIsRecordedOthersContinue) {
  ScriptedJudge judge(std::map<std::string, std::string>{{"Dimension: Completeness", "Looks complete to me."}});
  const auto s = evaluate_quality(judged_record("vanilla-v1", 0, "Summary."), "Source.", judge);
  EXPECT_EQ(judge.calls(), 4);
  EXPECT_FALSE(s.complete());
  EXPECT_FALSE(s.at(Dimension::Completeness).score.has_value());
  EXPECT_EQ(s.at(Dimension::Completeness).error_class, "NoScoreFound");
  EXPECT_EQ(s.at(Dimension::Completeness).raw, "Looks complete to me.");
  EXPECT_DOUBLE_EQ(*s.at(Dimension::Relevance).score, 0.5);
  EXPECT_EQ(kind_of([&] { evaluate_quality(judged_record("vanilla-v1", 1, ""), "Source.", judge); }),
            ErrorKind::InvalidArgument);
}

TEST(JudgeStore, ScoresOkRecordsAndHonoursSkip) {
  RecordStore store;
  store.records.push_back(judged_record("vanilla-v1", 0, "One."));
  store.records.push_back(judged_record("vanilla-v1", 1, "Two."));
  auto failed = judged_record("vanilla-v1", 2, "");
  failed.status = RecordStatus::Failed;
  store.records.push_back(failed);
  store.records.push_back(judged_record("thinking-v1", 0, "Three."));
  ScriptedJudge judge(std::map<std::string, std::string>{});
  const auto scores = judge_store(store, "Source.", judge, 3, {store.records[1].record_id});
  ASSERT_EQ(scores.size(), 2u);
  EXPECT_EQ(scores[0].record_id, store.records[0].record_id);
  EXPECT_EQ(scores[1].record_id, store.records[3].record_id);
  EXPECT_EQ(judge.calls(), 8);
}

TEST(JudgeScores, JsonAndFileRoundTrip) {
  QualityScores s;
  s.record_id = "gpt|thinking-v1|20|0";
  s.judge_model_id = "judge";
  s.at(Dimension::Correctness).score = 0.25;
  s.at(Dimension::Correctness).raw = R"({"score":0.25})";
  s.at(Dimension::Relevance).error_class = "Timeout";
  s.at(Dimension::Relevance).error_message = "slow";
  const auto back = scores_from_json(scores_to_json(s));
  EXPECT_EQ(scores_to_json(back), scores_to_json(s));
  EXPECT_EQ(back.at(Dimension::Relevance).error_class, "Timeout");

  testing::TempDir dir;
  const auto path = dir.file("scores.jsonl");
  append_scores(path, {s});
  append_scores(path, {s});
  {
    std::ofstream out(path, std::ios::app);
    out << R"({"record_id": "torn)";
  }
  EXPECT_EQ(read_scores(path).size(), 2u);
}

TEST(QualityTable, MeansMatchHandComputation) {
  RecordStore store;
  store.records.push_back(judged_record("vanilla-v1", 0, "a"));
  store.records.push_back(judged_record("vanilla-v1", 1, "b"));
  store.records.push_back(judged_record("thinking-v1", 0, "c"));
  const auto make = [](const GenerationRecord& r, std::array<std::optional<double>, 4> v) {
    QualityScores s;
    s.record_id = r.record_id;
    for (std::size_t i = 0; i < 4; ++i) s.dimensions[i].score = v[i];
    return s;
  };
  // Index order: correctness, completeness, faithfulness, relevance.
  const std::vector<QualityScores> scores = {
      make(store.records[0], {0.8, 0.5, 1.0, 0.7}),
      make(store.records[1], {0.6, std::nullopt, 0.9, 0.9}),
      make(store.records[2], {0.9, 0.7, 0.95, 0.8}),
      make(judged_record("vanilla-v2", 0, "x"), {0.0, 0.0, 0.0, 0.0}),  // not in the store
  };
  const auto rows = quality_table(store, scores);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0].variant_id, "vanilla-v1");
  EXPECT_DOUBLE_EQ(*rows[0].means[0], 0.7);
  EXPECT_DOUBLE_EQ(*rows[0].means[1], 0.5);
  EXPECT_EQ(rows[0].counts[1], 1u);
  EXPECT_DOUBLE_EQ(*rows[0].means[2], 0.95);
  EXPECT_DOUBLE_EQ(*rows[0].means[3], 0.8);
  EXPECT_EQ(rows[1].variant_id, "thinking-v1");
  EXPECT_DOUBLE_EQ(*rows[1].means[1], 0.7);

  const auto md = to_markdown(rows);
  EXPECT_NE(md.find("| Prompting Strategy | Correctness | Faithfulness | Completeness | Relevance |"), std::string::npos) << md;
  EXPECT_NE(md.find("| Vanilla V1 | 0.70 | **0.95** | 0.50 | **0.80** |"), std::string::npos) << md;
  EXPECT_NE(md.find("| Thinking V1 | **0.90** | **0.95** | **0.70** | **0.80** |"), std::string::npos) << md;
}

}  // namespace
}  // namespace lengthctl
