// Copyright 2026 The lengthctl Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "lengthctl/error.hpp"
#include "lengthctl/report.hpp"
#include "lengthctl/runner.hpp"
#include "test_support.hpp"

namespace lengthctl {
namespace {

using testing::synthetic_record;

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

// One endpoint whose best thinking MAPD is 0.088 and best vanilla 0.141, as
// two attempts at a 1000-word target each.
RecordStore improvement_store() {
  RecordStore s;
  s.header.settings = {{"endpoints", {"gpt"}},
                       {"variants", {"vanilla-v1", "vanilla-v2", "thinking-v1", "thinking-v2"}}};
  const auto add = [&](const char* v, Family f, std::int64_t a, std::int64_t b) {
    s.records.push_back(synthetic_record("gpt", v, f, 1000, 0, a));
    s.records.push_back(synthetic_record("gpt", v, f, 1000, 1, b));
  };
  add("vanilla-v1", Family::Vanilla, 1100, 1182);   // 0.100, 0.182 -> 0.141
  add("vanilla-v2", Family::Vanilla, 1200, 700);    // 0.200, 0.300 -> 0.250
  add("thinking-v1", Family::Thinking, 1050, 874);  // 0.050, 0.126 -> 0.088
  add("thinking-v2", Family::Thinking, 900, 1300);  // 0.100, 0.300 -> 0.200
  return s;
}

TEST(MapdTable, PicksTheLowestMeanPerRow) {
  const auto store = improvement_store();
  const auto table = mapd_table(store);
  ASSERT_EQ(table.rows, std::vector<std::string>{"gpt"});
  ASSERT_EQ(table.columns.size(), 4u);
  EXPECT_EQ(table.best_columns(0), std::vector<std::string>{"thinking-v1"});
  EXPECT_NEAR(table.at(0, 0)->stats.mean, 0.141, 1e-12);
  EXPECT_NEAR(table.at(0, 0)->stats.std, 0.041, 1e-12);
  EXPECT_NEAR(table.at(0, 2)->stats.mean, 0.088, 1e-12);

  const auto md = to_markdown(table);
  EXPECT_NE(md.find("| Model | Vanilla V1 | Vanilla V2 | Thinking V1 | Thinking V2 | Best |"), std::string::npos) << md;
  EXPECT_NE(md.find("| gpt | 0.141 ± 0.041 | 0.250 ± 0.050 | **0.088 ± 0.038** | 0.200 ± 0.100 | Thinking V1 |"),
            std::string::npos)
      << md;

  const auto imp = improvement_summary(store);
  ASSERT_EQ(imp.size(), 1u);
  EXPECT_EQ(imp[0].best_vanilla, "vanilla-v1");
  EXPECT_EQ(imp[0].best_thinking, "thinking-v1");
  EXPECT_NEAR(imp[0].improvement_pct, 100.0 * (0.141 - 0.088) / 0.141, 1e-9);
  EXPECT_EQ(format_improvements(imp), "gpt: best Thinking V1 0.088 vs best Vanilla V1 0.141, 37.6% improvement\n");
  EXPECT_EQ(format_best_summary(table, imp),
            "gpt: best Thinking V1 (MAPD 0.088)\n"
            "gpt: best Thinking V1 0.088 vs best Vanilla V1 0.141, 37.6% improvement\n");
}

TEST(MapdTable, HalvingIsFiftyPercent) {
  RecordStore s;
  s.records.push_back(synthetic_record("m", "vanilla-v1", Family::Vanilla, 100, 0, 120));
  s.records.push_back(synthetic_record("m", "thinking-v1", Family::Thinking, 100, 0, 90));
  const auto imp = improvement_summary(s);
  ASSERT_EQ(imp.size(), 1u);
  EXPECT_NEAR(imp[0].improvement_pct, 50.0, 1e-9);
}

TEST(MapdTable, ExactMockTiesEverywhere) {
  testing::TempDir dir;
  const auto plan = testing::mock_plan({mock_model({}, "exact")}, testing::summary_variants(), {20, 50}, 2,
                                       dir.file("s.jsonl"));
  RunOptions o;
  o.durable = false;
  run(plan, o);
  const auto table = mapd_table(read_store(plan.output_path));
  EXPECT_EQ(table.best_columns(0).size(), 4u);
  EXPECT_NE(to_markdown(table).find("**0.000 ± 0.000**"), std::string::npos);
  EXPECT_TRUE(improvement_summary(read_store(plan.output_path)).empty());
}

TEST(MapdTable, EmptyCellsAndErrors) {
  RecordStore s;
  s.header.settings = {{"endpoints", {"a", "b"}}, {"variants", {"vanilla-v1", "thinking-v1"}}};
  s.records.push_back(synthetic_record("a", "vanilla-v1", Family::Vanilla, 20, 0, 20));
  auto failed = synthetic_record("b", "thinking-v1", Family::Thinking, 20, 0, 0);
  failed.status = RecordStatus::Failed;
  s.records.push_back(failed);
  const auto table = mapd_table(s);
  EXPECT_EQ(table.rows, (std::vector<std::string>{"a", "b"}));
  EXPECT_FALSE(table.at(0, 1).has_value());
  EXPECT_FALSE(table.at(1, 1).has_value());
  const auto md = to_markdown(table);
  EXPECT_NE(md.find("| a | **0.000 ± 0.000** | n/a | Vanilla V1 |"), std::string::npos) << md;
  EXPECT_NE(md.find("| b | n/a | n/a |  |"), std::string::npos) << md;
  EXPECT_NE(to_csv(table).find("b,thinking-v1,,,0,0\n"), std::string::npos);
  EXPECT_EQ(format_best_summary(table, {}), "a: best Vanilla V1 (MAPD 0.000)\nb: no successful records\n");

  RecordStore only_failed;
  only_failed.records.push_back(failed);
  EXPECT_EQ(kind_of([&] { mapd_table(only_failed); }), ErrorKind::EmptyStore);
}

TEST(MapdTable, SampleStdOnRequest) {
  const auto store = improvement_store();
  const auto pop = mapd_table(store, StdKind::Population);
  const auto sample = mapd_table(store, StdKind::Sample);
  EXPECT_NEAR(sample.at(0, 0)->stats.std, pop.at(0, 0)->stats.std * std::sqrt(2.0), 1e-12);
  EXPECT_NE(sample.caption, pop.caption);
}

TEST(Fidelity, ClassifiesRatios) {
  RecordStore s;
  s.records.push_back(synthetic_record("m", "vanilla-v1", Family::Vanilla, 20, 0, 26));
  s.records.push_back(synthetic_record("m", "vanilla-v1", Family::Vanilla, 20, 1, 20));
  s.records.push_back(synthetic_record("m", "vanilla-v1", Family::Vanilla, 50, 0, 46));
  const auto points = fidelity_points(s);
  ASSERT_EQ(points.size(), 3u);
  EXPECT_DOUBLE_EQ(points[0].ratio, 1.3);
  EXPECT_EQ(points[0].deviation, Deviation::Over);
  EXPECT_EQ(points[1].deviation, Deviation::Exact);
  EXPECT_EQ(points[2].deviation, Deviation::Under);

  const auto overlay = fidelity_overlay(points);
  ASSERT_EQ(overlay.size(), 2u);
  EXPECT_EQ(overlay[0].target_words, 20);
  EXPECT_DOUBLE_EQ(overlay[0].ratio.mean, 1.15);
  EXPECT_EQ(overlay[0].ratio.n, 2u);
}

TEST(Fidelity, VerboseMockTriplesEveryTarget) {
  testing::TempDir dir;
  MockSettings verbose;
  verbose.mode = MockMode::Verbose;
  const auto plan = testing::mock_plan({mock_model(verbose, "verbose")}, {VariantId::VanillaV1, VariantId::ThinkingV1},
                                       {20, 100}, 1, dir.file("s.jsonl"));
  RunOptions o;
  o.durable = false;
  run(plan, o);
  for (const auto& p : fidelity_points(read_store(plan.output_path))) {
    EXPECT_DOUBLE_EQ(p.ratio, 3.0);
    EXPECT_EQ(p.deviation, Deviation::Over);
  }
}

TEST(Fidelity, CsvRoundTripIsExact) {
  RecordStore s;
  std::mt19937_64 rng(5);
  for (int a = 0; a < 40; ++a) {
    const int target = 7 + static_cast<int>(rng() % 500);
    s.records.push_back(synthetic_record("m,1", "vanilla-v1", Family::Vanilla, target, a,
                                         static_cast<std::int64_t>(rng() % 900)));
  }
  const auto points = fidelity_points(s);
  const auto back = read_fidelity_csv(to_csv(points));
  ASSERT_EQ(back.size(), points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    EXPECT_EQ(back[i].endpoint_id, "m,1");
    EXPECT_EQ(back[i].ratio, points[i].ratio);
    EXPECT_EQ(back[i].deviation, points[i].deviation);
    EXPECT_EQ(back[i].target_words, points[i].target_words);
  }
  EXPECT_THROW(read_fidelity_csv("endpoint,variant,target,attempt,ratio,class\nm,v,20,0,1.5,under\n"), Error);
  EXPECT_THROW(read_fidelity_csv("header\nm,v,20\n"), Error);
}

TEST(Cost, RatiosAndFormatting) {
  const auto t = make_cost_table({7888.0, 1002.4, 10}, {8046.0, 1573.8, 10});
  EXPECT_DOUBLE_EQ(t.token_ratio, 1.02);
  EXPECT_DOUBLE_EQ(t.latency_ratio, 1.57);
  const auto md = to_markdown(t);
  EXPECT_NE(md.find("| Vanilla | 7,888 | 1,002.4 ms |"), std::string::npos) << md;
  EXPECT_NE(md.find("| Thinking | 8,046 (1.02×) | 1,573.8 ms (1.57×) |"), std::string::npos) << md;
  EXPECT_DOUBLE_EQ(round2(1.005000001), 1.01);
  EXPECT_DOUBLE_EQ(round2(-2.345000001), -2.35);
}

TEST(Cost, FromStoreAndMissingFamily) {
  RecordStore s;
  auto v = synthetic_record("m", "vanilla-v1", Family::Vanilla, 20, 0, 20);
  v.input_tokens = 100;
  v.output_tokens = 50;
  v.latency_ms = 10.0;
  s.records.push_back(v);
  EXPECT_EQ(kind_of([&] { cost_table(s); }), ErrorKind::MissingFamily);
  auto t = synthetic_record("m", "thinking-v1", Family::Thinking, 20, 0, 20);
  t.input_tokens = 200;
  t.output_tokens = 100;
  t.latency_ms = 25.0;
  t.tokens_estimated = true;
  s.records.push_back(t);
  const auto table = cost_table(s);
  EXPECT_DOUBLE_EQ(table.token_ratio, 2.0);
  EXPECT_DOUBLE_EQ(table.latency_ratio, 2.5);
  EXPECT_TRUE(table.tokens_estimated);
  EXPECT_NE(to_markdown(table).find("estimated"), std::string::npos);
}

TEST(Significance, PairsEveryVariantCombination) {
  const auto rows = significance_tests(improvement_store(), 1000, 3);
  ASSERT_EQ(rows.size(), 6u);
  EXPECT_EQ(rows[0].variant_a, "vanilla-v1");
  EXPECT_EQ(rows[0].variant_b, "vanilla-v2");
  EXPECT_EQ(rows[0].result.n_pairs, 2u);
  EXPECT_TRUE(rows[0].result.exact);
  const auto csv = to_csv(rows);
  EXPECT_EQ(csv.rfind("endpoint,variant_a,variant_b,n_pairs,mean_diff,p_value,exact,resamples,seed\n", 0), 0u);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 7);
}

TEST(Determinism, ArtifactsAreByteIdentical) {
  const auto store = improvement_store();
  const auto render_all = [](const RecordStore& s) {
    const auto table = mapd_table(s);
    return to_markdown(table) + to_csv(table) + to_csv(fidelity_points(s)) +
           to_csv(fidelity_overlay(fidelity_points(s))) + to_csv(significance_tests(s, 500, 1)) + to_jsonl(s);
  };
  EXPECT_EQ(render_all(store), render_all(store));

  // Record order does not change the ordered artifacts.
  auto shuffled = store;
  std::mt19937_64 rng(17);
  std::shuffle(shuffled.records.begin(), shuffled.records.end(), rng);
  EXPECT_EQ(to_markdown(mapd_table(shuffled)), to_markdown(mapd_table(store)));
  EXPECT_EQ(to_csv(fidelity_points(shuffled)), to_csv(fidelity_points(store)));
}

TEST(Pooling, UnionOfStoresAggregatesTogether) {
  RecordStore a;
  a.records.push_back(synthetic_record("m", "vanilla-v1", Family::Vanilla, 100, 0, 110));
  a.records.push_back(synthetic_record("m", "vanilla-v1", Family::Vanilla, 100, 1, 130));
  RecordStore b;
  b.records.push_back(synthetic_record("m", "vanilla-v1", Family::Vanilla, 200, 0, 180));
  RecordStore both = a;
  both.records.insert(both.records.end(), b.records.begin(), b.records.end());
  const auto cell = mapd_table(both).at(0, 0);
  ASSERT_TRUE(cell.has_value());
  EXPECT_EQ(cell->stats.n, 3u);
  EXPECT_NEAR(cell->stats.mean, (0.1 + 0.3 + 0.1) / 3.0, 1e-12);
}

TEST(Labels, VariantAndAxisOrder) {
  EXPECT_EQ(variant_label("thinking-v2"), "Thinking V2");
  EXPECT_EQ(variant_label("my-custom"), "my-custom");
  RecordStore s;
  s.header.settings = {{"endpoints", {"z", "a"}}, {"variants", {"thinking-v1"}}};
  s.records.push_back(synthetic_record("a", "vanilla-v1", Family::Vanilla, 20, 0, 20));
  s.records.push_back(synthetic_record("q", "thinking-v1", Family::Thinking, 20, 0, 20));
  EXPECT_EQ(endpoint_order(s), (std::vector<std::string>{"z", "a", "q"}));
  EXPECT_EQ(variant_order(s), (std::vector<std::string>{"thinking-v1", "vanilla-v1"}));
}

}  // namespace
}  // namespace lengthctl
