// Copyright 2026 The lengthctl Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include "lengthctl/error.hpp"
#include "lengthctl/parse.hpp"
#include "parse_fixtures.hpp"

namespace lengthctl {
namespace {

ErrorKind parse_error(std::string_view raw, Family family) {
  try {
    extract_final(raw, family);
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error for: " << raw;
  return ErrorKind::InvalidArgument;
}

TEST(Parse, TagPair) {
  const auto p = extract_final("<thinking>\n1 a\n2 b\n</thinking>\n<final_answer>\nHello world.\n</final_answer>",
                               Family::Thinking);
  EXPECT_EQ(p.final_text, "Hello world.");
  EXPECT_EQ(p.method, ParseMethod::TagPair);
  EXPECT_EQ(p.thinking_text, "1 a\n2 b");
  EXPECT_FALSE(p.unclosed_tag);
}

TEST(Parse, TagsAreCaseAndSpaceTolerant) {
  const auto p = extract_final("<THINKING>x</THINKING>< Final_Answer >Body text</ final_answer >", Family::Thinking);
  EXPECT_EQ(p.final_text, "Body text");
  EXPECT_EQ(p.method, ParseMethod::TagPair);
}

TEST(Parse, FirstTagPairWins) {
  const auto p = extract_final("<final_answer>one</final_answer> <final_answer>two</final_answer>", Family::Thinking);
  EXPECT_EQ(p.final_text, "one");
}

TEST(Parse, UnclosedTagTakesTheRest) {
  const auto p = extract_final("<thinking>1 a</thinking>\n<final_answer>\nThe answer here.", Family::Thinking);
  EXPECT_EQ(p.final_text, "The answer here.");
  EXPECT_EQ(p.method, ParseMethod::Marker);
  EXPECT_TRUE(p.unclosed_tag);
}

TEST(Parse, MarkerUsesLastOccurrence) {
  const auto p = extract_final(
      "<thinking>\nplan for the Final 20-word document: outline\n</thinking>\nFinal 20-word document:\nReal answer.",
      Family::Thinking);
  EXPECT_EQ(p.final_text, "Real answer.");
  EXPECT_EQ(p.method, ParseMethod::Marker);
}

TEST(Parse, AfterThinking) {
  const auto p = extract_final("<thinking>1 a\n2 b</thinking>\n\nJust the answer.", Family::Thinking);
  EXPECT_EQ(p.final_text, "Just the answer.");
  EXPECT_EQ(p.method, ParseMethod::AfterThinking);
}

TEST(Parse, WholeTextWithoutAnyScaffold) {
  const auto p = extract_final("A plain answer.", Family::Thinking);
  EXPECT_EQ(p.final_text, "A plain answer.");
  EXPECT_EQ(p.method, ParseMethod::WholeText);
}

TEST(Parse, VanillaTakesWholeTextMinusTags) {
  const auto p = extract_final("  <final_answer>Short summary.</final_answer>\n", Family::Vanilla);
  EXPECT_EQ(p.final_text, "Short summary.");
  EXPECT_EQ(p.method, ParseMethod::WholeText);
  EXPECT_FALSE(p.thinking_text.has_value());
}

TEST(Parse, Errors) {
  EXPECT_EQ(parse_error("", Family::Thinking), ErrorKind::EmptyResponse);
  EXPECT_EQ(parse_error(" \n\t", Family::Vanilla), ErrorKind::EmptyResponse);
  EXPECT_EQ(parse_error("<thinking>1 a\n2 b</thinking>", Family::Thinking), ErrorKind::ThinkingOnly);
  EXPECT_EQ(parse_error("<thinking>1 a\n2 b", Family::Thinking), ErrorKind::ThinkingOnly);
  EXPECT_EQ(parse_error("<final_answer></final_answer>", Family::Vanilla), ErrorKind::EmptyResponse);
}

TEST(Parse, EmptyTagPairFallsThrough) {
  const auto p = extract_final("<thinking>x</thinking>\n<final_answer> </final_answer>\nFinal 5-word document: a b c d e",
                               Family::Thinking);
  EXPECT_EQ(p.method, ParseMethod::Marker);
  EXPECT_EQ(p.final_text, "a b c d e");
}

TEST(Parse, NestedTagsAreRemoved) {
  const auto p = extract_final("<final_answer>one <fin<thinking>al_answer> two</final_answer>", Family::Thinking);
  EXPECT_EQ(p.method, ParseMethod::TagPair);
  EXPECT_FALSE(testing::leaks_scaffold_tag(p.final_text)) << p.final_text;
}

TEST(Parse, MethodNamesRoundTrip) {
  for (auto m : {ParseMethod::TagPair, ParseMethod::Marker, ParseMethod::AfterThinking, ParseMethod::WholeText}) {
    EXPECT_EQ(parse_parse_method(to_string(m)), m);
  }
  EXPECT_FALSE(parse_parse_method("Other").has_value());
}

TEST(StripScaffold, RemovesEchoLines) {
  EXPECT_EQ(strip_scaffold("Answer text.\n[EXACTLY 50 WORDS TOTAL]\n"), "Answer text.");
  EXPECT_EQ(strip_scaffold("Answer text. [exactly 50 words total]"), "Answer text.");
  EXPECT_EQ(strip_scaffold("Line one.\n\nLine two."), "Line one.\n\nLine two.");
  EXPECT_EQ(strip_scaffold("[EXACTLY 5 WORDS TOTAL]"), "");
}

TEST(ParseProperty, RandomizedFixturesPerFamily) {
  testing::ParseFixtureGenerator gen(2024);
  for (auto family : {Family::Thinking, Family::Vanilla}) {
    for (int i = 0; i < 200; ++i) {
      const auto f = gen.next(family);
      const auto p = extract_final(f.raw, family);
      const auto final_text = strip_scaffold(p.final_text);
      EXPECT_FALSE(final_text.empty()) << f.raw;
      EXPECT_EQ(p.method, f.expected_method) << f.raw;
      EXPECT_EQ(p.unclosed_tag, f.expect_unclosed) << f.raw;
      EXPECT_FALSE(testing::leaks_scaffold_tag(final_text)) << f.raw;
      EXPECT_EQ(final_text, f.answer) << f.raw;
    }
  }
}

}  // namespace
}  // namespace lengthctl
