// Copyright 2026 The lengthctl Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "lengthctl/prompt.hpp"

namespace lengthctl {

enum class ParseMethod { TagPair, Marker, AfterThinking, WholeText };

std::string_view to_string(ParseMethod method) noexcept;
std::optional<ParseMethod> parse_parse_method(std::string_view name) noexcept;

struct ParsedResponse {
  std::string final_text;
  std::optional<std::string> thinking_text;
  ParseMethod method = ParseMethod::WholeText;
  /// An opening <final_answer> without its closing tag; everything after the
  /// opening tag was taken (reported as Marker).
  bool unclosed_tag = false;
};

/// Pulls the scored answer out of a raw model response.
///
/// Vanilla: the trimmed whole response.
/// Thinking, first rule that yields non-empty text wins:
///   1. <final_answer> ... </final_answer> (first pair)          -> TagPair
///   2. <final_answer> with no closing tag, rest of the response -> Marker
///   3. text after the last "Final N-word document:" line        -> Marker
///   4. text after the last </thinking>                          -> AfterThinking
///   5. the whole response, if it has no <thinking> block        -> WholeText
/// Tags match case-insensitively and may carry inner whitespace
/// ("< final_answer >"). Stray tags are removed from the result.
///
/// Throws Error(EmptyResponse) for blank input and Error(ThinkingOnly) when a
/// thinking block is present but nothing else can be extracted.
ParsedResponse extract_final(std::string_view raw, Family family);

/// Removes echoed "[EXACTLY <n> WORDS TOTAL]" lines and outer whitespace.
std::string strip_scaffold(std::string_view final_text);

}  // namespace lengthctl
