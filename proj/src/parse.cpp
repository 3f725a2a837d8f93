// Copyright 2026 The lengthctl Authors
// SPDX-License-Identifier: Apache-2.0

#include "lengthctl/parse.hpp"

#include <regex>

#include "lengthctl/error.hpp"
#include "lengthctl/utf8.hpp"

namespace lengthctl {

namespace {

using svmatch = std::match_results<std::string_view::const_iterator>;

constexpr auto k_flags = std::regex::ECMAScript | std::regex::icase;

const std::regex& final_open() {
  static const std::regex re(R"(<\s*final_answer\s*>)", k_flags);
  return re;
}
const std::regex& final_close() {
  static const std::regex re(R"(<\s*/\s*final_answer\s*>)", k_flags);
  return re;
}
const std::regex& thinking_open() {
  static const std::regex re(R"(<\s*thinking\s*>)", k_flags);
  return re;
}
const std::regex& thinking_close() {
  static const std::regex re(R"(<\s*/\s*thinking\s*>)", k_flags);
  return re;
}
const std::regex& any_tag() {
  static const std::regex re(R"(<\s*/?\s*(final_answer|thinking)\s*>)", k_flags);
  return re;
}
const std::regex& final_marker() {
  static const std::regex re(R"(final\s+\d+\s*-\s*word\s+document\s*:)", k_flags);
  return re;
}
const std::regex& scaffold_echo() {
  static const std::regex re(R"(\[\s*EXACTLY\s+\d+\s+WORDS\s+TOTAL\s*\])", k_flags);
  return re;
}

struct Span {
  std::size_t begin;
  std::size_t end;
};

std::optional<Span> search(std::string_view text, const std::regex& re, std::size_t from = 0) {
  svmatch m;
  if (!std::regex_search(text.begin() + static_cast<std::ptrdiff_t>(from), text.end(), m, re)) return std::nullopt;
  const auto begin = from + static_cast<std::size_t>(m.position(0));
  return Span{begin, begin + static_cast<std::size_t>(m.length(0))};
}

std::optional<Span> search_last(std::string_view text, const std::regex& re) {
  std::optional<Span> last;
  std::size_t from = 0;
  while (from <= text.size()) {
    const auto hit = search(text, re, from);
    if (!hit) break;
    last = hit;
    from = hit->end > hit->begin ? hit->end : hit->begin + 1;
  }
  return last;
}

// Deletes scaffold tags until none remain (removal can splice a new one).
std::string remove_tags(std::string_view text) {
  std::string out(text);
  while (true) {
    std::string next = std::regex_replace(out, any_tag(), "");
    if (next == out) break;
    out = std::move(next);
  }
  return std::string(utf8::trim(out));
}

}  // namespace

std::string_view to_string(ParseMethod method) noexcept {
  switch (method) {
    case ParseMethod::TagPair: return "TagPair";
    case ParseMethod::Marker: return "Marker";
    case ParseMethod::AfterThinking: return "AfterThinking";
    case ParseMethod::WholeText: return "WholeText";
  }
  return "WholeText";
}

std::optional<ParseMethod> parse_parse_method(std::string_view name) noexcept {
  for (auto m : {ParseMethod::TagPair, ParseMethod::Marker, ParseMethod::AfterThinking, ParseMethod::WholeText}) {
    if (to_string(m) == name) return m;
  }
  return std::nullopt;
}

ParsedResponse extract_final(std::string_view raw, Family family) {
  if (utf8::trim(raw).empty()) throw Error(ErrorKind::EmptyResponse, "model returned no text");

  ParsedResponse out;
  if (family == Family::Vanilla) {
    out.final_text = remove_tags(raw);
    if (out.final_text.empty()) throw Error(ErrorKind::EmptyResponse, "response holds only scaffold tags");
    out.method = ParseMethod::WholeText;
    return out;
  }

  const auto think_open = search(raw, thinking_open());
  if (think_open) {
    const auto think_close = search(raw, thinking_close(), think_open->end);
    const std::size_t end = think_close ? think_close->begin : raw.size();
    auto thinking = remove_tags(raw.substr(think_open->end, end - think_open->end));
    if (!thinking.empty()) out.thinking_text = std::move(thinking);
  }

  auto accept = [&](std::string_view candidate, ParseMethod method) {
    out.final_text = remove_tags(candidate);
    out.method = method;
    return !out.final_text.empty();
  };

  if (const auto open = search(raw, final_open())) {
    if (const auto close = search(raw, final_close(), open->end)) {
      if (accept(raw.substr(open->end, close->begin - open->end), ParseMethod::TagPair)) return out;
    } else {
      out.unclosed_tag = true;
      if (accept(raw.substr(open->end), ParseMethod::Marker)) return out;
      out.unclosed_tag = false;
    }
  }
  if (const auto marker = search_last(raw, final_marker())) {
    if (accept(raw.substr(marker->end), ParseMethod::Marker)) return out;
  }
  if (const auto close = search_last(raw, thinking_close())) {
    if (accept(raw.substr(close->end), ParseMethod::AfterThinking)) return out;
  }
  if (!think_open && accept(raw, ParseMethod::WholeText)) return out;

  throw Error(ErrorKind::ThinkingOnly, "no final answer outside the thinking block");
}

std::string strip_scaffold(std::string_view final_text) {
  std::string out;
  out.reserve(final_text.size());
  std::size_t pos = 0;
  while (pos <= final_text.size()) {
    std::size_t eol = final_text.find('\n', pos);
    const bool last = eol == std::string_view::npos;
    if (last) eol = final_text.size();
    const std::string_view line = final_text.substr(pos, eol - pos);
    if (std::regex_search(line.begin(), line.end(), scaffold_echo())) {
      const std::string cleaned = std::regex_replace(std::string(line), scaffold_echo(), "");
      if (!utf8::trim(cleaned).empty()) {
        out.append(cleaned);
        if (!last) out.push_back('\n');
      }
    } else {
      out.append(line);
      if (!last) out.push_back('\n');
    }
    if (last) break;
    pos = eol + 1;
  }
  return std::string(utf8::trim(out));
}

}  // namespace lengthctl
