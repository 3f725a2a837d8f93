// Copyright 2026 The lengthctl Authors
// SPDX-License-Identifier: Apache-2.0

#include "lengthctl/wordcount.hpp"

#include <unicode/uchar.h>
#include <unicode/utf8.h>

#include <algorithm>
#include <cstdint>
#include <span>

namespace lengthctl::wordcount {

namespace {

struct CodePoint {
  UChar32 c;
  std::size_t begin;  // byte offsets into the source text
  std::size_t end;
};

std::vector<CodePoint> decode(std::string_view text) {
  std::vector<CodePoint> cps;
  cps.reserve(text.size());
  const auto* s = reinterpret_cast<const std::uint8_t*>(text.data());
  const auto length = static_cast<std::int32_t>(text.size());
  std::int32_t i = 0;
  while (i < length) {
    const std::int32_t start = i;
    UChar32 c = 0;
    U8_NEXT(s, i, length, c);
    if (c < 0) c = 0xFFFD;
    cps.push_back({c, static_cast<std::size_t>(start), static_cast<std::size_t>(i)});
  }
  return cps;
}

bool is_letter_or_digit(UChar32 c) {
  switch (u_charType(c)) {
    case U_UPPERCASE_LETTER:
    case U_LOWERCASE_LETTER:
    case U_TITLECASE_LETTER:
    case U_MODIFIER_LETTER:
    case U_OTHER_LETTER:
    case U_DECIMAL_DIGIT_NUMBER:
      return true;
    default:
      return false;
  }
}

bool is_digit(UChar32 c) { return u_charType(c) == U_DECIMAL_DIGIT_NUMBER; }

bool is_space(UChar32 c) { return u_isUWhiteSpace(c) != 0; }

bool is_apostrophe(UChar32 c) { return c == '\'' || c == 0x2019; }

bool is_double_quote_mark(UChar32 c) {
  return c == 0x201C || c == 0x201D || c == 0x201E || c == 0x00AB || c == 0x00BB;
}

bool is_opening_bracket(UChar32 c) { return c == '(' || c == '[' || c == '{' || c == '<'; }

// Characters that always form a token of their own.
bool always_split(UChar32 c) {
  if (c < 0x80) {
    constexpr std::string_view k_ascii = "?!;@#$%&*()[]{}<>";
    return k_ascii.find(static_cast<char>(c)) != std::string_view::npos;
  }
  switch (c) {
    case 0x2026:  // …
    case 0x2014:  // em dash
    case 0x2013:  // –
    case 0x2018:  // ‘
      return true;
    default:
      break;
  }
  const auto type = u_charType(c);
  return type == U_CURRENCY_SYMBOL || type == U_START_PUNCTUATION || type == U_END_PUNCTUATION;
}

char ascii_lower(UChar32 c) {
  return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : static_cast<char>(c);
}

// True when `cps` ends with `clitic` (apostrophe matches ' or ’, letters match
// ASCII case-insensitively).
bool ends_with_clitic(std::span<const CodePoint> cps, std::string_view clitic) {
  if (cps.size() < clitic.size()) return false;
  const std::size_t offset = cps.size() - clitic.size();
  for (std::size_t k = 0; k < clitic.size(); ++k) {
    const UChar32 c = cps[offset + k].c;
    if (clitic[k] == '\'') {
      if (!is_apostrophe(c)) return false;
    } else if (c >= 0x80 || ascii_lower(c) != clitic[k]) {
      return false;
    }
  }
  return true;
}

class ChunkTokenizer {
 public:
  ChunkTokenizer(std::string_view text, const TokenizationRules& rules, std::vector<std::string>& out)
      : text_(text), rules_(rules), out_(out) {}

  void run(std::span<const CodePoint> chunk) {
    std::size_t piece_begin = 0;
    std::size_t i = 0;
    auto flush = [&](std::size_t upto) {
      if (upto > piece_begin) finish_piece(chunk.subspan(piece_begin, upto - piece_begin));
    };
    auto next_is = [&](std::size_t at, UChar32 c) { return at + 1 < chunk.size() && chunk[at + 1].c == c; };

    while (i < chunk.size()) {
      const UChar32 c = chunk[i].c;
      if (c == '"' || (c == '\'' && next_is(i, '\'')) || (c == '`' && next_is(i, '`'))) {
        flush(i);
        const bool opening = c == '`' || i == 0 || is_opening_bracket(chunk[i - 1].c);
        out_.emplace_back(opening ? "``" : "''");
        i += c == '"' ? 1 : 2;
        piece_begin = i;
        continue;
      }
      if ((c == '-' && next_is(i, '-')) || (c == '.' && next_is(i, '.'))) {
        flush(i);
        std::size_t j = i;
        while (j < chunk.size() && chunk[j].c == c) ++j;
        emit(chunk.subspan(i, j - i));
        i = j;
        piece_begin = i;
        continue;
      }
      if (c == ',' || c == ':') {
        // Stays inside numbers such as 1,000 and 10:30.
        const bool numeric = i > piece_begin && is_digit(chunk[i - 1].c) && i + 1 < chunk.size() &&
                             is_digit(chunk[i + 1].c);
        if (!numeric) {
          flush(i);
          emit(chunk.subspan(i, 1));
          piece_begin = ++i;
          continue;
        }
      } else if (is_double_quote_mark(c) || always_split(c)) {
        flush(i);
        emit(chunk.subspan(i, 1));
        piece_begin = ++i;
        continue;
      }
      ++i;
    }
    flush(chunk.size());
  }

 private:
  void emit(std::span<const CodePoint> cps) {
    out_.emplace_back(text_.substr(cps.front().begin, cps.back().end - cps.front().begin));
  }

  bool is_clitic(std::span<const CodePoint> cps) const {
    return std::any_of(rules_.clitics.begin(), rules_.clitics.end(), [&](const std::string& clitic) {
      return cps.size() == clitic.size() && ends_with_clitic(cps, clitic);
    });
  }

  void finish_piece(std::span<const CodePoint> piece) {
    std::size_t lo = 0;
    std::size_t hi = piece.size();

    while (lo < hi && !is_letter_or_digit(piece[lo].c)) {
      if (is_apostrophe(piece[lo].c) && is_clitic(piece.subspan(lo, hi - lo))) break;
      emit(piece.subspan(lo, 1));
      ++lo;
    }

    std::size_t tail_begin = hi;
    while (hi > lo && !is_letter_or_digit(piece[hi - 1].c) && !is_apostrophe(piece[hi - 1].c)) --hi;
    tail_begin = hi;

    if (hi > lo) {
      const auto word = piece.subspan(lo, hi - lo);
      std::size_t split = word.size();
      for (const auto& clitic : rules_.clitics) {
        if (word.size() > clitic.size() && ends_with_clitic(word, clitic) &&
            !is_apostrophe(word[word.size() - clitic.size() - 1].c)) {
          split = word.size() - clitic.size();
          break;
        }
      }
      if (split == word.size() && word.size() > 1 && is_apostrophe(word.back().c) &&
          is_letter_or_digit(word[word.size() - 2].c)) {
        split = word.size() - 1;  // plural possessive: companies'
      }
      emit(word.first(split));
      if (split < word.size()) emit(word.subspan(split));
    }

    for (std::size_t k = tail_begin; k < piece.size(); ++k) emit(piece.subspan(k, 1));
  }

  std::string_view text_;
  const TokenizationRules& rules_;
  std::vector<std::string>& out_;
};

std::vector<std::string> default_clitics() { return {"'s", "n't", "'re", "'ve", "'ll", "'d", "'m"}; }

const TokenizationRules& rules_v1() {
  static const TokenizationRules rules{std::string(k_rules_v1), default_clitics(), false};
  return rules;
}

const TokenizationRules& rules_v2() {
  static const TokenizationRules rules{std::string(k_rules_v2), default_clitics(), true};
  return rules;
}

bool is_double_quote_token(std::string_view token) {
  return token == "``" || token == "''" || token == "\"" || token == "“" || token == "”" ||
         token == "„" || token == "«" || token == "»";
}

}  // namespace

const TokenizationRules& current_rules() { return rules_v2(); }

const TokenizationRules* find_rules(std::string_view version) {
  if (version == k_rules_v1) return &rules_v1();
  if (version == k_rules_v2) return &rules_v2();
  return nullptr;
}

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  const auto cps = decode(text);
  ChunkTokenizer tokenizer(text, current_rules(), tokens);
  std::size_t i = 0;
  while (i < cps.size()) {
    while (i < cps.size() && is_space(cps[i].c)) ++i;
    const std::size_t begin = i;
    while (i < cps.size() && !is_space(cps[i].c)) ++i;
    if (i > begin) tokenizer.run(std::span<const CodePoint>(cps).subspan(begin, i - begin));
  }
  return tokens;
}

bool is_countable(std::string_view token, const TokenizationRules& rules) {
  const auto* s = reinterpret_cast<const std::uint8_t*>(token.data());
  const auto length = static_cast<std::int32_t>(token.size());
  std::int32_t i = 0;
  while (i < length) {
    UChar32 c = 0;
    U8_NEXT(s, i, length, c);
    if (c >= 0 && is_letter_or_digit(c)) return true;
  }
  return rules.count_double_quotes && is_double_quote_token(token);
}

std::size_t count_words(std::string_view text, const TokenizationRules& rules) {
  const auto tokens = tokenize(text);
  return static_cast<std::size_t>(
      std::count_if(tokens.begin(), tokens.end(), [&](const std::string& t) { return is_countable(t, rules); }));
}

}  // namespace lengthctl::wordcount
