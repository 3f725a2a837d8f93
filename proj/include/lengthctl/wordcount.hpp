// Copyright 2026 The lengthctl Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace lengthctl::wordcount {

/// Counting rules. Every persisted word count carries the `version` string it
/// was produced under, so stores can be re-audited after a rules change.
///
/// Tokenization is Treebank-style and identical across versions; the versions
/// differ only in which tokens count:
///   treebank-v1  tokens with at least one letter (L*) or decimal digit (Nd)
///   treebank-v2  v1 plus double-quotation-mark tokens (``, '', “, ”, « ...),
///                which the NLTK `word_tokenize` + punctuation-filter
///                reference counts as words
struct TokenizationRules {
  std::string version;
  std::vector<std::string> clitics;
  bool count_double_quotes = false;
};

inline constexpr std::string_view k_rules_v1 = "treebank-v1";
inline constexpr std::string_view k_rules_v2 = "treebank-v2";

/// The rules new records are counted under.
const TokenizationRules& current_rules();

/// Looks up a rules version by name; nullptr when unknown.
const TokenizationRules* find_rules(std::string_view version);

/// Splits text into Treebank-style tokens:
///  - whitespace separates chunks;
///  - leading and trailing punctuation is detached;
///  - clitics ('s n't 're 've 'll 'd 'm) split off the end of a word;
///  - internal hyphens, periods and apostrophes stay inside the word;
///  - currency and percent signs, brackets, ?!;@#&* are always standalone;
///  - runs of "--", "..." and the characters U+2026, U+2014 and U+2013 are standalone tokens;
///  - straight double quotes become `` (opening) or '' (closing).
std::vector<std::string> tokenize(std::string_view text);

bool is_countable(std::string_view token, const TokenizationRules& rules = current_rules());

std::size_t count_words(std::string_view text, const TokenizationRules& rules = current_rules());

}  // namespace lengthctl::wordcount
