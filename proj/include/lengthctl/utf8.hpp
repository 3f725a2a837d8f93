// Copyright 2026 The lengthctl Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <string>
#include <string_view>

namespace lengthctl::utf8 {

bool is_valid(std::string_view text) noexcept;

/// Number of code points; each malformed sequence counts as one.
std::size_t code_points(std::string_view text) noexcept;

/// Strips Unicode whitespace from both ends.
std::string_view trim(std::string_view text) noexcept;

/// ASCII case-insensitive find, npos when absent.
std::size_t ifind(std::string_view haystack, std::string_view needle, std::size_t from = 0) noexcept;

/// Converts CRLF and lone CR to LF.
std::string normalize_newlines(std::string_view text);

}  // namespace lengthctl::utf8
