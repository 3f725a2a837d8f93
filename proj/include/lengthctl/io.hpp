// Copyright 2026 The lengthctl Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace lengthctl::io {

/// Whole-file read in binary mode. Throws Error(NotFound | IoError).
std::string read_file(const std::filesystem::path& path);

/// Writes via a temporary sibling and rename. Throws Error(IoError).
void write_file(const std::filesystem::path& path, std::string_view content);

}  // namespace lengthctl::io
