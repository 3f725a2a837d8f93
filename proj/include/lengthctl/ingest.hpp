// Copyright 2026 The lengthctl Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <string>

#include "lengthctl/client.hpp"

namespace lengthctl {

struct SourceDocument {
  std::string path;
  std::string text;  // verbatim apart from line endings (CRLF/CR -> LF)
  std::size_t char_count = 0;
  std::size_t word_count = 0;
};

/// Throws Error(NotFound | InvalidEncoding | EmptyDocument | IoError).
SourceDocument load_document(const std::string& path);

/// Wraps a loaded text document for the model client.
Attachment as_attachment(const SourceDocument& document);

/// Opaque file passthrough (e.g. a PDF) for attachment_mode=file_part. The
/// bytes are not inspected.
Attachment load_binary_attachment(const std::string& path, std::string mime_type);

}  // namespace lengthctl
