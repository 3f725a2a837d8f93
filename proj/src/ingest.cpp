// Copyright 2026 The lengthctl Authors
// SPDX-License-Identifier: Apache-2.0

#include "lengthctl/ingest.hpp"

#include <filesystem>

#include "lengthctl/error.hpp"
#include "lengthctl/io.hpp"
#include "lengthctl/utf8.hpp"
#include "lengthctl/wordcount.hpp"

namespace lengthctl {

SourceDocument load_document(const std::string& path) {
  const std::string raw = io::read_file(path);
  if (raw.empty()) throw Error(ErrorKind::EmptyDocument, path + " is empty");
  if (!utf8::is_valid(raw)) throw Error(ErrorKind::InvalidEncoding, path + " is not valid UTF-8");

  SourceDocument doc;
  doc.path = path;
  doc.text = utf8::normalize_newlines(raw);
  doc.char_count = utf8::code_points(doc.text);
  doc.word_count = wordcount::count_words(doc.text);
  if (doc.word_count == 0) throw Error(ErrorKind::EmptyDocument, path + " contains no words");
  return doc;
}

Attachment as_attachment(const SourceDocument& document) {
  return Attachment{std::filesystem::path(document.path).filename().string(), "text/plain", document.text, true};
}

Attachment load_binary_attachment(const std::string& path, std::string mime_type) {
  auto data = io::read_file(path);
  if (data.empty()) throw Error(ErrorKind::EmptyDocument, path + " is empty");
  return Attachment{std::filesystem::path(path).filename().string(), std::move(mime_type), std::move(data), false};
}

}  // namespace lengthctl
