// Copyright 2026 The lengthctl Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <cstdio>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "lengthctl/metrics.hpp"
#include "lengthctl/parse.hpp"
#include "lengthctl/prompt.hpp"

namespace lengthctl {

inline constexpr std::string_view k_store_format = "lengthctl-store/1";

enum class RecordStatus { Ok, Failed };

/// One generation attempt. Failed attempts keep whatever was produced before
/// the failure (often the raw response) plus the error class.
struct GenerationRecord {
  std::string record_id;
  std::string endpoint_id;
  std::string variant_id;
  Family family = Family::Vanilla;
  int target_words = 0;
  int attempt_index = 0;

  RecordStatus status = RecordStatus::Ok;
  std::string error_class;
  std::string error_message;

  std::string raw_response;
  std::string final_text;
  std::optional<std::string> thinking_text;
  std::optional<ParseMethod> parse_method;
  bool unclosed_tag = false;

  std::int64_t word_count = 0;
  LengthMetrics metrics;

  double latency_ms = 0.0;
  std::int64_t input_tokens = 0;
  std::int64_t output_tokens = 0;
  bool tokens_estimated = false;

  std::string rules_version;
  std::string timestamp;

  bool ok() const noexcept { return status == RecordStatus::Ok; }
};

/// "<endpoint>|<variant>|<target>|<attempt>", unique within a store.
std::string record_key(std::string_view endpoint_id, std::string_view variant_id, int target_words, int attempt);

nlohmann::json record_to_json(const GenerationRecord& record);
GenerationRecord record_from_json(const nlohmann::json& j);

/// First line of every store.
struct StoreHeader {
  std::string format = std::string(k_store_format);
  std::string plan_fingerprint;
  std::string rules_version;
  std::string created;
  nlohmann::json settings = nlohmann::json::object();  // delay, concurrency, seed, axes
};

nlohmann::json header_to_json(const StoreHeader& header);
StoreHeader header_from_json(const nlohmann::json& j);

struct RecordStore {
  StoreHeader header;
  std::vector<GenerationRecord> records;
};

/// Reads a JSONL store. A malformed final line (a write cut short by a crash)
/// is dropped; malformed lines elsewhere throw Error(IoError).
RecordStore read_store(const std::string& path);

/// Serialized, durable appends to a store file. Each append is flushed and
/// fsync'ed before returning.
class StoreWriter {
 public:
  /// Creates (truncating) a store and writes the header line.
  static StoreWriter create(const std::string& path, const StoreHeader& header, bool durable = true);

  /// Rewrites `path` atomically with `store`, then reopens it for appending.
  static StoreWriter rewrite(const std::string& path, const RecordStore& store, bool durable = true);

  StoreWriter(StoreWriter&& other) noexcept;
  StoreWriter& operator=(StoreWriter&&) = delete;
  StoreWriter(const StoreWriter&) = delete;
  StoreWriter& operator=(const StoreWriter&) = delete;
  ~StoreWriter();

  void append(const GenerationRecord& record);

 private:
  StoreWriter(std::FILE* file, std::string path, bool durable);
  void write_line(const std::string& line);

  std::mutex mutex_;
  std::FILE* file_ = nullptr;
  std::string path_;
  bool durable_ = true;
};

/// ISO-8601 UTC timestamp with second precision.
std::string utc_timestamp();

struct AuditIssue {
  std::string record_id;
  std::string field;
  std::string stored;
  std::string recomputed;
};

struct AuditReport {
  std::size_t records_checked = 0;
  std::vector<AuditIssue> mismatches;
  std::vector<std::string> warnings;
};

/// Recounts every successful record under its own rules version, checks the
/// derived metrics and key uniqueness. Records from an older rules version are
/// additionally recounted under the current one and reported as warnings.
AuditReport audit_store(const RecordStore& store);

}  // namespace lengthctl
