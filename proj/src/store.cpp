// Copyright 2026 The lengthctl Authors
// SPDX-License-Identifier: Apache-2.0

#include "lengthctl/store.hpp"

#include <unistd.h>

#include <cerrno>
#include <cmath>
#include <cstring>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "lengthctl/error.hpp"
#include "lengthctl/wordcount.hpp"

namespace lengthctl {

using json = nlohmann::json;

std::string record_key(std::string_view endpoint_id, std::string_view variant_id, int target_words, int attempt) {
  std::string key;
  key.append(endpoint_id).append("|").append(variant_id);
  key.append("|").append(std::to_string(target_words)).append("|").append(std::to_string(attempt));
  return key;
}

json record_to_json(const GenerationRecord& r) {
  json j = {{"type", "record"},
            {"record_id", r.record_id},
            {"endpoint_id", r.endpoint_id},
            {"variant_id", r.variant_id},
            {"family", to_string(r.family)},
            {"target_words", r.target_words},
            {"attempt_index", r.attempt_index},
            {"status", r.ok() ? "ok" : "failed"}};
  if (!r.ok()) {
    j["error_class"] = r.error_class;
    j["error_message"] = r.error_message;
  }
  j["raw_response"] = r.raw_response;
  j["final_text"] = r.final_text;
  j["thinking_text"] = r.thinking_text ? json(*r.thinking_text) : json();
  j["parse_method"] = r.parse_method ? json(std::string(to_string(*r.parse_method))) : json();
  j["unclosed_tag"] = r.unclosed_tag;
  j["word_count"] = r.word_count;
  if (r.ok()) {
    j["metrics"] = {{"generated_words", r.metrics.generated_words},
                    {"target_words", r.metrics.target_words},
                    {"abs_error", r.metrics.abs_error},
                    {"apd", r.metrics.apd},
                    {"ratio", r.metrics.ratio}};
  } else {
    j["metrics"] = nullptr;
  }
  j["latency_ms"] = r.latency_ms;
  j["input_tokens"] = r.input_tokens;
  j["output_tokens"] = r.output_tokens;
  j["tokens_estimated"] = r.tokens_estimated;
  j["rules_version"] = r.rules_version;
  j["timestamp"] = r.timestamp;
  return j;
}

GenerationRecord record_from_json(const json& j) {
  try {
    GenerationRecord r;
    r.record_id = j.at("record_id").get<std::string>();
    r.endpoint_id = j.at("endpoint_id").get<std::string>();
    r.variant_id = j.at("variant_id").get<std::string>();
    r.family = parse_family(j.at("family").get<std::string>()).value_or(Family::Vanilla);
    r.target_words = j.at("target_words").get<int>();
    r.attempt_index = j.at("attempt_index").get<int>();
    r.status = j.at("status").get<std::string>() == "ok" ? RecordStatus::Ok : RecordStatus::Failed;
    r.error_class = j.value("error_class", "");
    r.error_message = j.value("error_message", "");
    r.raw_response = j.value("raw_response", "");
    r.final_text = j.value("final_text", "");
    if (j.contains("thinking_text") && j["thinking_text"].is_string()) r.thinking_text = j["thinking_text"];
    if (j.contains("parse_method") && j["parse_method"].is_string()) {
      r.parse_method = parse_parse_method(j["parse_method"].get<std::string>());
    }
    r.unclosed_tag = j.value("unclosed_tag", false);
    r.word_count = j.value("word_count", std::int64_t{0});
    if (j.contains("metrics") && j["metrics"].is_object()) {
      const auto& m = j["metrics"];
      r.metrics.generated_words = m.at("generated_words").get<std::int64_t>();
      r.metrics.target_words = m.at("target_words").get<std::int64_t>();
      r.metrics.abs_error = m.at("abs_error").get<std::int64_t>();
      r.metrics.apd = m.at("apd").get<double>();
      r.metrics.ratio = m.at("ratio").get<double>();
    }
    r.latency_ms = j.value("latency_ms", 0.0);
    r.input_tokens = j.value("input_tokens", std::int64_t{0});
    r.output_tokens = j.value("output_tokens", std::int64_t{0});
    r.tokens_estimated = j.value("tokens_estimated", false);
    r.rules_version = j.value("rules_version", "");
    r.timestamp = j.value("timestamp", "");
    return r;
  } catch (const json::exception& ex) {
    throw Error(ErrorKind::IoError, std::string("malformed record: ") + ex.what());
  }
}

json header_to_json(const StoreHeader& h) {
  return json{{"type", "header"},
              {"format", h.format},
              {"plan_fingerprint", h.plan_fingerprint},
              {"rules_version", h.rules_version},
              {"created", h.created},
              {"settings", h.settings}};
}

StoreHeader header_from_json(const json& j) {
  if (!j.is_object() || j.value("type", "") != "header") {
    throw Error(ErrorKind::IoError, "store does not start with a header line");
  }
  StoreHeader h;
  h.format = j.value("format", "");
  if (h.format != k_store_format) throw Error(ErrorKind::IoError, "unsupported store format '" + h.format + "'");
  h.plan_fingerprint = j.value("plan_fingerprint", "");
  h.rules_version = j.value("rules_version", "");
  h.created = j.value("created", "");
  if (j.contains("settings")) h.settings = j["settings"];
  return h;
}

RecordStore read_store(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    std::error_code ec;
    if (!std::filesystem::exists(path, ec)) throw Error(ErrorKind::NotFound, "no such store: " + path);
    throw Error(ErrorKind::IoError, "cannot open store " + path);
  }
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty()) lines.push_back(std::move(line));
  }
  if (lines.empty()) throw Error(ErrorKind::EmptyStore, path + " has no header");

  RecordStore store;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const json j = json::parse(lines[i], nullptr, false);
    if (j.is_discarded()) {
      if (i + 1 == lines.size() && i > 0) break;  // torn final write
      throw Error(ErrorKind::IoError, path + ": line " + std::to_string(i + 1) + " is not JSON");
    }
    if (i == 0) {
      store.header = header_from_json(j);
    } else {
      store.records.push_back(record_from_json(j));
    }
  }
  return store;
}

StoreWriter::StoreWriter(std::FILE* file, std::string path, bool durable)
    : file_(file), path_(std::move(path)), durable_(durable) {}

StoreWriter::StoreWriter(StoreWriter&& other) noexcept
    : file_(other.file_), path_(std::move(other.path_)), durable_(other.durable_) {
  other.file_ = nullptr;
}

StoreWriter::~StoreWriter() {
  if (file_ != nullptr) std::fclose(file_);
}

StoreWriter StoreWriter::create(const std::string& path, const StoreHeader& header, bool durable) {
  std::FILE* f = std::fopen(path.c_str(), "wb");
  if (f == nullptr) throw Error(ErrorKind::IoError, "cannot create store " + path + ": " + std::strerror(errno));
  StoreWriter writer(f, path, durable);
  writer.write_line(header_to_json(header).dump());
  return writer;
}

StoreWriter StoreWriter::rewrite(const std::string& path, const RecordStore& store, bool durable) {
  const std::string tmp = path + ".tmp";
  {
    StoreWriter staging = create(tmp, store.header, durable);
    for (const auto& record : store.records) staging.append(record);
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw Error(ErrorKind::IoError, "cannot replace " + path + ": " + ec.message());
  std::FILE* f = std::fopen(path.c_str(), "ab");
  if (f == nullptr) throw Error(ErrorKind::IoError, "cannot reopen store " + path);
  return StoreWriter(f, path, durable);
}

void StoreWriter::append(const GenerationRecord& record) { write_line(record_to_json(record).dump()); }

void StoreWriter::write_line(const std::string& line) {
  std::lock_guard lock(mutex_);
  const bool ok = std::fwrite(line.data(), 1, line.size(), file_) == line.size() && std::fputc('\n', file_) != EOF &&
                  std::fflush(file_) == 0;
  if (!ok) throw Error(ErrorKind::IoError, "write to " + path_ + " failed");
  if (durable_ && ::fsync(::fileno(file_)) != 0) {
    throw Error(ErrorKind::IoError, "fsync of " + path_ + " failed: " + std::strerror(errno));
  }
}

std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  ::gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

AuditReport audit_store(const RecordStore& store) {
  AuditReport report;
  const auto& current = wordcount::current_rules();
  std::map<std::string, int> seen;
  for (const auto& r : store.records) {
    const auto key = record_key(r.endpoint_id, r.variant_id, r.target_words, r.attempt_index);
    if (++seen[key] == 2) report.mismatches.push_back({r.record_id, "record_key", key, "duplicate"});
    if (!r.ok()) continue;
    ++report.records_checked;

    const auto* rules = wordcount::find_rules(r.rules_version);
    if (rules == nullptr) {
      report.mismatches.push_back({r.record_id, "rules_version", r.rules_version, "unknown"});
      continue;
    }
    const auto recount = static_cast<std::int64_t>(wordcount::count_words(r.final_text, *rules));
    if (recount != r.word_count) {
      report.mismatches.push_back({r.record_id, "word_count", std::to_string(r.word_count), std::to_string(recount)});
    }
    if (rules->version != current.version) {
      const auto now = wordcount::count_words(r.final_text, current);
      report.warnings.push_back(r.record_id + ": counted under " + rules->version + " (" +
                                std::to_string(recount) + "), " + current.version + " gives " + std::to_string(now));
    }

    LengthMetrics expected;
    try {
      expected = length_metrics(r.word_count, r.target_words);
    } catch (const Error& e) {
      report.mismatches.push_back({r.record_id, "metrics", "present", e.what()});
      continue;
    }
    const auto check_int = [&](const char* field, std::int64_t stored, std::int64_t want) {
      if (stored != want) report.mismatches.push_back({r.record_id, field, std::to_string(stored), std::to_string(want)});
    };
    const auto check_real = [&](const char* field, double stored, double want) {
      if (std::fabs(stored - want) > 1e-12 * std::max(1.0, std::fabs(want))) {
        std::ostringstream a;
        std::ostringstream b;
        a.precision(17);
        b.precision(17);
        a << stored;
        b << want;
        report.mismatches.push_back({r.record_id, field, a.str(), b.str()});
      }
    };
    check_int("metrics.generated_words", r.metrics.generated_words, expected.generated_words);
    check_int("metrics.target_words", r.metrics.target_words, expected.target_words);
    check_int("metrics.abs_error", r.metrics.abs_error, expected.abs_error);
    check_real("metrics.apd", r.metrics.apd, expected.apd);
    check_real("metrics.ratio", r.metrics.ratio, expected.ratio);
  }
  return report;
}

}  // namespace lengthctl
