// Copyright 2026 The lengthctl Authors
// SPDX-License-Identifier: Apache-2.0

#include "lengthctl/judge.hpp"

#include <unistd.h>

#include <atomic>
#include <cctype>
#include <cerrno>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <set>
#include <thread>

#include "lengthctl/error.hpp"
#include "lengthctl/utf8.hpp"

namespace lengthctl {

using json = nlohmann::json;

namespace {

std::string_view title(Dimension d) noexcept {
  switch (d) {
    case Dimension::Correctness: return "Correctness";
    case Dimension::Completeness: return "Completeness";
    case Dimension::Faithfulness: return "Faithfulness";
    case Dimension::Relevance: return "Relevance";
  }
  return "";
}

// End of the balanced {...} starting at `open`, skipping braces inside JSON
// strings. npos when unbalanced.
std::size_t object_end(std::string_view s, std::size_t open) {
  int depth = 0;
  bool in_string = false;
  for (std::size_t i = open; i < s.size(); ++i) {
    const char c = s[i];
    if (in_string) {
      if (c == '\\') {
        ++i;
      } else if (c == '"') {
        in_string = false;
      }
      continue;
    }
    if (c == '"') {
      in_string = true;
    } else if (c == '{') {
      ++depth;
    } else if (c == '}' && --depth == 0) {
      return i;
    }
  }
  return std::string_view::npos;
}

}  // namespace

std::string_view to_string(Dimension d) noexcept {
  switch (d) {
    case Dimension::Correctness: return "correctness";
    case Dimension::Completeness: return "completeness";
    case Dimension::Faithfulness: return "faithfulness";
    case Dimension::Relevance: return "relevance";
  }
  return "";
}

Dimension parse_dimension(std::string_view name) {
  std::string lower(name);
  for (auto& c : lower) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  for (auto d : k_dimensions) {
    if (to_string(d) == lower) return d;
  }
  throw Error(ErrorKind::UnknownDimension, "unknown quality dimension '" + std::string(name) + "'");
}

std::string_view definition(Dimension d) noexcept {
  switch (d) {
    case Dimension::Correctness:
      return "Measures the factual accuracy of information presented in the summary relative to the source "
             "document, evaluating whether statements accurately reflect information from the original text.";
    case Dimension::Completeness:
      return "Assesses whether the summary captures all essential information from the original document "
             "proportionate to its length target, including key points, arguments, and conclusions.";
    case Dimension::Faithfulness:
      return "Evaluates whether the summary contains information that is consistent with the source document "
             "without introducing facts or claims not present in the original.";
    case Dimension::Relevance:
      return "Measures how well the summary focuses on information that matters to the core message of the "
             "document, avoiding tangential details while highlighting central themes.";
  }
  return "";
}

std::string build_judge_prompt(Dimension dimension, std::string_view document, std::string_view summary) {
  if (utf8::trim(document).empty()) throw Error(ErrorKind::InvalidArgument, "judge prompt needs a source document");
  if (utf8::trim(summary).empty()) throw Error(ErrorKind::InvalidArgument, "judge prompt needs a summary");
  std::string out;
  out.append("You are evaluating a summary of a source document on a single quality dimension.\n\n");
  out.append("Dimension: ").append(title(dimension)).append("\n");
  out.append("Definition: ").append(definition(dimension)).append("\n\n");
  out.append("<source_document>\n").append(document).append("\n</source_document>\n\n");
  out.append("<summary>\n").append(summary).append("\n</summary>\n\n");
  out.append(
      "Rate the summary on this dimension only, from 0 (worst) to 1 (best).\n"
      "Respond with a single JSON object and nothing else:\n"
      "{\"score\": <number between 0 and 1>, \"rationale\": \"<one or two sentences>\"}");
  return out;
}

double parse_judge_response(std::string_view raw) {
  for (std::size_t open = raw.find('{'); open != std::string_view::npos; open = raw.find('{', open + 1)) {
    const auto close = object_end(raw, open);
    if (close == std::string_view::npos) continue;
    const json j = json::parse(raw.substr(open, close - open + 1), nullptr, false);
    if (j.is_discarded() || !j.is_object()) continue;
    const auto it = j.find("score");
    if (it == j.end() || !it->is_number()) continue;
    const double score = it->get<double>();
    if (!(score >= 0.0 && score <= 1.0)) {
      throw Error(ErrorKind::ScoreOutOfRange, "judge score " + it->dump() + " is outside [0, 1]");
    }
    return score;
  }
  throw Error(ErrorKind::NoScoreFound, "judge response holds no JSON object with a numeric score");
}

bool QualityScores::complete() const noexcept {
  for (const auto& d : dimensions) {
    if (!d.score) return false;
  }
  return true;
}

QualityScores evaluate_quality(const GenerationRecord& record, std::string_view document, const Model& judge) {
  if (utf8::trim(record.final_text).empty()) {
    throw Error(ErrorKind::InvalidArgument, "record " + record.record_id + " has no final text to judge");
  }
  QualityScores out;
  out.record_id = record.record_id;
  const auto& endpoint = judge.endpoint();
  out.judge_model_id = endpoint.model.empty() ? endpoint.id : endpoint.model;

  for (auto dimension : k_dimensions) {
    auto& slot = out.at(dimension);
    try {
      GenerateRequest request;
      request.prompt = build_judge_prompt(dimension, document, record.final_text);
      request.temperature = endpoint.temperature.value_or(k_judge_temperature);
      slot.raw = judge.generate(request).text;
      slot.score = parse_judge_response(slot.raw);
    } catch (const Error& e) {
      slot.error_class = std::string(to_string(e.kind()));
      slot.error_message = e.what();
    } catch (const std::exception& e) {
      slot.error_class = "InternalError";
      slot.error_message = e.what();
    }
  }
  return out;
}

std::vector<QualityScores> judge_store(const RecordStore& store, std::string_view document, const Model& judge,
                                       int concurrency, const std::vector<std::string>& skip) {
  const std::set<std::string> done(skip.begin(), skip.end());
  std::vector<const GenerationRecord*> todo;
  for (const auto& r : store.records) {
    if (r.ok() && !done.contains(r.record_id)) todo.push_back(&r);
  }
  std::vector<QualityScores> out(todo.size());
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t i = next++; i < todo.size(); i = next++) out[i] = evaluate_quality(*todo[i], document, judge);
  };
  {
    std::vector<std::jthread> pool;
    const auto n = std::min<std::size_t>(static_cast<std::size_t>(std::max(1, concurrency)), todo.size());
    for (std::size_t w = 0; w < n; ++w) pool.emplace_back(worker);
  }
  return out;
}

json scores_to_json(const QualityScores& scores) {
  json dims = json::object();
  for (auto d : k_dimensions) {
    const auto& s = scores.at(d);
    json entry = {{"score", s.score ? json(*s.score) : json()}, {"raw", s.raw}};
    if (!s.score) {
      entry["error_class"] = s.error_class;
      entry["error_message"] = s.error_message;
    }
    dims[std::string(to_string(d))] = entry;
  }
  return json{{"record_id", scores.record_id}, {"judge_model_id", scores.judge_model_id}, {"dimensions", dims}};
}

QualityScores scores_from_json(const json& j) {
  try {
    QualityScores out;
    out.record_id = j.at("record_id").get<std::string>();
    out.judge_model_id = j.value("judge_model_id", "");
    const auto& dims = j.at("dimensions");
    for (auto d : k_dimensions) {
      const auto it = dims.find(std::string(to_string(d)));
      if (it == dims.end()) continue;
      auto& slot = out.at(d);
      if (it->contains("score") && (*it)["score"].is_number()) slot.score = (*it)["score"].get<double>();
      slot.raw = it->value("raw", "");
      slot.error_class = it->value("error_class", "");
      slot.error_message = it->value("error_message", "");
    }
    return out;
  } catch (const json::exception& ex) {
    throw Error(ErrorKind::IoError, std::string("malformed scores line: ") + ex.what());
  }
}

std::vector<QualityScores> read_scores(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::NotFound, "no such scores file: " + path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty()) lines.push_back(std::move(line));
  }
  std::vector<QualityScores> out;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const json j = json::parse(lines[i], nullptr, false);
    if (j.is_discarded()) {
      if (i + 1 == lines.size()) break;
      throw Error(ErrorKind::IoError, path + ": line " + std::to_string(i + 1) + " is not JSON");
    }
    out.push_back(scores_from_json(j));
  }
  return out;
}

void append_scores(const std::string& path, const std::vector<QualityScores>& scores) {
  std::FILE* f = std::fopen(path.c_str(), "ab");
  if (f == nullptr) throw Error(ErrorKind::IoError, "cannot open " + path + ": " + std::strerror(errno));
  bool ok = true;
  for (const auto& s : scores) {
    const auto line = scores_to_json(s).dump() + "\n";
    ok = ok && std::fwrite(line.data(), 1, line.size(), f) == line.size();
  }
  ok = ok && std::fflush(f) == 0 && ::fsync(::fileno(f)) == 0;
  std::fclose(f);
  if (!ok) throw Error(ErrorKind::IoError, "write to " + path + " failed");
}

}  // namespace lengthctl
