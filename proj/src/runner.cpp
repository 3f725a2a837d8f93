// Copyright 2026 The lengthctl Authors
// SPDX-License-Identifier: Apache-2.0

#include "lengthctl/runner.hpp"

#include <spdlog/spdlog.h>

#include <atomic>
#include <chrono>
#include <cstdio>
#include <exception>
#include <mutex>
#include <set>
#include <thread>
#include <unordered_set>

#include "lengthctl/error.hpp"
#include "lengthctl/hash.hpp"
#include "lengthctl/io.hpp"
#include "lengthctl/metrics.hpp"
#include "lengthctl/parse.hpp"
#include "lengthctl/wordcount.hpp"

namespace lengthctl {

using json = nlohmann::json;

namespace {

std::string hex64(std::uint64_t value) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(value));
  return buf;
}

const Attachment* wire_document(const ExperimentPlan& plan, std::optional<Attachment>& storage) {
  if (plan.attachment) return &*plan.attachment;
  if (plan.document) {
    storage = as_attachment(*plan.document);
    return &*storage;
  }
  return nullptr;
}

GenerationRecord execute_cell_with(const ExperimentPlan& plan, const Cell& cell, const Model& model,
                                   const Attachment* document) {
  const auto& endpoint = plan.endpoints.at(cell.endpoint);
  const auto& variant = plan.variants.at(cell.variant);

  GenerationRecord record;
  record.endpoint_id = endpoint.id;
  record.variant_id = variant.name();
  record.family = variant.family();
  record.target_words = cell.target_words;
  record.attempt_index = cell.attempt;
  record.record_id = record_key(endpoint.id, variant.name(), cell.target_words, cell.attempt);
  record.rules_version = wordcount::current_rules().version;

  try {
    TaskSpec task;
    task.kind = plan.task_kind;
    task.target_words = cell.target_words;
    const auto prompt = render(variant, task);

    GenerateRequest request;
    request.prompt = prompt.text;
    request.target_words = prompt.target_words;
    request.document = document;
    request.nonce = mix64(fnv1a64(record.record_id) ^ plan.seed);
    const auto response = model.generate(request);
    record.raw_response = response.text;
    record.latency_ms = response.latency_ms;
    record.input_tokens = response.input_tokens;
    record.output_tokens = response.output_tokens;
    record.tokens_estimated = response.tokens_estimated;

    const auto parsed = extract_final(response.text, variant.family());
    record.thinking_text = parsed.thinking_text;
    record.parse_method = parsed.method;
    record.unclosed_tag = parsed.unclosed_tag;
    record.final_text = strip_scaffold(parsed.final_text);
    if (record.final_text.empty()) {
      throw Error(ErrorKind::ThinkingOnly, "final answer holds only the scaffold echo");
    }
    record.word_count = static_cast<std::int64_t>(wordcount::count_words(record.final_text));
    record.metrics = length_metrics(record.word_count, cell.target_words);
    record.status = RecordStatus::Ok;
  } catch (const Error& e) {
    record.status = RecordStatus::Failed;
    record.error_class = std::string(to_string(e.kind()));
    record.error_message = e.what();
  } catch (const std::exception& e) {
    record.status = RecordStatus::Failed;
    record.error_class = "InternalError";
    record.error_message = e.what();
  }
  record.timestamp = utc_timestamp();
  return record;
}

RunSummary execute(const ExperimentPlan& plan, const std::vector<Cell>& cells, StoreWriter& writer,
                   const RunOptions& options) {
  const ModelFactory factory = options.factory ? options.factory : ModelFactory(make_model);
  std::vector<std::unique_ptr<Model>> models;
  models.reserve(plan.endpoints.size());
  for (const auto& endpoint : plan.endpoints) models.push_back(factory(endpoint));

  std::vector<std::vector<Cell>> queues(plan.endpoints.size());
  for (const auto& cell : cells) queues[cell.endpoint].push_back(cell);

  std::optional<Attachment> storage;
  const Attachment* document = wire_document(plan, storage);

  const auto next = std::make_unique<std::atomic<std::size_t>[]>(queues.size());
  std::atomic<std::size_t> completed{0};
  std::atomic<std::size_t> failed{0};
  std::atomic<bool> abort{false};
  std::exception_ptr error;
  std::mutex error_mutex;

  {
    std::vector<std::jthread> workers;
    for (std::size_t e = 0; e < queues.size(); ++e) {
      if (queues[e].empty()) continue;
      const auto limit = static_cast<std::size_t>(std::max(1, plan.concurrency_limit));
      for (std::size_t w = 0; w < std::min(limit, queues[e].size()); ++w) {
        workers.emplace_back([&, e] {
          bool first = true;
          while (!abort) {
            const std::size_t i = next[e]++;
            if (i >= queues[e].size()) break;
            if (!first && plan.inter_attempt_delay_ms > 0) {
              std::this_thread::sleep_for(std::chrono::milliseconds(plan.inter_attempt_delay_ms));
            }
            first = false;
            const auto record = execute_cell_with(plan, queues[e][i], *models[e], document);
            try {
              writer.append(record);
            } catch (...) {
              std::lock_guard lock(error_mutex);
              if (!error) error = std::current_exception();
              abort = true;
              break;
            }
            if (record.ok()) {
              ++completed;
            } else {
              ++failed;
              spdlog::warn("{}: {}", record.record_id, record.error_message);
            }
          }
        });
      }
    }
  }
  if (error) std::rethrow_exception(error);
  return RunSummary{completed.load(), failed.load(), 0};
}

std::vector<int> int_list(const json& j, const char* field) {
  if (!j.is_array()) throw Error(ErrorKind::InvalidPlan, std::string(field) + " must be an array of integers");
  std::vector<int> out;
  for (const auto& v : j) {
    if (!v.is_number_integer()) throw Error(ErrorKind::InvalidPlan, std::string(field) + " must hold integers");
    out.push_back(v.get<int>());
  }
  return out;
}

}  // namespace

void ExperimentPlan::validate() const {
  if (endpoints.empty()) throw Error(ErrorKind::EmptyAxis, "plan has no endpoints");
  if (variants.empty()) throw Error(ErrorKind::EmptyAxis, "plan has no variants");
  if (targets.empty()) throw Error(ErrorKind::EmptyAxis, "plan has no targets");
  if (attempts < 1) throw Error(ErrorKind::EmptyAxis, "plan needs at least one attempt");

  std::set<std::string> ids;
  for (const auto& e : endpoints) {
    if (!ids.insert(e.id).second) throw Error(ErrorKind::InvalidPlan, "duplicate endpoint id '" + e.id + "'");
  }
  std::set<std::string> names;
  for (const auto& v : variants) {
    if (!names.insert(v.name()).second) throw Error(ErrorKind::InvalidPlan, "duplicate variant '" + v.name() + "'");
    if (v.task_kind() != task_kind) {
      throw Error(ErrorKind::InvalidPlan, "variant '" + v.name() + "' does not fit a " +
                                              std::string(to_string(task_kind)) + " task");
    }
  }
  std::set<int> seen;
  for (int t : targets) {
    if (t < 1) throw Error(ErrorKind::InvalidPlan, "targets must be positive, got " + std::to_string(t));
    if (!seen.insert(t).second) throw Error(ErrorKind::InvalidPlan, "duplicate target " + std::to_string(t));
  }
  if (inter_attempt_delay_ms < 0) throw Error(ErrorKind::InvalidPlan, "inter_attempt_delay_ms must be >= 0");
  if (concurrency_limit < 1) throw Error(ErrorKind::InvalidPlan, "concurrency_limit must be >= 1");
  if (task_kind == TaskKind::Summarize && !document && !attachment) {
    throw Error(ErrorKind::InvalidPlan, "summarize plans need a document or attachment");
  }
  if (task_kind == TaskKind::Story && (document || attachment)) {
    throw Error(ErrorKind::InvalidPlan, "story plans take no document");
  }
  if (attachment && !attachment->is_text) {
    for (const auto& e : endpoints) {
      if (e.style == RequestStyle::ChatCompletions && e.attachment_mode != AttachmentMode::FilePart) {
        throw Error(ErrorKind::InvalidPlan, "endpoint '" + e.id + "' must use attachment_mode file_part for a binary document");
      }
    }
  }
}

std::string ExperimentPlan::fingerprint() const {
  json axes = json::object();
  json eps = json::array();
  for (const auto& e : endpoints) {
    json entry = {{"id", e.id}, {"style", e.style == RequestStyle::Mock ? "mock" : "chat_completions"}};
    if (e.style == RequestStyle::Mock) {
      entry["mock"] = endpoint_to_json(e).at("mock");
    } else {
      entry["base_url"] = e.base_url;
      entry["model"] = e.model;
    }
    eps.push_back(entry);
  }
  axes["endpoints"] = eps;
  json vs = json::array();
  for (const auto& v : variants) vs.push_back({{"name", v.name()}, {"family", to_string(v.family())}, {"text", v.text()}});
  axes["variants"] = vs;
  axes["targets"] = targets;
  axes["attempts"] = attempts;
  axes["task"] = to_string(task_kind);
  if (document) axes["document"] = hex64(fnv1a64(document->text));
  if (attachment) axes["attachment"] = hex64(fnv1a64(attachment->data));
  return hex64(fnv1a64(axes.dump()));
}

ExperimentPlan plan_from_json(const json& j, const std::filesystem::path& base_dir) {
  const auto resolve = [&](const std::string& p) {
    const std::filesystem::path path(p);
    return (path.is_absolute() ? path : base_dir / path).string();
  };
  try {
    ExperimentPlan plan;
    if (!j.is_object()) throw Error(ErrorKind::InvalidPlan, "plan must be a JSON object");

    const json task = j.value("task", json::object());
    const auto kind_name = task.value("kind", "summarize");
    const auto kind = parse_task_kind(kind_name);
    if (!kind) throw Error(ErrorKind::InvalidPlan, "unknown task kind '" + kind_name + "'");
    plan.task_kind = *kind;
    if (task.contains("document")) plan.document = load_document(resolve(task["document"].get<std::string>()));
    if (task.contains("attachment")) {
      const auto& a = task["attachment"];
      plan.attachment = load_binary_attachment(resolve(a.at("path").get<std::string>()),
                                               a.value("mime_type", "application/pdf"));
    }

    for (const auto& e : j.at("endpoints")) plan.endpoints.push_back(endpoint_from_json(e));

    for (const auto& v : j.at("variants")) {
      if (v.is_string()) {
        const auto* builtin = PromptVariant::find_builtin(v.get<std::string>());
        if (builtin == nullptr) throw Error(ErrorKind::InvalidPlan, "unknown variant '" + v.get<std::string>() + "'");
        plan.variants.push_back(*builtin);
        continue;
      }
      const auto name = v.at("name").get<std::string>();
      const auto family_name = v.at("family").get<std::string>();
      const auto family = parse_family(family_name);
      if (!family) throw Error(ErrorKind::InvalidPlan, "variant '" + name + "': unknown family '" + family_name + "'");
      if (PromptVariant::find_builtin(name) != nullptr) {
        throw Error(ErrorKind::InvalidPlan, "custom variant '" + name + "' shadows a built-in");
      }
      if (v.contains("template_file")) {
        plan.variants.push_back(load_custom_variant(resolve(v["template_file"].get<std::string>()), name, *family,
                                                    plan.task_kind));
      } else {
        plan.variants.push_back(PromptVariant::custom(name, *family, v.at("template").get<std::string>(), plan.task_kind));
      }
    }

    if (j.contains("targets")) plan.targets = int_list(j["targets"], "targets");
    plan.attempts = j.value("attempts", plan.attempts);
    plan.inter_attempt_delay_ms = j.value("inter_attempt_delay_ms", plan.inter_attempt_delay_ms);
    plan.concurrency_limit = j.value("concurrency_limit", plan.concurrency_limit);
    plan.seed = j.value("seed", plan.seed);
    plan.output_path = resolve(j.value("output", "records.jsonl"));
    plan.validate();
    return plan;
  } catch (const json::exception& ex) {
    throw Error(ErrorKind::InvalidPlan, std::string("malformed plan: ") + ex.what());
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::EmptyAxis || e.kind() == ErrorKind::InvalidPlan) throw;
    throw Error(ErrorKind::InvalidPlan, e.what());
  }
}

ExperimentPlan load_plan(const std::string& path) {
  const auto text = io::read_file(path);
  const json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) throw Error(ErrorKind::InvalidPlan, path + " is not valid JSON");
  return plan_from_json(j, std::filesystem::path(path).parent_path());
}

std::vector<Cell> expand(const ExperimentPlan& plan) {
  plan.validate();
  std::vector<Cell> cells;
  cells.reserve(plan.cell_count());
  for (std::size_t e = 0; e < plan.endpoints.size(); ++e) {
    for (std::size_t v = 0; v < plan.variants.size(); ++v) {
      for (int t : plan.targets) {
        for (int a = 0; a < plan.attempts; ++a) cells.push_back(Cell{e, v, t, a});
      }
    }
  }
  return cells;
}

GenerationRecord execute_cell(const ExperimentPlan& plan, const Cell& cell, const Model& model) {
  std::optional<Attachment> storage;
  return execute_cell_with(plan, cell, model, wire_document(plan, storage));
}

StoreHeader make_header(const ExperimentPlan& plan) {
  StoreHeader header;
  header.plan_fingerprint = plan.fingerprint();
  header.rules_version = wordcount::current_rules().version;
  header.created = utc_timestamp();
  json endpoint_ids = json::array();
  for (const auto& e : plan.endpoints) endpoint_ids.push_back(e.id);
  json variant_names = json::array();
  for (const auto& v : plan.variants) variant_names.push_back(v.name());
  header.settings = {{"endpoints", endpoint_ids},
                     {"variants", variant_names},
                     {"targets", plan.targets},
                     {"attempts", plan.attempts},
                     {"task", to_string(plan.task_kind)},
                     {"inter_attempt_delay_ms", plan.inter_attempt_delay_ms},
                     {"concurrency_limit", plan.concurrency_limit},
                     {"seed", plan.seed},
                     {"default_temperature", k_default_temperature},
                     {"default_max_output_tokens", "4 * target_words + 512"}};
  return header;
}

RunSummary run(const ExperimentPlan& plan, const RunOptions& options) {
  const auto cells = expand(plan);
  auto writer = StoreWriter::create(plan.output_path, make_header(plan), options.durable);
  return execute(plan, cells, writer, options);
}

RunSummary resume(const ExperimentPlan& plan, const RunOptions& options) {
  std::error_code ec;
  if (!std::filesystem::exists(plan.output_path, ec)) return run(plan, options);

  const auto cells = expand(plan);
  auto store = read_store(plan.output_path);
  const auto fingerprint = plan.fingerprint();
  if (store.header.plan_fingerprint != fingerprint) {
    throw Error(ErrorKind::PlanMismatch, plan.output_path + " was written by plan " + store.header.plan_fingerprint +
                                             ", current plan is " + fingerprint);
  }

  std::unordered_set<std::string> done;
  std::vector<GenerationRecord> kept;
  for (auto& record : store.records) {
    const auto key = record_key(record.endpoint_id, record.variant_id, record.target_words, record.attempt_index);
    if (record.ok() && done.insert(key).second) kept.push_back(std::move(record));
  }
  const bool dropped = kept.size() != store.records.size();

  std::vector<Cell> missing;
  for (const auto& cell : cells) {
    const auto key = record_key(plan.endpoints[cell.endpoint].id, plan.variants[cell.variant].name(),
                                cell.target_words, cell.attempt);
    if (!done.contains(key)) missing.push_back(cell);
  }

  RunSummary summary;
  summary.skipped = cells.size() - missing.size();
  if (missing.empty() && !dropped) return summary;

  store.records = std::move(kept);
  auto writer = StoreWriter::rewrite(plan.output_path, store, options.durable);
  const auto fresh = execute(plan, missing, writer, options);
  summary.completed = fresh.completed;
  summary.failed = fresh.failed;
  return summary;
}

}  // namespace lengthctl
