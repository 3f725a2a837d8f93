// Copyright 2026 The lengthctl Authors
// SPDX-License-Identifier: Apache-2.0

#include "cli.hpp"

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <filesystem>
#include <iostream>
#include <iterator>
#include <optional>
#include <set>

#include "CLI11.hpp"
#include "lengthctl/error.hpp"
#include "lengthctl/io.hpp"
#include "lengthctl/judge.hpp"
#include "lengthctl/prompt.hpp"
#include "lengthctl/report.hpp"
#include "lengthctl/runner.hpp"
#include "lengthctl/store.hpp"
#include "lengthctl/wordcount.hpp"

namespace lengthctl::cli {

namespace fs = std::filesystem;
using json = nlohmann::json;

struct Cli::Flags {
  bool verbose = false;

  // render
  std::string variant;
  int target = 0;
  std::string template_file;
  std::string family;
  std::string task;

  // count
  std::string text;
  std::string file;
  std::string rules = std::string(wordcount::k_rules_v2);
  bool tokens = false;

  // run / resume
  std::string plan;
  bool resume = false;
  std::optional<std::uint64_t> seed;
  bool no_fsync = false;

  // analyze / judge / report / audit
  std::string store;
  std::string out;
  bool sample_std = false;
  std::size_t resamples = 10000;
  std::string document;
  std::string judge;
  std::string scores;
  int concurrency = 1;
  std::size_t limit = 0;
};

namespace {

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::AuthError:
    case ErrorKind::RateLimited:
    case ErrorKind::ProviderError:
    case ErrorKind::Timeout:
    case ErrorKind::IoError:
    case ErrorKind::EmptyResponse:
    case ErrorKind::ThinkingOnly:
    case ErrorKind::NoScoreFound:
    case ErrorKind::ScoreOutOfRange:
      return k_runtime_error;
    default:
      return k_user_error;
  }
}

void configure_logging(bool verbose) {
  auto logger = spdlog::get("lengthctl");
  if (!logger) logger = spdlog::stderr_color_mt("lengthctl");
  spdlog::set_default_logger(logger);
  spdlog::set_level(verbose ? spdlog::level::debug : spdlog::level::warn);
}

void apply_seed(ExperimentPlan& plan, std::uint64_t seed) {
  plan.seed = seed;
  for (auto& e : plan.endpoints) e.mock.seed = seed;
}

int cmd_render(const Cli::Flags& f, std::ostream& out) {
  const VariantRegistry registry;
  std::optional<PromptVariant> custom;
  const PromptVariant* variant = nullptr;
  std::optional<TaskKind> task = f.task.empty() ? std::nullopt : parse_task_kind(f.task);
  if (!f.task.empty() && !task) throw Error(ErrorKind::InvalidArgument, "unknown task '" + f.task + "'");

  if (!f.template_file.empty()) {
    const auto text = io::read_file(f.template_file);
    std::optional<Family> family = f.family.empty() ? std::nullopt : parse_family(f.family);
    if (!f.family.empty() && !family) throw Error(ErrorKind::InvalidArgument, "unknown family '" + f.family + "'");
    if (!family) family = has_thinking_scaffold(text) ? Family::Thinking : Family::Vanilla;
    custom = PromptVariant::custom(f.variant, *family, text, task.value_or(TaskKind::Summarize));
    variant = &*custom;
  } else {
    variant = &registry.get(f.variant);
  }
  TaskSpec spec;
  spec.kind = task.value_or(variant->task_kind());
  spec.target_words = f.target;
  out << render(*variant, spec).text;
  return k_ok;
}

int cmd_count(const Cli::Flags& f, std::ostream& out) {
  const auto* rules = wordcount::find_rules(f.rules);
  if (rules == nullptr) throw Error(ErrorKind::InvalidArgument, "unknown rules version '" + f.rules + "'");
  std::string text;
  if (!f.file.empty()) {
    text = io::read_file(f.file);
  } else if (!f.text.empty()) {
    text = f.text;
  } else {
    text.assign(std::istreambuf_iterator<char>(std::cin), std::istreambuf_iterator<char>());
  }
  if (f.tokens) {
    for (const auto& token : wordcount::tokenize(text)) {
      out << token << (wordcount::is_countable(token, *rules) ? "" : "\t(not counted)") << "\n";
    }
  }
  out << wordcount::count_words(text, *rules) << "\n";
  return k_ok;
}

int cmd_run(const Cli::Flags& f, bool resume_mode, std::ostream& out, std::ostream& err) {
  auto plan = load_plan(f.plan);
  if (f.seed) apply_seed(plan, *f.seed);
  RunOptions options;
  options.durable = !f.no_fsync;

  const bool resuming = resume_mode || f.resume;
  const auto summary = resuming ? resume(plan, options) : run(plan, options);
  if (summary.completed == 0 && summary.failed == 0) {
    out << "0 completed (nothing to do)\n";
    return k_ok;
  }
  out << summary.completed << " completed, " << summary.failed << " failed\n";
  if (summary.completed == 0) {
    err << "every cell failed; see error_class in " << plan.output_path << "\n";
    return k_runtime_error;
  }
  return k_ok;
}

void write_artifact(const fs::path& dir, const char* name, const std::string& content) {
  io::write_file(dir / name, content);
}

int cmd_analyze(const Cli::Flags& f, std::ostream& out, std::ostream& err) {
  const auto store = read_store(f.store);
  const auto kind = f.sample_std ? StdKind::Sample : StdKind::Population;
  const std::uint64_t seed = f.seed.value_or(0);
  const fs::path dir(f.out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::IoError, "cannot create " + dir.string() + ": " + ec.message());

  const auto table = mapd_table(store, kind);
  const auto improvements = improvement_summary(store, kind);
  const auto points = fidelity_points(store);

  write_artifact(dir, "mapd_table.md", to_markdown(table));
  write_artifact(dir, "mapd_table.csv", to_csv(table));
  write_artifact(dir, "fidelity_points.csv", to_csv(points));
  write_artifact(dir, "fidelity_overlay.csv", to_csv(fidelity_overlay(points, kind)));
  write_artifact(dir, "improvement.txt", format_improvements(improvements));
  write_artifact(dir, "significance.csv", to_csv(significance_tests(store, f.resamples, seed)));
  write_artifact(dir, "records.jsonl", to_jsonl(store));
  try {
    write_artifact(dir, "cost_table.md", to_markdown(cost_table(store)));
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::MissingFamily) throw;
    err << "cost table skipped: " << e.what() << "\n";
  }
  const json metadata = {{"std", to_string(kind)},
                         {"resamples", f.resamples},
                         {"seed", seed},
                         {"plan_fingerprint", store.header.plan_fingerprint},
                         {"rules_version", store.header.rules_version},
                         {"records", store.records.size()}};
  write_artifact(dir, "metadata.json", metadata.dump(2) + "\n");

  out << format_best_summary(table, improvements);
  return k_ok;
}

int cmd_judge(const Cli::Flags& f, std::ostream& out) {
  const auto store = read_store(f.store);
  const auto document = load_document(f.document);
  const auto text = io::read_file(f.judge);
  const json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) throw Error(ErrorKind::InvalidPlan, f.judge + " is not valid JSON");
  const auto model = make_model(endpoint_from_json(j));
  const std::string scores_path = f.scores.empty() ? f.store + ".scores.jsonl" : f.scores;

  std::vector<std::string> skip;
  std::error_code ec;
  if (fs::exists(scores_path, ec)) {
    for (const auto& s : read_scores(scores_path)) skip.push_back(s.record_id);
  }
  RecordStore subset = store;
  if (f.limit > 0) {
    const std::set<std::string> done(skip.begin(), skip.end());
    subset.records.clear();
    for (const auto& r : store.records) {
      if (subset.records.size() >= f.limit) break;
      if (r.ok() && !done.contains(r.record_id)) subset.records.push_back(r);
    }
  }
  const auto scores = judge_store(subset, document.text, *model, f.concurrency, skip);
  append_scores(scores_path, scores);

  std::size_t failures = 0;
  for (const auto& s : scores) {
    for (const auto& d : s.dimensions) failures += d.score ? 0 : 1;
  }
  out << scores.size() << " records judged, " << failures << " dimension failures\n";
  return failures > 0 && failures == scores.size() * k_dimensions.size() ? k_runtime_error : k_ok;
}

int cmd_report(const Cli::Flags& f, std::ostream& out) {
  const auto store = read_store(f.store);
  const auto scores = read_scores(f.scores.empty() ? f.store + ".scores.jsonl" : f.scores);
  const auto rows = quality_table(store, scores);
  const auto markdown = to_markdown(rows);
  if (!f.out.empty()) {
    const fs::path dir(f.out);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw Error(ErrorKind::IoError, "cannot create " + dir.string() + ": " + ec.message());
    write_artifact(dir, "quality_table.md", markdown);
    write_artifact(dir, "quality_table.csv", to_csv(rows));
  }
  out << markdown;
  return k_ok;
}

int cmd_audit(const Cli::Flags& f, std::ostream& out, std::ostream& err) {
  const auto report = audit_store(read_store(f.store));
  for (const auto& w : report.warnings) err << "warning: " << w << "\n";
  for (const auto& m : report.mismatches) {
    out << m.record_id << ": " << m.field << " stored " << m.stored << ", recomputed " << m.recomputed << "\n";
  }
  out << report.mismatches.size() << " mismatches\n";
  return report.mismatches.empty() ? k_ok : k_runtime_error;
}

}  // namespace

Cli::Cli() : flags_(std::make_unique<Flags>()), app_(std::make_unique<CLI::App>("Length-fidelity harness", "lengthctl")) {
  auto& f = *flags_;
  auto& app = *app_;
  app.require_subcommand(1);
  app.set_version_flag("--version", "lengthctl 0.1.0");
  app.add_flag("-v,--verbose", f.verbose, "Debug logging on stderr (credentials redacted)");

  auto* render = app.add_subcommand("render", "Print a rendered prompt");
  render->add_option("--variant", f.variant, "Variant name (vanilla-v1, thinking-v2, ...)")->required();
  render->add_option("--target", f.target, "Target word count")->required();
  render->add_option("--template-file", f.template_file, "Custom template file; --variant then names it")
      ->check(CLI::ExistingFile);
  render->add_option("--family", f.family, "Family of a custom template: vanilla or thinking");
  render->add_option("--task", f.task, "Task kind: summarize or story");

  auto* count = app.add_subcommand("count", "Count words the way length fidelity is scored");
  count->add_option("--text", f.text, "Text to count");
  count->add_option("--file", f.file, "File to count (UTF-8)")->check(CLI::ExistingFile);
  count->add_option("--rules", f.rules, "Tokenization rules version")->capture_default_str();
  count->add_flag("--tokens", f.tokens, "Also print the tokens, one per line");

  const auto add_run_flags = [&](CLI::App* sub) {
    sub->add_option("--plan", f.plan, "Plan file (JSON)")->required()->check(CLI::ExistingFile);
    sub->add_option("--seed", f.seed, "Seed for mock endpoints and attempt nonces");
    sub->add_flag("--no-fsync", f.no_fsync, "Skip fsync after each record");
  };
  auto* run = app.add_subcommand("run", "Run every cell of a plan");
  add_run_flags(run);
  run->add_flag("--resume", f.resume, "Only run cells without a successful record");
  auto* resume = app.add_subcommand("resume", "Continue an interrupted run");
  add_run_flags(resume);

  auto* analyze = app.add_subcommand("analyze", "Write MAPD, fidelity, significance and cost artifacts");
  analyze->add_option("--store", f.store, "Record store (JSONL)")->required();
  analyze->add_option("--out", f.out, "Output directory")->required();
  analyze->add_flag("--sample-std", f.sample_std, "Sample instead of population standard deviation");
  analyze->add_option("--seed", f.seed, "Seed for permutation sampling");
  analyze->add_option("--resamples", f.resamples, "Permutation draws above 12 pairs")->capture_default_str();

  auto* judge = app.add_subcommand("judge", "Score successful records with a judge model");
  judge->add_option("--store", f.store, "Record store (JSONL)")->required();
  judge->add_option("--document", f.document, "Source document the summaries came from")->required();
  judge->add_option("--judge", f.judge, "Judge endpoint definition (JSON)")->required()->check(CLI::ExistingFile);
  judge->add_option("--scores", f.scores, "Scores file (default: <store>.scores.jsonl)");
  judge->add_option("--concurrency", f.concurrency, "Records judged in parallel")->capture_default_str();
  judge->add_option("--limit", f.limit, "Judge at most this many new records (0: all)")->capture_default_str();

  auto* report = app.add_subcommand("report", "Print the quality table from judge scores");
  report->add_option("--store", f.store, "Record store (JSONL)")->required();
  report->add_option("--scores", f.scores, "Scores file (default: <store>.scores.jsonl)");
  report->add_option("--out", f.out, "Also write quality_table.md and .csv here");

  auto* audit = app.add_subcommand("audit", "Recount every record and check stored metrics");
  audit->add_option("--store", f.store, "Record store (JSONL)")->required();
}

Cli::~Cli() = default;

CLI::App& Cli::app() noexcept { return *app_; }

int Cli::run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  try {
    app_->parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app_->exit(e, out, err);
    return code == 0 ? k_ok : k_user_error;
  }
  const auto& f = *flags_;
  configure_logging(f.verbose);
  try {
    const auto* sub = app_->get_subcommands().front();
    const auto& name = sub->get_name();
    if (name == "render") return cmd_render(f, out);
    if (name == "count") return cmd_count(f, out);
    if (name == "run") return cmd_run(f, false, out, err);
    if (name == "resume") return cmd_run(f, true, out, err);
    if (name == "analyze") return cmd_analyze(f, out, err);
    if (name == "judge") return cmd_judge(f, out);
    if (name == "report") return cmd_report(f, out);
    if (name == "audit") return cmd_audit(f, out, err);
    err << "unknown subcommand " << name << "\n";
    return k_user_error;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return k_runtime_error;
  }
}

}  // namespace lengthctl::cli
