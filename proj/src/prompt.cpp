// Copyright 2026 The lengthctl Authors
// SPDX-License-Identifier: Apache-2.0

#include "lengthctl/prompt.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>

#include "lengthctl/error.hpp"
#include "lengthctl/io.hpp"
#include "lengthctl/utf8.hpp"

namespace lengthctl {

namespace detail {
extern const std::string_view k_template_vanilla_v1;
extern const std::string_view k_template_vanilla_v2;
extern const std::string_view k_template_thinking_v1;
extern const std::string_view k_template_thinking_v2;
extern const std::string_view k_template_story_vanilla;
extern const std::string_view k_template_story_thinking;
}  // namespace detail

std::string_view to_string(TaskKind kind) noexcept {
  return kind == TaskKind::Summarize ? "summarize" : "story";
}

std::string_view to_string(Family family) noexcept {
  return family == Family::Vanilla ? "vanilla" : "thinking";
}

std::optional<TaskKind> parse_task_kind(std::string_view name) noexcept {
  if (name == "summarize") return TaskKind::Summarize;
  if (name == "story") return TaskKind::Story;
  return std::nullopt;
}

std::optional<Family> parse_family(std::string_view name) noexcept {
  if (name == "vanilla") return Family::Vanilla;
  if (name == "thinking") return Family::Thinking;
  return std::nullopt;
}

void TaskSpec::validate() const {
  if (target_words < 1) throw Error(ErrorKind::ZeroTarget, "target_words must be >= 1");
  if (kind == TaskKind::Summarize) {
    if (!document || utf8::trim(*document).empty()) {
      throw Error(ErrorKind::InvalidTask, "summarize task requires a non-empty document");
    }
  } else if (document) {
    throw Error(ErrorKind::InvalidTask, "story task takes no document");
  }
}

PromptVariant::PromptVariant(VariantId id, std::string name, Family family, TaskKind kind, std::string text)
    : id_(id), name_(std::move(name)), family_(family), task_kind_(kind), text_(std::move(text)) {}

const std::vector<PromptVariant>& list_variants() {
  static const std::vector<PromptVariant> variants = [] {
    std::vector<PromptVariant> v;
    v.push_back(PromptVariant::builtin(VariantId::VanillaV1));
    v.push_back(PromptVariant::builtin(VariantId::VanillaV2));
    v.push_back(PromptVariant::builtin(VariantId::ThinkingV1));
    v.push_back(PromptVariant::builtin(VariantId::ThinkingV2));
    v.push_back(PromptVariant::builtin(VariantId::StoryVanilla));
    v.push_back(PromptVariant::builtin(VariantId::StoryThinking));
    return v;
  }();
  return variants;
}

const PromptVariant& PromptVariant::builtin(VariantId id) {
  using detail::k_template_story_thinking;
  using detail::k_template_story_vanilla;
  using detail::k_template_thinking_v1;
  using detail::k_template_thinking_v2;
  using detail::k_template_vanilla_v1;
  using detail::k_template_vanilla_v2;
  static const PromptVariant vanilla_v1(VariantId::VanillaV1, "vanilla-v1", Family::Vanilla, TaskKind::Summarize,
                                        std::string(k_template_vanilla_v1));
  static const PromptVariant vanilla_v2(VariantId::VanillaV2, "vanilla-v2", Family::Vanilla, TaskKind::Summarize,
                                        std::string(k_template_vanilla_v2));
  static const PromptVariant thinking_v1(VariantId::ThinkingV1, "thinking-v1", Family::Thinking,
                                         TaskKind::Summarize, std::string(k_template_thinking_v1));
  static const PromptVariant thinking_v2(VariantId::ThinkingV2, "thinking-v2", Family::Thinking,
                                         TaskKind::Summarize, std::string(k_template_thinking_v2));
  static const PromptVariant story_vanilla(VariantId::StoryVanilla, "story-vanilla", Family::Vanilla,
                                           TaskKind::Story, std::string(k_template_story_vanilla));
  static const PromptVariant story_thinking(VariantId::StoryThinking, "story-thinking", Family::Thinking,
                                            TaskKind::Story, std::string(k_template_story_thinking));
  switch (id) {
    case VariantId::VanillaV1: return vanilla_v1;
    case VariantId::VanillaV2: return vanilla_v2;
    case VariantId::ThinkingV1: return thinking_v1;
    case VariantId::ThinkingV2: return thinking_v2;
    case VariantId::StoryVanilla: return story_vanilla;
    case VariantId::StoryThinking: return story_thinking;
    case VariantId::Custom: break;
  }
  throw Error(ErrorKind::UnknownVariant, "custom variants have no built-in template");
}

const PromptVariant* PromptVariant::find_builtin(std::string_view name) {
  const auto& all = list_variants();
  const auto it = std::find_if(all.begin(), all.end(), [&](const PromptVariant& v) { return v.name() == name; });
  return it == all.end() ? nullptr : &*it;
}

PromptVariant PromptVariant::custom(std::string name, Family family, std::string text, TaskKind kind) {
  if (name.empty()) throw Error(ErrorKind::InvalidArgument, "custom variant needs a name");
  if (text.find(k_placeholder) == std::string::npos) {
    throw Error(ErrorKind::MissingPlaceholder, "template '" + name + "' has no {target_words} placeholder");
  }
  if (family == Family::Thinking && !has_thinking_scaffold(text)) {
    throw Error(ErrorKind::InvalidArgument,
                "thinking template '" + name + "' needs <thinking>, <final_answer> or a 'Final N-word document:' marker");
  }
  return PromptVariant(VariantId::Custom, std::move(name), family, kind, std::move(text));
}

std::string PromptVariant::display_name() const {
  switch (id_) {
    case VariantId::VanillaV1: return "Vanilla V1";
    case VariantId::VanillaV2: return "Vanilla V2";
    case VariantId::ThinkingV1: return "Thinking V1";
    case VariantId::ThinkingV2: return "Thinking V2";
    case VariantId::StoryVanilla: return "Story Vanilla";
    case VariantId::StoryThinking: return "Story Thinking";
    case VariantId::Custom: break;
  }
  return name_;
}

bool has_thinking_scaffold(std::string_view text) noexcept {
  return utf8::ifind(text, "<thinking>") != std::string_view::npos ||
         utf8::ifind(text, "<final_answer>") != std::string_view::npos ||
         utf8::ifind(text, "-word document:") != std::string_view::npos;
}

VariantRegistry::VariantRegistry() : variants_(list_variants()) {}

void VariantRegistry::add(PromptVariant variant) {
  const bool taken = std::any_of(variants_.begin(), variants_.end(),
                                 [&](const PromptVariant& v) { return v.name() == variant.name(); });
  if (taken) throw Error(ErrorKind::InvalidArgument, "duplicate variant name '" + variant.name() + "'");
  variants_.push_back(std::move(variant));
}

const PromptVariant& VariantRegistry::get(std::string_view name) const {
  const auto it =
      std::find_if(variants_.begin(), variants_.end(), [&](const PromptVariant& v) { return v.name() == name; });
  if (it == variants_.end()) throw Error(ErrorKind::UnknownVariant, "unknown variant '" + std::string(name) + "'");
  return *it;
}

PromptVariant load_custom_variant(const std::string& path, std::string name, Family family, TaskKind kind) {
  auto text = io::read_file(path);
  if (!utf8::is_valid(text)) throw Error(ErrorKind::InvalidEncoding, path + " is not valid UTF-8");
  return PromptVariant::custom(std::move(name), family, std::move(text), kind);
}

RenderedPrompt render(const PromptVariant& variant, const TaskSpec& task) {
  if (task.target_words < 1) throw Error(ErrorKind::ZeroTarget, "target_words must be >= 1");
  if (variant.task_kind() != task.kind) {
    throw Error(ErrorKind::KindMismatch, "variant '" + variant.name() + "' is for " +
                                             std::string(to_string(variant.task_kind())) + " tasks, got " +
                                             std::string(to_string(task.kind)));
  }
  const std::string_view tmpl = variant.text();
  if (tmpl.find(k_placeholder) == std::string_view::npos) {
    throw Error(ErrorKind::MissingPlaceholder, "template '" + variant.name() + "' has no placeholder");
  }
  const std::string target = std::to_string(task.target_words);
  std::string text;
  text.reserve(tmpl.size() + 32);
  std::size_t pos = 0;
  while (true) {
    const std::size_t hit = tmpl.find(k_placeholder, pos);
    if (hit == std::string_view::npos) break;
    text.append(tmpl.substr(pos, hit - pos));
    text.append(target);
    pos = hit + k_placeholder.size();
  }
  text.append(tmpl.substr(pos));
  return RenderedPrompt{variant.name(), variant.family(), task.target_words, std::move(text)};
}

std::optional<int> target_from_prompt(std::string_view text) noexcept {
  constexpr std::string_view k_anchor = "exactly";
  std::size_t pos = 0;
  while ((pos = utf8::ifind(text, k_anchor, pos)) != std::string_view::npos) {
    std::size_t i = pos + k_anchor.size();
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    int value = 0;
    const auto [end, ec] = std::from_chars(text.data() + i, text.data() + text.size(), value);
    if (ec == std::errc() && end != text.data() + i) return value;
    pos += k_anchor.size();
  }
  return std::nullopt;
}

}  // namespace lengthctl
