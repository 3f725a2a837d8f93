// Copyright 2026 The lengthctl Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace lengthctl {

enum class TaskKind { Summarize, Story };

enum class VariantId { VanillaV1, VanillaV2, ThinkingV1, ThinkingV2, StoryVanilla, StoryThinking, Custom };

enum class Family { Vanilla, Thinking };

std::string_view to_string(TaskKind kind) noexcept;
std::string_view to_string(Family family) noexcept;
std::optional<TaskKind> parse_task_kind(std::string_view name) noexcept;
std::optional<Family> parse_family(std::string_view name) noexcept;

/// What to generate. The document is optional only for stories.
struct TaskSpec {
  TaskKind kind = TaskKind::Summarize;
  std::optional<std::string> document;
  int target_words = 0;

  /// Throws Error(InvalidTask | ZeroTarget) when an invariant is broken.
  void validate() const;
};

inline constexpr std::string_view k_placeholder = "{target_words}";

class PromptVariant {
 public:
  /// One of the six built-in variants. Custom is rejected here.
  static const PromptVariant& builtin(VariantId id);

  /// Looks up a built-in by its CLI name ("vanilla-v1", "thinking-v2", ...).
  static const PromptVariant* find_builtin(std::string_view name);

  /// Throws Error(MissingPlaceholder) when `text` lacks {target_words}, and
  /// Error(InvalidArgument) when a Thinking template carries no scaffold the
  /// parser can extract from.
  static PromptVariant custom(std::string name, Family family, std::string text, TaskKind kind = TaskKind::Summarize);

  VariantId id() const noexcept { return id_; }
  const std::string& name() const noexcept { return name_; }
  Family family() const noexcept { return family_; }
  TaskKind task_kind() const noexcept { return task_kind_; }
  std::string_view text() const noexcept { return text_; }

  /// Human-readable label used in report tables ("Thinking V1").
  std::string display_name() const;

 private:
  PromptVariant(VariantId id, std::string name, Family family, TaskKind kind, std::string text);

  VariantId id_;
  std::string name_;
  Family family_;
  TaskKind task_kind_;
  std::string text_;
};

/// The six built-in variants in a stable order.
const std::vector<PromptVariant>& list_variants();

/// Name -> variant lookup seeded with the built-ins; custom templates are
/// registered on top. Names are unique.
class VariantRegistry {
 public:
  VariantRegistry();

  /// Throws Error(InvalidArgument) on a duplicate name.
  void add(PromptVariant variant);

  /// Throws Error(UnknownVariant).
  const PromptVariant& get(std::string_view name) const;

  const std::vector<PromptVariant>& variants() const noexcept { return variants_; }

 private:
  std::vector<PromptVariant> variants_;
};

/// Reads a custom template from a UTF-8 text file.
PromptVariant load_custom_variant(const std::string& path, std::string name, Family family,
                                  TaskKind kind = TaskKind::Summarize);

/// True when a template contains something `extract_final` can key on: the
/// <thinking> block, the <final_answer> tags or the "Final N-word document:"
/// marker.
bool has_thinking_scaffold(std::string_view text) noexcept;

struct RenderedPrompt {
  std::string variant_name;
  Family family = Family::Vanilla;
  int target_words = 0;
  std::string text;
};

/// Substitutes the target into every placeholder. The document is not part
/// of the text; clients attach it separately.
RenderedPrompt render(const PromptVariant& variant, const TaskSpec& task);

/// Reads the first integer following "exactly" (any case). This is how the
/// mock model and the round-trip checks recover the target from a prompt.
std::optional<int> target_from_prompt(std::string_view text) noexcept;

}  // namespace lengthctl
