// Copyright 2026 The lengthctl Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include "json.hpp"
#include "lengthctl/prompt.hpp"

namespace lengthctl {

enum class RequestStyle { ChatCompletions, Mock };
enum class AttachmentMode { FilePart, InlineText };
enum class DocumentOrder { InstructionFirst, DocumentFirst };

/// ExactN emits t countable words, Offset t + offset, Scale round(factor * t),
/// Verbose 3t. Judge answers every prompt with a fixed score object.
enum class MockMode { ExactN, Offset, Scale, Verbose, Judge };

struct MockSettings {
  MockMode mode = MockMode::ExactN;
  int offset = 0;
  double factor = 1.0;
  double judge_score = 0.9;
  std::uint64_t seed = 0;
};

struct RetryPolicy {
  int max_retries = 3;
  int initial_backoff_ms = 500;
  int max_backoff_ms = 8000;
};

inline constexpr double k_default_temperature = 1.0;

/// Output ceiling used when an endpoint sets none: 4 tokens per target word
/// plus headroom for the thinking scaffold.
constexpr int default_max_output_tokens(int target_words) { return 4 * target_words + 512; }

struct ModelEndpoint {
  std::string id;
  RequestStyle style = RequestStyle::Mock;
  std::string base_url;
  std::string model;        // provider-side model name; empty means `id`
  std::string api_key_env;  // name of the variable holding the key, never the key
  std::optional<double> temperature;
  std::optional<int> max_output_tokens;
  AttachmentMode attachment_mode = AttachmentMode::InlineText;
  DocumentOrder document_order = DocumentOrder::InstructionFirst;
  std::map<std::string, std::string> headers;
  int timeout_ms = 120000;
  RetryPolicy retry;
  MockSettings mock;
};

/// A deterministic offline endpoint.
ModelEndpoint mock_model(MockSettings settings, std::string id = "mock");

/// Throws Error(InvalidPlan) on unknown styles or malformed fields.
ModelEndpoint endpoint_from_json(const nlohmann::json& j);
nlohmann::json endpoint_to_json(const ModelEndpoint& endpoint);

/// Source material sent alongside the instruction. Text documents can be
/// inlined; binary ones only travel as a file content part.
struct Attachment {
  std::string filename;
  std::string mime_type = "text/plain";
  std::string data;
  bool is_text = true;
};

struct GenerateRequest {
  std::string prompt;
  int target_words = 0;  // sizes the default output ceiling; 0 leaves it to the provider
  const Attachment* document = nullptr;
  std::uint64_t nonce = 0;  // varies mock output between attempts; ignored by real providers
  std::optional<double> temperature;
};

struct ModelResponse {
  std::string text;
  std::int64_t input_tokens = 0;
  std::int64_t output_tokens = 0;
  bool tokens_estimated = false;
  double latency_ms = 0.0;
};

/// ceil(code points / 4).
std::int64_t estimate_tokens(std::string_view text) noexcept;

/// A callable model. Implementations are safe to call from several threads.
class Model {
 public:
  virtual ~Model() = default;
  virtual const ModelEndpoint& endpoint() const noexcept = 0;
  virtual ModelResponse generate(const GenerateRequest& request) const = 0;
};

std::unique_ptr<Model> make_model(const ModelEndpoint& endpoint);

/// One-shot convenience over make_model.
ModelResponse generate(const ModelEndpoint& endpoint, const RenderedPrompt& prompt,
                       const Attachment* document = nullptr);

/// The chat-completions request body for `request`. Exposed for tests.
nlohmann::json build_chat_request(const ModelEndpoint& endpoint, const GenerateRequest& request);

/// Pulls the text and usage out of a chat-completions response body.
/// Throws ProviderError when the body has no message content.
ModelResponse parse_chat_response(std::string_view body);

}  // namespace lengthctl
