// Copyright 2026 The lengthctl Authors
// SPDX-License-Identifier: Apache-2.0

#include "httplib.h"

#include "lengthctl/client.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <random>
#include <thread>

#include "lengthctl/error.hpp"
#include "lengthctl/hash.hpp"
#include "lengthctl/utf8.hpp"

namespace lengthctl {

using json = nlohmann::json;

namespace {

constexpr std::size_t k_body_excerpt = 300;

std::string excerpt(std::string_view body) {
  if (body.size() <= k_body_excerpt) return std::string(body);
  return std::string(body.substr(0, k_body_excerpt)) + "...";
}

double elapsed_ms(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
}

// ---------------------------------------------------------------------------
// Mock

constexpr std::array<std::string_view, 48> k_vocabulary = {
    "amazon",    "growth",     "revenue",   "customer",  "service",   "market",     "builder",  "letter",
    "strong",    "income",     "cash",      "flow",      "invest",    "primitive",  "cloud",    "delivery",
    "speed",     "selection",  "price",     "advertise", "video",     "satellite",  "model",    "future",
    "team",      "product",    "value",     "progress",  "platform",  "innovation", "business", "capital",
    "logistics", "experience", "long",      "term",      "focus",     "results",    "company",  "shareholder",
    "generative", "efficient", "operating", "annual",    "expanded",  "durable",    "network",  "retail"};

class MockModel final : public Model {
 public:
  explicit MockModel(ModelEndpoint endpoint) : endpoint_(std::move(endpoint)) {}

  const ModelEndpoint& endpoint() const noexcept override { return endpoint_; }

  ModelResponse generate(const GenerateRequest& request) const override {
    const auto start = std::chrono::steady_clock::now();
    ModelResponse response;
    response.text = respond(request);
    response.latency_ms = elapsed_ms(start);
    std::int64_t input = estimate_tokens(request.prompt);
    if (request.document && request.document->is_text) input += estimate_tokens(request.document->data);
    response.input_tokens = input;
    response.output_tokens = estimate_tokens(response.text);
    response.tokens_estimated = true;
    return response;
  }

 private:
  std::string respond(const GenerateRequest& request) const {
    const auto& settings = endpoint_.mock;
    if (settings.mode == MockMode::Judge) {
      return json{{"score", settings.judge_score}, {"rationale", "mock judge"}}.dump();
    }
    const int target = target_from_prompt(request.prompt).value_or(request.target_words);
    long words = target;
    switch (settings.mode) {
      case MockMode::ExactN: break;
      case MockMode::Offset: words = static_cast<long>(target) + settings.offset; break;
      case MockMode::Scale: words = std::lround(settings.factor * target); break;
      case MockMode::Verbose: words = 3L * target; break;
      case MockMode::Judge: break;
    }
    words = std::max(words, 0L);

    std::mt19937_64 rng(mix64(settings.seed ^ mix64(fnv1a64(request.prompt) ^ mix64(request.nonce))));
    std::vector<std::string_view> picks;
    picks.reserve(static_cast<std::size_t>(words));
    for (long i = 0; i < words; ++i) picks.push_back(k_vocabulary[rng() % k_vocabulary.size()]);

    std::string answer;
    for (std::size_t i = 0; i < picks.size(); ++i) {
      if (i > 0) answer += (i % 9 == 0) ? ", " : " ";
      answer += picks[i];
    }
    if (!answer.empty()) {
      answer[0] = static_cast<char>(answer[0] - 'a' + 'A');
      answer += '.';
    }

    const bool tagged = request.prompt.find("<final_answer>") != std::string::npos;
    const bool thinking = request.prompt.find("<thinking>") != std::string::npos;
    if (!thinking && !tagged) return answer;

    std::string out = "<thinking>\n";
    for (std::size_t i = 0; i < picks.size(); ++i) {
      out += std::to_string(i + 1) + ' ' + std::string(picks[i]) + '\n';
    }
    out += "</thinking>\n\n";
    if (tagged) {
      out += "<final_answer>\n" + answer + "\n[EXACTLY " + std::to_string(target) + " WORDS TOTAL]\n</final_answer>";
    } else {
      out += "Final " + std::to_string(target) + "-word document:\n" + answer;
    }
    return out;
  }

  ModelEndpoint endpoint_;
};

// ---------------------------------------------------------------------------
// Chat completions over HTTP

struct ParsedUrl {
  std::string origin;  // scheme://host[:port]
  std::string path;
};

ParsedUrl split_url(const std::string& base_url) {
  const auto scheme_end = base_url.find("://");
  if (scheme_end == std::string::npos) {
    throw Error(ErrorKind::InvalidArgument, "base_url needs a scheme: " + base_url);
  }
  const auto path_begin = base_url.find('/', scheme_end + 3);
  ParsedUrl url;
  url.origin = base_url.substr(0, path_begin);
  std::string prefix = path_begin == std::string::npos ? "" : base_url.substr(path_begin);
  while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
  constexpr std::string_view k_route = "/chat/completions";
  if (prefix.size() >= k_route.size() && prefix.compare(prefix.size() - k_route.size(), k_route.size(), k_route) == 0) {
    url.path = prefix;
  } else {
    url.path = prefix + std::string(k_route);
  }
  return url;
}

class ChatCompletionsModel final : public Model {
 public:
  explicit ChatCompletionsModel(ModelEndpoint endpoint) : endpoint_(std::move(endpoint)) {}

  const ModelEndpoint& endpoint() const noexcept override { return endpoint_; }

  ModelResponse generate(const GenerateRequest& request) const override {
    const char* key = endpoint_.api_key_env.empty() ? nullptr : std::getenv(endpoint_.api_key_env.c_str());
    if (key == nullptr || *key == '\0') {
      throw Error(ErrorKind::AuthError, "endpoint '" + endpoint_.id + "': environment variable '" +
                                            endpoint_.api_key_env + "' is not set");
    }
    const auto url = split_url(endpoint_.base_url);
    const std::string body = build_chat_request(endpoint_, request).dump();

    httplib::Headers headers{{"Authorization", std::string("Bearer ") + key}};
    for (const auto& [name, value] : endpoint_.headers) headers.emplace(name, value);
    spdlog::debug("POST {}{} [{}] body={}", url.origin, url.path, redacted(headers), body);

    const auto timeout = std::chrono::milliseconds(endpoint_.timeout_ms);
    const auto& retry = endpoint_.retry;
    for (int attempt = 0;; ++attempt) {
      httplib::Client client(url.origin);
      client.set_connection_timeout(timeout);
      client.set_read_timeout(timeout);
      client.set_write_timeout(timeout);

      const auto start = std::chrono::steady_clock::now();
      auto result = client.Post(url.path, headers, body, "application/json");
      const double latency = elapsed_ms(start);

      const bool last = attempt >= retry.max_retries;
      std::optional<std::chrono::milliseconds> retry_after;
      if (!result) {
        const auto err = result.error();
        const bool timed_out = err == httplib::Error::Read || err == httplib::Error::Write ||
                               err == httplib::Error::ConnectionTimeout;
        spdlog::debug("endpoint {}: transport error {} (attempt {})", endpoint_.id, httplib::to_string(err), attempt);
        if (last) {
          if (timed_out) throw Error(ErrorKind::Timeout, "endpoint '" + endpoint_.id + "' timed out");
          throw ProviderError(0, "endpoint '" + endpoint_.id + "': " + httplib::to_string(err));
        }
      } else {
        const int status = result->status;
        spdlog::debug("endpoint {}: HTTP {} body={}", endpoint_.id, status, excerpt(result->body));
        if (status >= 200 && status < 300) {
          auto response = parse_chat_response(result->body);
          response.latency_ms = latency;
          if (response.tokens_estimated) {
            response.input_tokens = estimate_tokens(request.prompt);
            if (request.document && request.document->is_text) {
              response.input_tokens += estimate_tokens(request.document->data);
            }
            response.output_tokens = estimate_tokens(response.text);
          }
          return response;
        }
        if (status == 401 || status == 403) {
          throw Error(ErrorKind::AuthError, "endpoint '" + endpoint_.id + "' rejected credentials (HTTP " +
                                                std::to_string(status) + "): " + excerpt(result->body));
        }
        const bool transient = status == 429 || status == 408 || status >= 500;
        if (!transient) throw ProviderError(status, excerpt(result->body));
        if (last) {
          if (status == 429) {
            throw Error(ErrorKind::RateLimited, "endpoint '" + endpoint_.id + "' still rate limited after " +
                                                    std::to_string(retry.max_retries) + " retries");
          }
          throw ProviderError(status, excerpt(result->body));
        }
        if (result->has_header("Retry-After")) {
          const auto seconds = std::atof(result->get_header_value("Retry-After").c_str());
          if (seconds > 0) retry_after = std::chrono::milliseconds(static_cast<long>(seconds * 1000));
        }
      }

      auto delay = std::chrono::milliseconds(
          std::min<long long>(static_cast<long long>(retry.initial_backoff_ms) << std::min(attempt, 30),
                              retry.max_backoff_ms));
      if (retry_after) delay = std::min(*retry_after, std::chrono::milliseconds(retry.max_backoff_ms));
      std::this_thread::sleep_for(delay);
    }
  }

 private:
  static std::string redacted(const httplib::Headers& headers) {
    std::string out;
    for (const auto& [name, value] : headers) {
      if (!out.empty()) out += ", ";
      const auto is = [&](std::string_view want) {
        return name.size() == want.size() && utf8::ifind(name, want) == 0;
      };
      const bool secret = is("Authorization") || is("x-api-key") || is("api-key");
      out += name + ": " + (secret ? "<redacted>" : value);
    }
    return out;
  }

  ModelEndpoint endpoint_;
};

template <class Enum, std::size_t N>
Enum enum_field(const json& j, const char* field, Enum fallback,
                const std::array<std::pair<std::string_view, Enum>, N>& names) {
  if (!j.contains(field)) return fallback;
  const auto value = j.at(field).get<std::string>();
  for (const auto& [name, e] : names) {
    if (name == value) return e;
  }
  throw Error(ErrorKind::InvalidPlan, std::string("unknown ") + field + " '" + value + "'");
}

constexpr std::array<std::pair<std::string_view, RequestStyle>, 2> k_styles{
    {{"chat_completions", RequestStyle::ChatCompletions}, {"mock", RequestStyle::Mock}}};
constexpr std::array<std::pair<std::string_view, AttachmentMode>, 2> k_attachment_modes{
    {{"file_part", AttachmentMode::FilePart}, {"inline_text", AttachmentMode::InlineText}}};
constexpr std::array<std::pair<std::string_view, DocumentOrder>, 2> k_orders{
    {{"instruction_first", DocumentOrder::InstructionFirst}, {"document_first", DocumentOrder::DocumentFirst}}};
constexpr std::array<std::pair<std::string_view, MockMode>, 5> k_mock_modes{{{"exact", MockMode::ExactN},
                                                                              {"offset", MockMode::Offset},
                                                                              {"scale", MockMode::Scale},
                                                                              {"verbose", MockMode::Verbose},
                                                                              {"judge", MockMode::Judge}}};

template <class Enum, std::size_t N>
std::string enum_name(Enum value, const std::array<std::pair<std::string_view, Enum>, N>& names) {
  for (const auto& [name, e] : names) {
    if (e == value) return std::string(name);
  }
  return {};
}

}  // namespace

std::int64_t estimate_tokens(std::string_view text) noexcept {
  return static_cast<std::int64_t>((utf8::code_points(text) + 3) / 4);
}

ModelEndpoint mock_model(MockSettings settings, std::string id) {
  ModelEndpoint endpoint;
  endpoint.id = std::move(id);
  endpoint.style = RequestStyle::Mock;
  endpoint.mock = settings;
  return endpoint;
}

std::unique_ptr<Model> make_model(const ModelEndpoint& endpoint) {
  if (endpoint.style == RequestStyle::Mock) return std::make_unique<MockModel>(endpoint);
  return std::make_unique<ChatCompletionsModel>(endpoint);
}

ModelResponse generate(const ModelEndpoint& endpoint, const RenderedPrompt& prompt, const Attachment* document) {
  GenerateRequest request;
  request.prompt = prompt.text;
  request.target_words = prompt.target_words;
  request.document = document;
  return make_model(endpoint)->generate(request);
}

json build_chat_request(const ModelEndpoint& endpoint, const GenerateRequest& request) {
  json content;
  const Attachment* doc = request.document;
  const bool doc_first = endpoint.document_order == DocumentOrder::DocumentFirst;
  if (doc == nullptr) {
    content = request.prompt;
  } else if (endpoint.attachment_mode == AttachmentMode::InlineText) {
    if (!doc->is_text) {
      throw Error(ErrorKind::InvalidArgument, "binary document '" + doc->filename + "' needs attachment_mode file_part");
    }
    content = doc_first ? doc->data + "\n\n" + request.prompt : request.prompt + "\n\n" + doc->data;
  } else {
    json instruction = {{"type", "text"}, {"text", request.prompt}};
    json file = {{"type", "file"},
                 {"file",
                  {{"filename", doc->filename},
                   {"file_data", "data:" + doc->mime_type + ";base64," + httplib::detail::base64_encode(doc->data)}}}};
    content = doc_first ? json::array({file, instruction}) : json::array({instruction, file});
  }

  json body = {{"model", endpoint.model.empty() ? endpoint.id : endpoint.model},
               {"messages", json::array({{{"role", "user"}, {"content", content}}})}};
  body["temperature"] = request.temperature.value_or(endpoint.temperature.value_or(k_default_temperature));
  if (endpoint.max_output_tokens) {
    body["max_tokens"] = *endpoint.max_output_tokens;
  } else if (request.target_words > 0) {
    body["max_tokens"] = default_max_output_tokens(request.target_words);
  }
  return body;
}

ModelResponse parse_chat_response(std::string_view body) {
  const json j = json::parse(body, nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw ProviderError(200, "response is not JSON: " + excerpt(body));
  ModelResponse response;
  try {
    const auto& message = j.at("choices").at(0).at("message");
    const auto& content = message.at("content");
    if (content.is_string()) {
      response.text = content.get<std::string>();
    } else if (content.is_array()) {
      for (const auto& part : content) {
        if (part.is_object() && part.value("type", "") == "text") response.text += part.value("text", "");
      }
    } else {
      throw ProviderError(200, "message content is null");
    }
  } catch (const json::exception&) {
    throw ProviderError(200, "response has no choices[0].message.content: " + excerpt(body));
  }
  response.tokens_estimated = true;
  if (j.contains("usage") && j["usage"].is_object()) {
    const auto& usage = j["usage"];
    const auto in = usage.contains("prompt_tokens") ? usage["prompt_tokens"] : usage.value("input_tokens", json());
    const auto out =
        usage.contains("completion_tokens") ? usage["completion_tokens"] : usage.value("output_tokens", json());
    if (in.is_number_integer() && out.is_number_integer()) {
      response.input_tokens = in.get<std::int64_t>();
      response.output_tokens = out.get<std::int64_t>();
      response.tokens_estimated = false;
    }
  }
  return response;
}

ModelEndpoint endpoint_from_json(const json& j) {
  if (!j.is_object()) throw Error(ErrorKind::InvalidPlan, "endpoint must be an object");
  try {
    ModelEndpoint e;
    e.id = j.at("id").get<std::string>();
    if (e.id.empty()) throw Error(ErrorKind::InvalidPlan, "endpoint id is empty");
    if (!j.contains("style")) throw Error(ErrorKind::InvalidPlan, "endpoint '" + e.id + "' has no style");
    e.style = enum_field(j, "style", RequestStyle::Mock, k_styles);
    e.base_url = j.value("base_url", "");
    e.model = j.value("model", "");
    e.api_key_env = j.value("api_key_env", "");
    if (j.contains("temperature") && !j["temperature"].is_null()) e.temperature = j["temperature"].get<double>();
    if (j.contains("max_output_tokens") && !j["max_output_tokens"].is_null()) {
      e.max_output_tokens = j["max_output_tokens"].get<int>();
    }
    e.attachment_mode = enum_field(j, "attachment_mode", AttachmentMode::InlineText, k_attachment_modes);
    e.document_order = enum_field(j, "document_order", DocumentOrder::InstructionFirst, k_orders);
    if (j.contains("headers")) e.headers = j["headers"].get<std::map<std::string, std::string>>();
    e.timeout_ms = j.value("timeout_ms", e.timeout_ms);
    if (j.contains("retry")) {
      const auto& r = j["retry"];
      e.retry.max_retries = r.value("max_retries", e.retry.max_retries);
      e.retry.initial_backoff_ms = r.value("initial_backoff_ms", e.retry.initial_backoff_ms);
      e.retry.max_backoff_ms = r.value("max_backoff_ms", e.retry.max_backoff_ms);
    }
    if (j.contains("mock")) {
      const auto& m = j["mock"];
      e.mock.mode = enum_field(m, "mode", MockMode::ExactN, k_mock_modes);
      e.mock.offset = m.value("offset", 0);
      e.mock.factor = m.value("factor", 1.0);
      e.mock.judge_score = m.value("score", 0.9);
      e.mock.seed = m.value("seed", std::uint64_t{0});
    }
    if (e.style == RequestStyle::ChatCompletions) {
      if (e.base_url.empty()) throw Error(ErrorKind::InvalidPlan, "endpoint '" + e.id + "' needs base_url");
      if (e.api_key_env.empty()) throw Error(ErrorKind::InvalidPlan, "endpoint '" + e.id + "' needs api_key_env");
    }
    if (e.timeout_ms <= 0 || e.retry.max_retries < 0 || e.retry.initial_backoff_ms < 0 || e.retry.max_backoff_ms < 0) {
      throw Error(ErrorKind::InvalidPlan, "endpoint '" + e.id + "' has negative timing settings");
    }
    return e;
  } catch (const json::exception& ex) {
    throw Error(ErrorKind::InvalidPlan, std::string("malformed endpoint: ") + ex.what());
  }
}

json endpoint_to_json(const ModelEndpoint& e) {
  json j = {{"id", e.id}, {"style", enum_name(e.style, k_styles)}};
  if (e.style == RequestStyle::ChatCompletions) {
    j["base_url"] = e.base_url;
    j["model"] = e.model;
    j["api_key_env"] = e.api_key_env;
    j["attachment_mode"] = enum_name(e.attachment_mode, k_attachment_modes);
    j["document_order"] = enum_name(e.document_order, k_orders);
    j["timeout_ms"] = e.timeout_ms;
    j["retry"] = {{"max_retries", e.retry.max_retries},
                  {"initial_backoff_ms", e.retry.initial_backoff_ms},
                  {"max_backoff_ms", e.retry.max_backoff_ms}};
    if (!e.headers.empty()) j["headers"] = e.headers;
  } else {
    j["mock"] = {{"mode", enum_name(e.mock.mode, k_mock_modes)},
                 {"offset", e.mock.offset},
                 {"factor", e.mock.factor},
                 {"score", e.mock.judge_score},
                 {"seed", e.mock.seed}};
  }
  if (e.temperature) j["temperature"] = *e.temperature;
  if (e.max_output_tokens) j["max_output_tokens"] = *e.max_output_tokens;
  return j;
}

}  // namespace lengthctl
