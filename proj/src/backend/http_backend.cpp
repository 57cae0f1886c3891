#include "rankforge/backend/http_backend.hpp"

#include <chrono>
#include <cstdlib>
#include <random>
#include <thread>

#include "httplib.h"
#include "rankforge/core/error.hpp"
#include "rankforge/prompt/tokens.hpp"
#include "rankforge/util/hash.hpp"

namespace rankforge::backend {

namespace {

struct Endpoint {
  std::string origin;  // scheme://host[:port]
  std::string path;    // full request path
};

Endpoint resolve(const std::string& base_url) {
  std::string url = base_url;
  if (url.find("://") == std::string::npos) url = "http://" + url;
  const auto host_begin = url.find("://") + 3;
  const auto slash = url.find('/', host_begin);
  Endpoint ep;
  ep.origin = url.substr(0, slash);
  std::string prefix = slash == std::string::npos ? "" : url.substr(slash);
  while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
  ep.path = prefix + "/v1/chat/completions";
  return ep;
}

double jitter_unit() {
  thread_local std::mt19937_64 rng{std::random_device{}()};
  return util::unit(rng);
}

}  // namespace

void BackendConfig::validate() const {
  if (base_url.empty()) throw ConfigError("http backend needs a base_url");
  if (model.empty()) throw ConfigError("http backend needs a model name");
  if (!(temperature >= 0.0)) throw ConfigError("temperature must be >= 0");
  if (max_retries < 0) throw ConfigError("max retries must be >= 0");
  if (max_in_flight < 1) throw ConfigError("max in-flight requests must be >= 1");
  if (!(timeout_seconds > 0.0)) throw ConfigError("request timeout must be positive");
}

std::string chat_request_body(const BackendConfig& config, const std::vector<Message>& messages) {
  Json msgs = Json::array();
  for (const auto& m : messages) msgs.push_back({{"role", m.role}, {"content", m.content}});
  return Json{{"model", config.model}, {"messages", std::move(msgs)},
              {"temperature", config.temperature}}
      .dump();
}

ChatResult parse_chat_response(const std::string& body) {
  ChatResult out;
  try {
    Json j = Json::parse(body);
    const Json& content = j.at("choices").at(0).at("message").at("content");
    out.text = content.is_null() ? std::string() : content.get<std::string>();
    if (auto u = j.find("usage"); u != j.end() && u->is_object()) {
      if (auto p = u->find("prompt_tokens"); p != u->end() && p->is_number_integer()) {
        out.usage.prompt_tokens = p->get<std::int64_t>();
      }
      if (auto c = u->find("completion_tokens"); c != u->end() && c->is_number_integer()) {
        out.usage.completion_tokens = c->get<std::int64_t>();
      }
    }
  } catch (const Json::exception& e) {
    throw BackendError(std::string("unexpected chat-completions response: ") + e.what(), 1);
  }
  return out;
}

ChatResult chat_complete(const BackendConfig& config, const std::vector<Message>& messages,
                         const std::string& api_key) {
  const Endpoint ep = resolve(config.base_url);
  const std::string body = chat_request_body(config, messages);
  httplib::Headers headers;
  if (!api_key.empty()) headers.emplace("Authorization", "Bearer " + api_key);

  const auto timeout = std::chrono::duration<double>(config.timeout_seconds);
  const auto timeout_us = std::chrono::duration_cast<std::chrono::microseconds>(timeout);
  const int max_attempts = config.max_retries + 1;
  std::string last_error;
  bool last_was_timeout = false;

  for (int attempt = 1; attempt <= max_attempts; ++attempt) {
    if (attempt > 1) {
      std::this_thread::sleep_for(backoff_delay(config.backoff, attempt - 1, jitter_unit()));
    }
    httplib::Client client(ep.origin);
    client.set_connection_timeout(timeout_us);
    client.set_read_timeout(timeout_us);
    client.set_write_timeout(timeout_us);
    const auto started = std::chrono::steady_clock::now();
    auto res = client.Post(ep.path, headers, body, "application/json");
    const auto elapsed = std::chrono::steady_clock::now() - started;

    if (!res) {
      last_was_timeout = res.error() == httplib::Error::ConnectionTimeout ||
                         elapsed >= std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                                        timeout * 0.9);
      last_error = "transport error: " + httplib::to_string(res.error());
      continue;
    }
    const int status = res->status;
    if (status == 401 || status == 403) {
      throw CredentialError("chat-completions endpoint rejected the credentials (HTTP " +
                            std::to_string(status) + "); check $" + config.api_key_env);
    }
    if (status >= 200 && status < 300) {
      ChatResult out = parse_chat_response(res->body);
      out.attempts = attempt;
      return out;
    }
    last_was_timeout = false;
    last_error = "HTTP " + std::to_string(status);
    if (!is_retryable_status(status)) throw BackendError(last_error, attempt);
  }
  if (last_was_timeout) throw TimeoutError("request timed out: " + last_error, max_attempts);
  throw BackendError(last_error, max_attempts);
}

HttpBackend::HttpBackend(BackendConfig config)
    : config_(std::move(config)), limiter_(config_.max_in_flight) {
  config_.validate();
  const char* key = std::getenv(config_.api_key_env.c_str());
  if (key == nullptr || *key == '\0') {
    throw CredentialError("environment variable " + config_.api_key_env +
                          " is not set; it must hold the API key");
  }
  api_key_ = key;
}

InferenceInvocation HttpBackend::invoke(const prompt::RenderedPrompt& prompt) {
  if (prompt.messages.empty()) throw ValidationError("empty prompt");
  ChatResult result;
  {
    InFlightLimiter::Slot slot(limiter_);
    result = chat_complete(config_, prompt.messages, api_key_);
  }
  InferenceInvocation inv;
  inv.prompt = prompt.messages;
  inv.kind = prompt.kind;
  inv.response = std::move(result.text);
  inv.input_token_count =
      result.usage.prompt_tokens.value_or(prompt::estimate_message_tokens(prompt.messages));
  inv.output_token_count =
      result.usage.completion_tokens.value_or(prompt::estimate_tokens(inv.response));
  return inv;
}

}  // namespace rankforge::backend
