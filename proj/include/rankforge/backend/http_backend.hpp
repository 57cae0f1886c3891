#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rankforge/backend/backend.hpp"
#include "rankforge/backend/retry.hpp"

namespace rankforge::backend {

inline constexpr const char* kDefaultApiKeyEnv = "RANKFORGE_API_KEY";

struct BackendConfig {
  std::string base_url;  // e.g. http://localhost:8000 ; requests go to {base_url}/v1/chat/completions
  std::string model;
  std::string api_key_env = kDefaultApiKeyEnv;
  double temperature = 0.0;
  double timeout_seconds = 60.0;
  int max_retries = 3;
  std::size_t max_in_flight = 4;
  BackoffPolicy backoff;

  void validate() const;
};

struct ChatUsage {
  std::optional<std::int64_t> prompt_tokens;
  std::optional<std::int64_t> completion_tokens;
};

struct ChatResult {
  std::string text;
  ChatUsage usage;
  int attempts = 0;
};

// {"model", "messages": [{"role","content"}], "temperature"}
std::string chat_request_body(const BackendConfig& config, const std::vector<Message>& messages);

// Reads choices[0].message.content and usage.{prompt,completion}_tokens.
// Throws BackendError on a body that does not have that shape.
ChatResult parse_chat_response(const std::string& body);

// One chat-completions exchange with retries on 429/5xx and transport
// failures. 401/403 throw CredentialError immediately; other 4xx throw
// BackendError without retrying. When the final failure was a timeout a
// TimeoutError is thrown.
ChatResult chat_complete(const BackendConfig& config, const std::vector<Message>& messages,
                         const std::string& api_key);

// Chat-completions client shared by all served and hosted models.
class HttpBackend : public Backend {
 public:
  // Reads the API key from the environment variable named in the config;
  // throws CredentialError naming the variable when it is unset or empty.
  explicit HttpBackend(BackendConfig config);

  InferenceInvocation invoke(const prompt::RenderedPrompt& prompt) override;
  std::string name() const override { return "http:" + config_.model; }

  const BackendConfig& config() const { return config_; }

 private:
  BackendConfig config_;
  std::string api_key_;
  InFlightLimiter limiter_;
};

}  // namespace rankforge::backend
