#pragma once

#include "arabiq/core/types.hpp"
#include "arabiq/gateway/chat.hpp"

#include <chrono>
#include <filesystem>
#include <functional>
#include <memory>
#include <string>
#include <unordered_map>

namespace arabiq::gateway {

/// One attempt, no retries.
class Provider {
public:
  virtual ~Provider() = default;
  virtual ChatResponse complete(const ChatRequest& req) = 0;
};

/// JSONL of {"key": ..., "response_text": ...}; keys must be unique.
class MockFixtures {
public:
  static MockFixtures load(const std::filesystem::path& path);
  static MockFixtures from_map(std::unordered_map<std::string, std::string> m);

  [[nodiscard]] const std::string* find(const std::string& key) const;
  [[nodiscard]] std::size_t size() const noexcept { return entries_.size(); }

private:
  std::unordered_map<std::string, std::string> entries_;
};

/// Looks up mock_key(request), then request.fallback_key. Throws
/// Error(MockFixtureMissing) when neither is present.
class MockProvider : public Provider {
public:
  explicit MockProvider(std::shared_ptr<const MockFixtures> fixtures);
  ChatResponse complete(const ChatRequest& req) override;

private:
  std::shared_ptr<const MockFixtures> fixtures_;
};

using EnvLookup = std::function<std::optional<std::string>(const std::string&)>;

EnvLookup process_env();

/// POST {endpoint_url}/chat/completions with a bearer token read from the
/// environment variable named by api_key_env.
class OpenAiCompatibleProvider : public Provider {
public:
  OpenAiCompatibleProvider(ProviderProfile profile, std::shared_ptr<HttpClient> http, EnvLookup env = process_env());
  ChatResponse complete(const ChatRequest& req) override;

private:
  ProviderProfile profile_;
  std::shared_ptr<HttpClient> http_;
  EnvLookup env_;
};

struct RetryPolicy {
  std::chrono::milliseconds base{500};
  double factor = 2.0;
  std::function<void(std::chrono::milliseconds)> sleep;  // defaults to this_thread::sleep_for
  std::function<double()> uniform01;                     // jitter source in [0,1)
};

/// Timeouts, 429 and 5xx are retryable; everything else is final.
bool is_retryable(const std::exception& e) noexcept;

/// Up to 1 + profile.max_retries attempts. Before retry k (0-based) sleeps a
/// uniform draw from [0, base * factor^k] (full jitter). Rethrows the last
/// failure.
ChatResponse execute_with_retry(const ChatRequest& req, const ProviderProfile& profile, Provider& provider,
                                const RetryPolicy& policy = {});

}  // namespace arabiq::gateway
