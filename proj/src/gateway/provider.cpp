#include "arabiq/gateway/provider.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <random>
#include <thread>

namespace arabiq::gateway {

using nlohmann::json;

MockFixtures MockFixtures::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(Errc::ConfigError, "cannot read mock fixtures " + path.string());
  }
  MockFixtures f;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw Error(Errc::ConfigError, path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
    if (!j.contains("key") || !j.contains("response_text") || !j["key"].is_string() ||
        !j["response_text"].is_string()) {
      throw Error(Errc::ConfigError, path.string() + ":" + std::to_string(line_no) + ": needs key and response_text");
    }
    auto key = j["key"].get<std::string>();
    if (!f.entries_.emplace(key, j["response_text"].get<std::string>()).second) {
      throw Error(Errc::ConfigError, path.string() + ":" + std::to_string(line_no) + ": duplicate key " + key);
    }
  }
  return f;
}

MockFixtures MockFixtures::from_map(std::unordered_map<std::string, std::string> m) {
  MockFixtures f;
  f.entries_ = std::move(m);
  return f;
}

const std::string* MockFixtures::find(const std::string& key) const {
  const auto it = entries_.find(key);
  return it == entries_.end() ? nullptr : &it->second;
}

MockProvider::MockProvider(std::shared_ptr<const MockFixtures> fixtures) : fixtures_(std::move(fixtures)) {}

ChatResponse MockProvider::complete(const ChatRequest& req) {
  const std::string key = mock_key(prompt_text(req), req.subject_digest, req.model_name);
  const std::string* text = fixtures_->find(key);
  if (text == nullptr && !req.fallback_key.empty()) {
    text = fixtures_->find(req.fallback_key);
  }
  if (text == nullptr) {
    throw Error(Errc::MockFixtureMissing, "no mock fixture for key " + key);
  }
  return {*text, 0, "stop"};
}

EnvLookup process_env() {
  return [](const std::string& name) -> std::optional<std::string> {
    if (const char* v = std::getenv(name.c_str())) return std::string(v);
    return std::nullopt;
  };
}

OpenAiCompatibleProvider::OpenAiCompatibleProvider(ProviderProfile profile, std::shared_ptr<HttpClient> http,
                                                   EnvLookup env)
    : profile_(std::move(profile)), http_(std::move(http)), env_(std::move(env)) {}

ChatResponse OpenAiCompatibleProvider::complete(const ChatRequest& req) {
  Headers headers;
  if (!profile_.api_key_env.empty()) {
    const auto key = env_(profile_.api_key_env);
    if (!key || key->empty()) {
      throw Error(Errc::ConfigError, "environment variable " + profile_.api_key_env + " is not set");
    }
    headers.emplace_back("Authorization", "Bearer " + *key);
  }
  std::string url = profile_.endpoint_url;
  while (!url.empty() && url.back() == '/') url.pop_back();
  url += "/chat/completions";

  const auto start = std::chrono::steady_clock::now();
  const HttpResponse res =
      http_->post_json(url, to_openai_json(req).dump(), headers, std::chrono::milliseconds(profile_.timeout_ms));
  const auto latency =
      std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start).count();
  if (res.status < 200 || res.status >= 300) {
    throw ProviderHttpError(res.status, "provider " + profile_.profile_id + " returned HTTP " +
                                            std::to_string(res.status));
  }
  json body;
  try {
    body = json::parse(res.body);
  } catch (const json::exception&) {
    throw ProviderHttpError(res.status, "provider " + profile_.profile_id + " returned non-JSON body");
  }
  return from_openai_json(body, latency);
}

bool is_retryable(const std::exception& e) noexcept {
  if (const auto* http = dynamic_cast<const ProviderHttpError*>(&e)) {
    return http->status() == 429 || http->status() >= 500;
  }
  if (const auto* err = dynamic_cast<const Error*>(&e)) {
    return err->code() == Errc::ProviderTimeout;
  }
  return false;
}

ChatResponse execute_with_retry(const ChatRequest& req, const ProviderProfile& profile, Provider& provider,
                                const RetryPolicy& policy) {
  const int attempts = 1 + std::max(0, profile.max_retries);
  for (int attempt = 0;; ++attempt) {
    try {
      return provider.complete(req);
    } catch (const std::exception& e) {
      if (attempt + 1 >= attempts || !is_retryable(e)) {
        throw;
      }
    }
    const double cap = static_cast<double>(policy.base.count()) * std::pow(policy.factor, attempt);
    double u = 0.0;
    if (policy.uniform01) {
      u = policy.uniform01();
    } else {
      thread_local std::mt19937_64 rng{std::random_device{}()};
      u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    }
    const std::chrono::milliseconds delay(static_cast<std::int64_t>(cap * u));
    if (policy.sleep) {
      policy.sleep(delay);
    } else {
      std::this_thread::sleep_for(delay);
    }
  }
}

}  // namespace arabiq::gateway
