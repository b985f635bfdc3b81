#pragma once

#include "arabiq/core/error.hpp"

#include <json.hpp>

#include <chrono>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace arabiq::gateway {

enum class Role { System, User };

// Either inline bytes (sent as a data URL) or a remote https URL.
struct ImageAttachment {
  std::string bytes;
  std::string media_type;
  std::string url;
};

struct ChatMessage {
  Role role = Role::User;
  std::string text;
  std::optional<ImageAttachment> image;
};

struct ChatRequest {
  std::string model_name;
  std::vector<ChatMessage> messages;
  double temperature = 0.2;
  int max_tokens = 1024;

  // Mock addressing only; never sent over the wire. subject_digest is the
  // image sha256 or sha256 of the description text.
  std::string subject_digest;
  std::string fallback_key;
};

struct ChatResponse {
  std::string text;
  std::int64_t provider_latency_ms = 0;
  std::string raw_finish_reason;
};

/// Non-2xx provider answer. Status 0 means the connection itself failed.
class ProviderHttpError : public Error {
public:
  ProviderHttpError(int status, const std::string& message)
      : Error(Errc::ProviderHttp, message), status_(status) {}

  [[nodiscard]] int status() const noexcept { return status_; }

private:
  int status_;
};

/// Throws Error(InvalidArgument) on more than one image, or on a missing
/// image when `vision` is set.
void validate_request(const ChatRequest& req, bool vision);

/// All user-message texts joined by "\n"; this is what mock keys hash.
std::string prompt_text(const ChatRequest& req);

/// sha256(prompt + "|" + subject_digest + "|" + model_name).
std::string mock_key(std::string_view prompt, std::string_view subject_digest, std::string_view model_name);

/// Guesses the media type from magic bytes; image/jpeg when unknown.
std::string sniff_media_type(std::string_view bytes);

nlohmann::json to_openai_json(const ChatRequest& req);
ChatResponse from_openai_json(const nlohmann::json& body, std::int64_t latency_ms);

struct HttpResponse {
  int status = 0;
  std::string body;
};

using Headers = std::vector<std::pair<std::string, std::string>>;

/// Minimal blocking client. Implementations throw Error(ProviderTimeout) on
/// timeout and ProviderHttpError(0) on connection failure.
class HttpClient {
public:
  virtual ~HttpClient() = default;
  virtual HttpResponse post_json(const std::string& url, const std::string& body, const Headers& headers,
                                 std::chrono::milliseconds timeout) = 0;
};

std::shared_ptr<HttpClient> make_http_client();

}  // namespace arabiq::gateway
