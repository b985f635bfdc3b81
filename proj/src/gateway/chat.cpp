#include "arabiq/gateway/chat.hpp"

#include "arabiq/core/ids.hpp"

#include <algorithm>

namespace arabiq::gateway {

using nlohmann::json;

void validate_request(const ChatRequest& req, bool vision) {
  const auto images = std::count_if(req.messages.begin(), req.messages.end(),
                                    [](const ChatMessage& m) { return m.image.has_value(); });
  if (images > 1) {
    throw Error(Errc::InvalidArgument, "at most one image per request");
  }
  if (vision && images == 0) {
    throw Error(Errc::InvalidArgument, "vision request without an image");
  }
  if (req.messages.empty()) {
    throw Error(Errc::InvalidArgument, "request has no messages");
  }
  if (req.temperature < 0.0 || req.temperature > 2.0 || req.max_tokens <= 0) {
    throw Error(Errc::InvalidArgument, "temperature or max_tokens out of range");
  }
}

std::string prompt_text(const ChatRequest& req) {
  std::string out;
  for (const auto& m : req.messages) {
    if (m.role != Role::User) continue;
    if (!out.empty()) out += "\n";
    out += m.text;
  }
  return out;
}

std::string mock_key(std::string_view prompt, std::string_view subject_digest, std::string_view model_name) {
  std::string material;
  material.reserve(prompt.size() + subject_digest.size() + model_name.size() + 2);
  material.append(prompt).append("|").append(subject_digest).append("|").append(model_name);
  return sha256_hex(std::string_view(material));
}

std::string sniff_media_type(std::string_view b) {
  if (b.size() >= 8 && b.substr(0, 8) == std::string_view("\x89PNG\r\n\x1a\n", 8)) return "image/png";
  if (b.size() >= 3 && b.substr(0, 3) == "\xFF\xD8\xFF") return "image/jpeg";
  if (b.size() >= 6 && (b.substr(0, 6) == "GIF87a" || b.substr(0, 6) == "GIF89a")) return "image/gif";
  if (b.size() >= 12 && b.substr(0, 4) == "RIFF" && b.substr(8, 4) == "WEBP") return "image/webp";
  return "image/jpeg";
}

json to_openai_json(const ChatRequest& req) {
  json messages = json::array();
  for (const auto& m : req.messages) {
    json msg;
    msg["role"] = m.role == Role::System ? "system" : "user";
    if (!m.image) {
      msg["content"] = m.text;
    } else {
      const std::string url = m.image->url.empty()
                                  ? "data:" + m.image->media_type + ";base64," + base64_encode(m.image->bytes)
                                  : m.image->url;
      msg["content"] = json::array({
          {{"type", "text"}, {"text", m.text}},
          {{"type", "image_url"}, {"image_url", {{"url", url}}}},
      });
    }
    messages.push_back(std::move(msg));
  }
  return {{"model", req.model_name},
          {"messages", std::move(messages)},
          {"temperature", req.temperature},
          {"max_tokens", req.max_tokens}};
}

ChatResponse from_openai_json(const json& body, std::int64_t latency_ms) {
  ChatResponse r;
  r.provider_latency_ms = latency_ms;
  const auto choices = body.find("choices");
  if (choices == body.end() || !choices->is_array() || choices->empty()) {
    throw Error(Errc::EmptyResponse, "response has no choices");
  }
  const json& c = choices->at(0);
  if (const auto fr = c.find("finish_reason"); fr != c.end() && fr->is_string()) {
    r.raw_finish_reason = fr->get<std::string>();
  }
  if (const auto msg = c.find("message"); msg != c.end()) {
    if (const auto content = msg->find("content"); content != msg->end() && content->is_string()) {
      r.text = content->get<std::string>();
    }
  }
  return r;
}

}  // namespace arabiq::gateway
