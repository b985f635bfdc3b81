#pragma once

#include "arabiq/core/error.hpp"
#include "arabiq/core/types.hpp"
#include "arabiq/pipeline/pipeline.hpp"
#include "arabiq/store/store.hpp"

#include <httplib.h>
#include <json.hpp>

#include <cstddef>
#include <string>
#include <vector>

namespace arabiq::service {

inline constexpr std::size_t kMaxUploadBytes = 10 * 1024 * 1024;

struct ServiceConfig {
  std::vector<ProviderProfile> profiles;
  std::string default_vision_profile;  // empty: first Vision or Mock profile
  std::string default_quiz_profile;    // empty: first Text or Mock profile
  // Hosts (and their subdomains) accepted for URL images.
  std::vector<std::string> url_allowlist{"unsplash.com"};
  std::size_t max_upload_bytes = kMaxUploadBytes;
  // Admin endpoints answer 401 to everyone while this is empty.
  std::string admin_token;
};

/// Reads ARABIQ_ADMIN_TOKEN; everything else keeps its default.
ServiceConfig config_from_env(std::vector<ProviderProfile> profiles);

int http_status(Errc code) noexcept;

/// Host part of an http(s) URL, lower-cased; empty when the URL is not one.
std::string url_host(std::string_view url);
bool host_allowed(std::string_view host, const std::vector<std::string>& allowlist);

const nlohmann::json& openapi_document();

/// Route table over a pipeline. Handlers are stateless; the store and
/// pipeline carry the synchronization.
class Service {
public:
  Service(store::Store& store, pipeline::Pipeline& pipe, ServiceConfig cfg);

  [[nodiscard]] httplib::Server& server() noexcept { return server_; }

  /// Binds to a free port on host and returns it.
  int bind_any_port(const std::string& host = "127.0.0.1");
  bool bind(const std::string& host, int port);
  /// Blocks until stop().
  bool listen_after_bind();
  void stop();

private:
  void install_routes();
  const ProviderProfile& profile_or_default(const nlohmann::json& body, const char* key, bool vision) const;
  [[nodiscard]] bool admin_ok(const httplib::Request& req) const;

  store::Store& store_;
  pipeline::Pipeline& pipe_;
  ServiceConfig cfg_;
  httplib::Server server_;
};

}  // namespace arabiq::service
