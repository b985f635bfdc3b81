#include "arabiq/gateway/chat.hpp"

#include <httplib.h>

namespace arabiq::gateway {

namespace {

struct SplitUrl {
  std::string origin;  // scheme://host[:port]
  std::string path;
};

SplitUrl split_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    throw Error(Errc::ConfigError, "endpoint is not an absolute URL: " + url);
  }
  const auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) {
    return {url, "/"};
  }
  return {url.substr(0, path_start), url.substr(path_start)};
}

class HttplibClient : public HttpClient {
public:
  HttpResponse post_json(const std::string& url, const std::string& body, const Headers& headers,
                         std::chrono::milliseconds timeout) override {
    const SplitUrl parts = split_url(url);
    httplib::Client cli(parts.origin);
    const auto secs = std::chrono::duration_cast<std::chrono::seconds>(timeout);
    const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(timeout - secs);
    cli.set_connection_timeout(secs.count(), usecs.count());
    cli.set_read_timeout(secs.count(), usecs.count());
    cli.set_write_timeout(secs.count(), usecs.count());

    httplib::Headers h;
    for (const auto& [k, v] : headers) h.emplace(k, v);
    auto res = cli.Post(parts.path, h, body, "application/json");
    if (!res) {
      const auto err = res.error();
      if (err == httplib::Error::ConnectionTimeout || err == httplib::Error::Read ||
          err == httplib::Error::Write) {
        throw Error(Errc::ProviderTimeout, "request to " + parts.origin + " timed out");
      }
      throw ProviderHttpError(0, "request to " + parts.origin + " failed: " + httplib::to_string(err));
    }
    return {res->status, res->body};
  }
};

}  // namespace

std::shared_ptr<HttpClient> make_http_client() { return std::make_shared<HttplibClient>(); }

}  // namespace arabiq::gateway
