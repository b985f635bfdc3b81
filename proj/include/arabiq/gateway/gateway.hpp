#pragma once

#include "arabiq/core/types.hpp"
#include "arabiq/gateway/chat.hpp"
#include "arabiq/gateway/prompts.hpp"
#include "arabiq/gateway/provider.hpp"

#include <condition_variable>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

namespace arabiq::gateway {

inline constexpr double kDescribeTemperature = 0.2;
inline constexpr double kQuizTemperature = 0.7;

/// Returns the raw bytes of an uploaded image; throws on failure.
using ImageLoader = std::function<std::string(const ImageRecord&)>;

/// {"profiles": [ProviderProfile...]}. Relative fixtures_path values are
/// resolved against the config file's directory.
std::vector<ProviderProfile> load_profiles(const std::filesystem::path& path);

const ProviderProfile& find_profile(const std::vector<ProviderProfile>& profiles, std::string_view profile_id);

/// Counting semaphore that records the highest concurrent holder count.
class InFlightGate {
public:
  explicit InFlightGate(int limit) : limit_(limit < 1 ? 1 : limit) {}

  void acquire();
  void release();
  [[nodiscard]] int peak() const;

private:
  int limit_;
  int in_flight_ = 0;
  int peak_ = 0;
  mutable std::mutex mu_;
  std::condition_variable cv_;
};

/// Thread-safe. Providers and mock fixture files are created once per
/// profile_id and reused.
class Gateway {
public:
  using ProviderFactory = std::function<std::shared_ptr<Provider>(const ProviderProfile&)>;

  struct Options {
    std::shared_ptr<HttpClient> http;  // default: make_http_client()
    RetryPolicy retry;
    EnvLookup env;                     // default: process_env()
    ImageLoader load_image;            // needed for Upload images
    ProviderFactory provider_factory;  // overrides the modality-based choice
  };

  Gateway();
  explicit Gateway(Options opts);

  ChatResponse execute(const ChatRequest& req, const ProviderProfile& profile);

  Description describe_image(const ImageRecord& img, const ProviderProfile& profile, PromptCondition condition,
                             const PromptTemplate& tmpl);

  std::string generate_quiz_text(const Description& d, const ProviderProfile& profile, int n_questions,
                                 const PromptTemplate& tmpl);

  /// Highest number of simultaneous requests seen for the profile so far.
  [[nodiscard]] int peak_in_flight(const std::string& profile_id) const;

private:
  struct Slot {
    std::shared_ptr<Provider> provider;
    std::unique_ptr<InFlightGate> gate;
  };

  Slot& slot_for(const ProviderProfile& profile);

  Options opts_;
  mutable std::mutex mu_;
  std::map<std::string, Slot> slots_;
  std::map<std::string, std::shared_ptr<const MockFixtures>> fixture_cache_;
};

}  // namespace arabiq::gateway
