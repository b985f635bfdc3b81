#include "arabiq/gateway/gateway.hpp"

#include "arabiq/core/ids.hpp"
#include "arabiq/core/json.hpp"
#include "arabiq/core/text.hpp"
#include "arabiq/core/time.hpp"

#include <fstream>

namespace arabiq::gateway {

using nlohmann::json;

std::vector<ProviderProfile> load_profiles(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(Errc::ConfigError, "cannot read provider config " + path.string());
  }
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw Error(Errc::ConfigError, path.string() + ": " + e.what());
  }
  if (!doc.contains("profiles") || !doc["profiles"].is_array()) {
    throw Error(Errc::ConfigError, path.string() + ": expected {\"profiles\": [...]}");
  }
  std::vector<ProviderProfile> out;
  for (const auto& p : doc["profiles"]) {
    ProviderProfile profile;
    try {
      profile = p.get<ProviderProfile>();
    } catch (const std::exception& e) {
      throw Error(Errc::ConfigError, path.string() + ": " + e.what());
    }
    if (!profile.fixtures_path.empty() && std::filesystem::path(profile.fixtures_path).is_relative()) {
      profile.fixtures_path = (path.parent_path() / profile.fixtures_path).lexically_normal().string();
    }
    out.push_back(std::move(profile));
  }
  return out;
}

const ProviderProfile& find_profile(const std::vector<ProviderProfile>& profiles, std::string_view profile_id) {
  for (const auto& p : profiles) {
    if (p.profile_id == profile_id) return p;
  }
  throw Error(Errc::ConfigError, "unknown provider profile " + std::string(profile_id));
}

void InFlightGate::acquire() {
  std::unique_lock lock(mu_);
  cv_.wait(lock, [&] { return in_flight_ < limit_; });
  ++in_flight_;
  peak_ = std::max(peak_, in_flight_);
}

void InFlightGate::release() {
  {
    std::lock_guard lock(mu_);
    --in_flight_;
  }
  cv_.notify_one();
}

int InFlightGate::peak() const {
  std::lock_guard lock(mu_);
  return peak_;
}

Gateway::Gateway() : Gateway(Options{}) {}

Gateway::Gateway(Options opts) : opts_(std::move(opts)) {
  if (!opts_.env) opts_.env = process_env();
}

Gateway::Slot& Gateway::slot_for(const ProviderProfile& profile) {
  std::lock_guard lock(mu_);
  auto it = slots_.find(profile.profile_id);
  if (it != slots_.end()) {
    return it->second;
  }
  Slot slot;
  slot.gate = std::make_unique<InFlightGate>(profile.max_parallel);
  if (opts_.provider_factory) {
    slot.provider = opts_.provider_factory(profile);
  } else if (profile.modality == Modality::Mock) {
    auto& cached = fixture_cache_[profile.fixtures_path];
    if (!cached) {
      if (profile.fixtures_path.empty()) {
        throw Error(Errc::ConfigError, "mock profile " + profile.profile_id + " has no fixtures_path");
      }
      cached = std::make_shared<const MockFixtures>(MockFixtures::load(profile.fixtures_path));
    }
    slot.provider = std::make_shared<MockProvider>(cached);
  } else {
    if (!opts_.http) opts_.http = make_http_client();
    slot.provider = std::make_shared<OpenAiCompatibleProvider>(profile, opts_.http, opts_.env);
  }
  return slots_.emplace(profile.profile_id, std::move(slot)).first->second;
}

ChatResponse Gateway::execute(const ChatRequest& req, const ProviderProfile& profile) {
  Slot& slot = slot_for(profile);
  slot.gate->acquire();
  struct Release {
    InFlightGate& g;
    ~Release() { g.release(); }
  } release{*slot.gate};
  return execute_with_retry(req, profile, *slot.provider, opts_.retry);
}

Description Gateway::describe_image(const ImageRecord& img, const ProviderProfile& profile, PromptCondition condition,
                                    const PromptTemplate& tmpl) {
  if (profile.modality != Modality::Vision && profile.modality != Modality::Mock) {
    throw Error(Errc::InvalidArgument, "profile " + profile.profile_id + " cannot describe images");
  }
  ChatMessage msg;
  msg.text = condition == PromptCondition::Bare ? std::string(kBarePrompt) : render_prompt(tmpl, {});

  ImageAttachment att;
  if (img.source == ImageSource::Url) {
    att.url = img.locator;
  } else {
    if (!opts_.load_image) {
      throw Error(Errc::ImageFetchFailed, "no image loader configured for " + img.id);
    }
    try {
      att.bytes = opts_.load_image(img);
    } catch (const std::exception& e) {
      throw Error(Errc::ImageFetchFailed, "cannot load image " + img.id + ": " + e.what());
    }
    att.media_type = sniff_media_type(att.bytes);
  }
  msg.image = std::move(att);

  ChatRequest req;
  req.model_name = profile.model_name;
  req.temperature = kDescribeTemperature;
  req.messages.push_back(std::move(msg));
  req.subject_digest = img.sha256;
  validate_request(req, true);

  const ChatResponse res = execute(req, profile);
  std::string out = text::trim(res.text);
  if (out.empty()) {
    throw Error(Errc::EmptyResponse, "empty description from " + profile.profile_id +
                                         " (finish_reason " + res.raw_finish_reason + ")");
  }
  Description d;
  d.id = new_ulid();
  d.image_id = img.id;
  d.model_id = profile.profile_id;
  d.condition = condition;
  d.text = std::move(out);
  d.created_at = now_utc();
  return d;
}

std::string Gateway::generate_quiz_text(const Description& d, const ProviderProfile& profile, int n_questions,
                                        const PromptTemplate& tmpl) {
  if (n_questions < 1) {
    throw Error(Errc::InvalidArgument, "n_questions must be at least 1");
  }
  if (profile.modality != Modality::Text && profile.modality != Modality::Mock) {
    throw Error(Errc::InvalidArgument, "profile " + profile.profile_id + " cannot generate quizzes");
  }
  ChatRequest req;
  req.model_name = profile.model_name;
  req.temperature = kQuizTemperature;
  req.messages.push_back({Role::User,
                          render_prompt(tmpl, {{"description", d.text}, {"n_questions", number_word(n_questions)}}),
                          std::nullopt});
  const std::string description_sha = sha256_hex(std::string_view(d.text));
  req.subject_digest = description_sha;
  req.fallback_key = description_sha + ":" + std::to_string(n_questions);
  validate_request(req, false);

  ChatResponse res = execute(req, profile);
  if (text::trim(res.text).empty()) {
    throw Error(Errc::EmptyResponse, "empty quiz text from " + profile.profile_id);
  }
  return std::move(res.text);
}

int Gateway::peak_in_flight(const std::string& profile_id) const {
  std::lock_guard lock(mu_);
  const auto it = slots_.find(profile_id);
  return it == slots_.end() ? 0 : it->second.gate->peak();
}

}  // namespace arabiq::gateway
