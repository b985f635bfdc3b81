#include "arabiq/service/service.hpp"

#include "arabiq/core/ids.hpp"
#include "arabiq/core/json.hpp"
#include "arabiq/core/text.hpp"
#include "arabiq/core/time.hpp"
#include "arabiq/eval/eval.hpp"
#include "arabiq/gateway/gateway.hpp"

#include <algorithm>
#include <cstdlib>
#include <random>
#include <sstream>

namespace arabiq::service {

using nlohmann::json;

namespace {

constexpr const char* kJson = "application/json";

void send_json(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), kJson);
}

void send_error(httplib::Response& res, int status, std::string_view code, const std::string& message,
                json extra = json::object()) {
  extra["error"] = std::string(code);
  extra["message"] = message;
  send_json(res, status, extra);
}

void send_error(httplib::Response& res, const Error& e) {
  send_error(res, http_status(e.code()), to_string(e.code()), e.what());
}

json parse_body(const httplib::Request& req) {
  if (text::trim(req.body).empty()) return json::object();
  json j = json::parse(req.body, nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw Error(Errc::MalformedInput, "request body is not a JSON object");
  return j;
}

std::string str_field(const json& j, const char* key) {
  const auto it = j.find(key);
  if (it == j.end() || it->is_null()) return {};
  if (!it->is_string()) throw Error(Errc::MalformedInput, std::string(key) + " must be a string");
  return it->get<std::string>();
}

std::optional<Complexity> complexity_param(const std::string& s) {
  if (s.empty()) return std::nullopt;
  const auto c = parse_complexity(s);
  if (!c) throw Error(Errc::MalformedInput, "unknown complexity '" + s + "'");
  return c;
}

// Runs a handler, turning library errors into JSON error bodies.
template <typename F>
httplib::Server::Handler guarded(F f) {
  return [f](const httplib::Request& req, httplib::Response& res) {
    try {
      f(req, res);
    } catch (const pipeline::AllRejectedError& e) {
      send_error(res, 409, to_string(e.code()), e.what(),
                 {{"quiz_set_id", e.quiz_set().id}, {"summary", pipeline::rejection_summary(e.quiz_set())}});
    } catch (const Error& e) {
      send_error(res, e);
    } catch (const json::exception& e) {
      send_error(res, 400, "MalformedInput", e.what());
    }
  };
}

std::vector<double> parse_bins(const std::string& s) {
  if (s.empty()) return eval::kDefaultBins;
  std::vector<double> out;
  std::stringstream ss(s);
  std::string part;
  while (std::getline(ss, part, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(part, &used));
      if (used != part.size()) throw std::invalid_argument(part);
    } catch (const std::exception&) {
      throw Error(Errc::BadBins, "bin edge '" + part + "' is not a number");
    }
  }
  return out;
}

}  // namespace

int http_status(Errc code) noexcept {
  switch (code) {
    case Errc::InvalidArgument:
    case Errc::MalformedInput:
    case Errc::MissingVar:
    case Errc::InvalidQuiz:
    case Errc::NoArabicLetters:
      return 400;
    case Errc::NotFound:
    case Errc::UnknownQuiz:
    case Errc::UnknownSession:
    case Errc::UnknownImage:
      return 404;
    case Errc::DuplicateSha:
    case Errc::AllQuizzesRejected:
    case Errc::QuizNotDelivered:
      return 409;
    case Errc::InvalidLabel:
    case Errc::EmptyInput:
    case Errc::MissingVerdict:
    case Errc::MissingGroup:
    case Errc::BadBins:
      return 422;
    case Errc::ProviderTimeout:
    case Errc::ProviderHttp:
    case Errc::EmptyResponse:
    case Errc::ImageFetchFailed:
    case Errc::MockFixtureMissing:
      return 502;
    case Errc::ConfigError:
    case Errc::SchemaMismatch:
    case Errc::StoreIo:
      return 500;
  }
  return 500;
}

std::string url_host(std::string_view url) {
  std::string_view rest;
  if (url.substr(0, 8) == "https://") {
    rest = url.substr(8);
  } else if (url.substr(0, 7) == "http://") {
    rest = url.substr(7);
  } else {
    return {};
  }
  rest = rest.substr(0, rest.find_first_of("/?#"));
  if (const auto at = rest.rfind('@'); at != std::string_view::npos) rest = rest.substr(at + 1);
  rest = rest.substr(0, rest.find(':'));
  std::string host(rest);
  std::transform(host.begin(), host.end(), host.begin(), [](unsigned char c) { return std::tolower(c); });
  return host;
}

bool host_allowed(std::string_view host, const std::vector<std::string>& allowlist) {
  if (host.empty()) return false;
  for (const auto& allowed : allowlist) {
    if (host == allowed) return true;
    if (host.size() > allowed.size() && host.substr(host.size() - allowed.size()) == allowed &&
        host[host.size() - allowed.size() - 1] == '.') {
      return true;
    }
  }
  return false;
}

ServiceConfig config_from_env(std::vector<ProviderProfile> profiles) {
  ServiceConfig cfg;
  cfg.profiles = std::move(profiles);
  if (const char* t = std::getenv("ARABIQ_ADMIN_TOKEN")) cfg.admin_token = t;
  return cfg;
}

Service::Service(store::Store& store, pipeline::Pipeline& pipe, ServiceConfig cfg)
    : store_(store), pipe_(pipe), cfg_(std::move(cfg)) {
  // Leave room for multipart framing so the size check below sees the file.
  server_.set_payload_max_length(cfg_.max_upload_bytes + 1024 * 1024);
  server_.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
    std::string what = "internal error";
    try {
      std::rethrow_exception(ep);
    } catch (const std::exception& e) {
      what = e.what();
    } catch (...) {
    }
    send_error(res, 500, "Internal", what);
  });
  server_.set_error_handler([](const httplib::Request&, httplib::Response& res) {
    if (res.body.empty()) {
      const char* code = res.status == 413 ? "PayloadTooLarge" : res.status == 404 ? "NotFound" : "HttpError";
      send_error(res, res.status, code, httplib::status_message(res.status));
    }
  });
  install_routes();
}

int Service::bind_any_port(const std::string& host) { return server_.bind_to_any_port(host); }
bool Service::bind(const std::string& host, int port) { return server_.bind_to_port(host, port); }
bool Service::listen_after_bind() { return server_.listen_after_bind(); }
void Service::stop() { server_.stop(); }

bool Service::admin_ok(const httplib::Request& req) const {
  return !cfg_.admin_token.empty() && req.get_header_value("X-Admin-Token") == cfg_.admin_token;
}

const ProviderProfile& Service::profile_or_default(const json& body, const char* key, bool vision) const {
  std::string id = str_field(body, key);
  if (id.empty()) id = vision ? cfg_.default_vision_profile : cfg_.default_quiz_profile;
  if (!id.empty()) {
    for (const auto& p : cfg_.profiles) {
      if (p.profile_id == id) return p;
    }
    throw Error(Errc::InvalidArgument, "unknown profile '" + id + "'");
  }
  for (const auto& p : cfg_.profiles) {
    const bool fits = p.modality == Modality::Mock || p.modality == (vision ? Modality::Vision : Modality::Text);
    if (fits) return p;
  }
  throw Error(Errc::InvalidArgument, std::string("no ") + (vision ? "vision" : "quiz") + " profile configured");
}

void Service::install_routes() {
  auto& s = server_;

  s.Get("/api/openapi.json", [](const httplib::Request&, httplib::Response& res) {
    send_json(res, 200, openapi_document());
  });

  s.Post("/api/sessions", guarded([this](const httplib::Request& req, httplib::Response& res) {
           const json body = parse_body(req);
           const Session sess = pipe_.create_session(str_field(body, "native_language"));
           send_json(res, 201, {{"session_id", sess.session_id}, {"native_language", sess.native_language}});
         }));

  s.Post("/api/images", guarded([this](const httplib::Request& req, httplib::Response& res) {
           ImageRecord img;
           img.id = new_ulid();
           img.created_at = now_utc();
           std::string bytes;
           std::string complexity;
           if (req.is_multipart_form_data()) {
             if (!req.has_file("file")) throw Error(Errc::MalformedInput, "multipart body needs a 'file' part");
             const auto file = req.get_file_value("file");
             if (file.content.size() > cfg_.max_upload_bytes) {
               send_error(res, 413, "PayloadTooLarge",
                          "image is " + std::to_string(file.content.size()) + " bytes; limit is " +
                              std::to_string(cfg_.max_upload_bytes));
               return;
             }
             if (file.content.empty()) throw Error(Errc::MalformedInput, "empty file");
             if (req.has_file("complexity")) complexity = req.get_file_value("complexity").content;
             bytes = file.content;
             img.source = ImageSource::Upload;
             img.locator = file.filename.empty() ? "upload" : file.filename;
             img.sha256 = sha256_hex(std::string_view(bytes));
           } else {
             const json body = parse_body(req);
             const std::string url = str_field(body, "url");
             if (url.empty()) throw Error(Errc::MalformedInput, "body needs 'url' or a multipart 'file'");
             const std::string host = url_host(url);
             if (host.empty()) throw Error(Errc::MalformedInput, "url must be http(s)");
             if (!host_allowed(host, cfg_.url_allowlist)) {
               send_error(res, 400, "UrlNotAllowed", "host " + host + " is not on the allowlist");
               return;
             }
             complexity = str_field(body, "complexity");
             img.source = ImageSource::Url;
             img.locator = url;
             img.sha256 = sha256_hex(std::string_view(url));
           }
           img.complexity = complexity_param(complexity).value_or(Complexity::Moderate);
           if (const auto existing = store_.find_image_by_sha(img.sha256)) {
             send_error(res, 409, "DuplicateSha", "image already stored", {{"image_id", existing->id}});
             return;
           }
           if (!bytes.empty()) store_.put_blob(bytes);
           store_.put(img);
           send_json(res, 201, img);
         }));

  s.Get("/api/images", guarded([this](const httplib::Request& req, httplib::Response& res) {
          store::Filter f;
          f.complexity = complexity_param(req.get_param_value("complexity"));
          send_json(res, 200, store_.list_images(f));
        }));

  s.Get("/api/images/random", guarded([this](const httplib::Request& req, httplib::Response& res) {
          store::Filter f;
          f.complexity = complexity_param(req.get_param_value("complexity"));
          std::uint64_t seed = std::random_device{}();
          if (req.has_param("seed")) {
            try {
              seed = std::stoull(req.get_param_value("seed"));
            } catch (const std::exception&) {
              throw Error(Errc::MalformedInput, "seed must be an unsigned integer");
            }
          }
          const auto img = pipe_.random_image(f, seed);
          if (!img) throw Error(Errc::NotFound, "no images match");
          send_json(res, 200, *img);
        }));

  s.Get("/api/images/:id", guarded([this](const httplib::Request& req, httplib::Response& res) {
          send_json(res, 200, store_.get_image(req.path_params.at("id")));
        }));

  s.Post("/api/images/:id/quizset", guarded([this](const httplib::Request& req, httplib::Response& res) {
           const json body = parse_body(req);
           const Ulid image_id = req.path_params.at("id");
           try {
             (void)store_.get_image(image_id);
           } catch (const Error&) {
             throw Error(Errc::UnknownImage, image_id);
           }
           const ProviderProfile& vision = profile_or_default(body, "vision_profile", true);
           const ProviderProfile& quiz = profile_or_default(body, "quiz_profile", false);
           PromptCondition cond = PromptCondition::Prompted;
           if (const std::string c = str_field(body, "condition"); !c.empty()) {
             const auto parsed = parse_condition(c);
             if (!parsed) throw Error(Errc::MalformedInput, "condition must be prompted or bare");
             cond = *parsed;
           }
           int n = pipeline::kDefaultQuestions;
           if (body.contains("n")) {
             if (!body["n"].is_number_integer() || body["n"].get<int>() < 1) {
               throw Error(Errc::MalformedInput, "n must be a positive integer");
             }
             n = body["n"].get<int>();
           }
           const QuizSet set = pipe_.run_vision_quiz(image_id, vision, quiz, cond, n);
           send_json(res, 200, pipeline::learner_view(set, store_));
         }));

  s.Post("/api/quizzes/:id/answer", guarded([this](const httplib::Request& req, httplib::Response& res) {
           const json body = parse_body(req);
           const std::string session_id = str_field(body, "session_id");
           if (session_id.empty()) throw Error(Errc::MalformedInput, "session_id is required");
           std::string label;
           try {
             label = str_field(body, "label");
           } catch (const Error&) {
             throw Error(Errc::InvalidLabel, "label must be one of a, b, c, d");
           }
           if (label.size() != 1) throw Error(Errc::InvalidLabel, "label must be one of a, b, c, d");
           const Feedback fb = pipe_.submit_answer(session_id, req.path_params.at("id"), label[0]);
           send_json(res, 200, fb);
         }));

  s.Get("/api/sessions/:id/progress", guarded([this](const httplib::Request& req, httplib::Response& res) {
          const Ulid id = req.path_params.at("id");
          try {
            (void)store_.get_session(id);
          } catch (const Error&) {
            throw Error(Errc::UnknownSession, id);
          }
          store::Filter f;
          f.session_id = id;
          json items = json::array();
          int correct = 0;
          const auto attempts = store_.list_attempts(f);
          for (const auto& a : attempts) {
            correct += a.is_correct ? 1 : 0;
            items.push_back(
                {{"quiz_id", a.quiz_id}, {"chosen_label", std::string(1, a.chosen_label)}, {"is_correct", a.is_correct}});
          }
          send_json(res, 200,
                    {{"session_id", id}, {"attempts", attempts.size()}, {"correct", correct}, {"items", items}});
        }));

  auto admin = [this](auto handler) {
    return guarded([this, handler](const httplib::Request& req, httplib::Response& res) {
      if (!admin_ok(req)) {
        send_error(res, 401, "Unauthorized", "missing or wrong X-Admin-Token");
        return;
      }
      handler(req, res);
    });
  };

  s.Get("/api/quizzes/:id/full", admin([this](const httplib::Request& req, httplib::Response& res) {
          const Ulid id = req.path_params.at("id");
          Quiz q;
          try {
            q = store_.get_quiz(id);
          } catch (const Error&) {
            throw Error(Errc::UnknownQuiz, id);
          }
          json body{{"quiz", q}, {"delivered", store_.delivering_quiz_set(id).has_value()}};
          try {
            body["lint_report"] = store_.get_lint_report(id);
          } catch (const Error&) {
            body["lint_report"] = nullptr;
          }
          body["description"] = store_.get_description(q.description_id).text;
          send_json(res, 200, body);
        }));

  s.Get("/api/reports/:kind", admin([this](const httplib::Request& req, httplib::Response& res) {
          const std::string kind = req.path_params.at("kind");
          const std::string fmt = req.get_param_value("format");
          if (!fmt.empty() && fmt != "md" && fmt != "csv") throw Error(Errc::MalformedInput, "format is md or csv");
          const auto format = fmt == "csv" ? eval::ReportFormat::Csv : eval::ReportFormat::Markdown;
          const auto records = store_.list_annotations();
          const auto catalog = pipeline::store_catalog(store_);
          std::string out;
          if (kind == "rates") {
            out = eval::render(eval::correct_answer_rates(records, catalog), format);
          } else if (kind == "aggregate") {
            out = eval::render(eval::aggregate_all(records), format);
          } else if (kind == "compare") {
            const std::string a = req.get_param_value("a");
            const std::string b = req.get_param_value("b");
            if (a.empty() || b.empty()) throw Error(Errc::MalformedInput, "compare needs a and b");
            out = eval::render(eval::compare_models(eval::aggregate_all(records), catalog, a, b), format);
          } else if (kind == "dist") {
            out = eval::render(eval::distribution(eval::aggregate_all(records), catalog,
                                                  parse_bins(req.get_param_value("bins"))),
                               format);
          } else {
            throw Error(Errc::NotFound, "unknown report '" + kind + "'");
          }
          res.status = 200;
          res.set_content(out, format == eval::ReportFormat::Csv ? "text/csv; charset=utf-8"
                                                                 : "text/markdown; charset=utf-8");
        }));
}

const json& openapi_document() {
  static const json doc = [] {
    auto op = [](const char* summary, std::vector<int> codes) {
      json responses = json::object();
      for (int c : codes) responses[std::to_string(c)] = {{"description", httplib::status_message(c)}};
      return json{{"summary", summary}, {"responses", responses}};
    };
    auto id_param = [](const char* name) {
      return json::array({{{"name", name}, {"in", "path"}, {"required", true}, {"schema", {{"type", "string"}}}}});
    };
    auto admin_header = json{{"name", "X-Admin-Token"}, {"in", "header"}, {"required", true},
                             {"schema", {{"type", "string"}}}};
    json paths;
    paths["/api/sessions"]["post"] = op("Create an anonymous learner session", {201, 400});
    paths["/api/images"]["post"] =
        op("Add an image by allowlisted URL (JSON {url, complexity}) or multipart 'file' (max 10 MiB)",
           {201, 400, 409, 413});
    paths["/api/images"]["get"] = op("List images, optionally ?complexity=simple|moderate|complex", {200, 400});
    paths["/api/images/random"]["get"] = op("Pick a random image (?complexity=, ?seed=)", {200, 404});
    paths["/api/images/{id}"]["get"] = op("One image record", {200, 404});
    paths["/api/images/{id}"]["get"]["parameters"] = id_param("id");
    paths["/api/images/{id}/quizset"]["post"] =
        op("Generate a quiz set {vision_profile, quiz_profile, condition, n}; returns stems and options only",
           {200, 400, 404, 409, 502});
    paths["/api/images/{id}/quizset"]["post"]["parameters"] = id_param("id");
    paths["/api/quizzes/{id}/answer"]["post"] =
        op("Answer {session_id, label}; repeated answers return the first feedback", {200, 400, 404, 409, 422});
    paths["/api/quizzes/{id}/answer"]["post"]["parameters"] = id_param("id");
    paths["/api/sessions/{id}/progress"]["get"] = op("Attempts and correct count for a session", {200, 404});
    paths["/api/sessions/{id}/progress"]["get"]["parameters"] = id_param("id");
    paths["/api/quizzes/{id}/full"]["get"] = op("Admin: quiz with answer, lint report and description", {200, 401, 404});
    paths["/api/quizzes/{id}/full"]["get"]["parameters"] = json::array({id_param("id")[0], admin_header});
    paths["/api/reports/{kind}"]["get"] =
        op("Admin: rates | aggregate | compare?a=&b= | dist?bins=, ?format=md|csv", {200, 400, 401, 404, 422});
    paths["/api/reports/{kind}"]["get"]["parameters"] = json::array({id_param("kind")[0], admin_header});
    paths["/api/openapi.json"]["get"] = op("This document", {200});
    return json{{"openapi", "3.0.3"},
                {"info", {{"title", "arabiq learner API"}, {"version", "1.0.0"}}},
                {"paths", paths}};
  }();
  return doc;
}

}  // namespace arabiq::service
