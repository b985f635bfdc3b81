#include "arabiq/service/service.hpp"

#include "support/fixtures.hpp"
#include "support/mock_book.hpp"

#include <gtest/gtest.h>

#include <thread>

using namespace arabiq;
using nlohmann::json;
namespace fx = arabiq::fixtures;

namespace {

constexpr const char* kToken = "s3cret";

class ServiceTest : public ::testing::Test {
protected:
  void SetUp() override {
    store = std::make_unique<store::Store>(dir / "store");
    images = fx::seed_images(*store, 87, 56, 68);
    const auto path = dir / "mock.jsonl";
    vision = fx::mock_profile("vision", path);
    quiz = fx::mock_profile("quizgen", path);

    fx::MockBook book;
    // images[0]: sample block; images[1]: unusable quiz text; images[2]: no fixtures.
    book.describe(images[0], vision, PromptCondition::Prompted, "desc-zero: a boy writes in a blue book");
    book.quiz("desc-zero: a boy writes in a blue book", 2, fx::sample_block_text());
    book.describe(images[1], vision, PromptCondition::Prompted, "desc-one: an empty room");
    book.quiz("desc-one: an empty room", 2, "Sorry, I can't see any objects to ask about.");
    book.write(path);

    gateway::Gateway::Options o;
    o.load_image = pipeline::blob_loader(*store);
    gw = std::make_unique<gateway::Gateway>(o);
    pipe = std::make_unique<pipeline::Pipeline>(*store, *gw);
    service::ServiceConfig cfg;
    cfg.profiles = {vision, quiz};
    cfg.default_vision_profile = "vision";
    cfg.default_quiz_profile = "quizgen";
    cfg.admin_token = kToken;
    svc = std::make_unique<service::Service>(*store, *pipe, cfg);
    port = svc->bind_any_port();
    ASSERT_GT(port, 0);
    thread = std::thread([this] { svc->listen_after_bind(); });
    svc->server().wait_until_ready();
    client = std::make_unique<httplib::Client>("127.0.0.1", port);
    client->set_read_timeout(10, 0);
  }

  void TearDown() override {
    svc->stop();
    thread.join();
  }

  httplib::Result post(const std::string& path, const json& body, const httplib::Headers& h = {}) {
    return client->Post(path, h, body.dump(), "application/json");
  }

  std::string new_session() {
    auto r = post("/api/sessions", json::object());
    return json::parse(r->body)["session_id"];
  }

  json quizset(const Ulid& image_id, int expect_status = 200) {
    auto r = post("/api/images/" + image_id + "/quizset", {{"n", 2}});
    EXPECT_EQ(r->status, expect_status) << r->body;
    return json::parse(r->body);
  }

  fx::TempDir dir{"service"};
  std::unique_ptr<store::Store> store;
  std::vector<ImageRecord> images;
  ProviderProfile vision;
  ProviderProfile quiz;
  std::unique_ptr<gateway::Gateway> gw;
  std::unique_ptr<pipeline::Pipeline> pipe;
  std::unique_ptr<service::Service> svc;
  std::unique_ptr<httplib::Client> client;
  std::thread thread;
  int port = 0;
};

}  // namespace

TEST(Allowlist, HostMatching) {
  EXPECT_EQ(service::url_host("https://Images.Unsplash.com/photo-1?w=3"), "images.unsplash.com");
  EXPECT_EQ(service::url_host("http://user@unsplash.com:8080/x"), "unsplash.com");
  EXPECT_EQ(service::url_host("ftp://unsplash.com/x"), "");
  const std::vector<std::string> allow{"unsplash.com"};
  EXPECT_TRUE(service::host_allowed("unsplash.com", allow));
  EXPECT_TRUE(service::host_allowed("images.unsplash.com", allow));
  EXPECT_FALSE(service::host_allowed("notunsplash.com", allow));
  EXPECT_FALSE(service::host_allowed("unsplash.com.evil.org", allow));
}

TEST_F(ServiceTest, SessionsAndImages) {
  auto r = post("/api/sessions", {{"native_language", "fr"}});
  ASSERT_EQ(r->status, 201);
  EXPECT_EQ(json::parse(r->body)["native_language"], "fr");

  r = post("/api/images", {{"url", "https://images.unsplash.com/photo-new"}});
  ASSERT_EQ(r->status, 201) << r->body;
  const json img = json::parse(r->body);
  EXPECT_EQ(img["complexity"], "moderate");
  EXPECT_EQ(img["source"], "url");

  r = post("/api/images", {{"url", "https://images.unsplash.com/photo-new"}});
  EXPECT_EQ(r->status, 409);
  EXPECT_EQ(json::parse(r->body)["image_id"], img["id"]);

  r = post("/api/images", {{"url", "https://example.org/cat.png"}});
  EXPECT_EQ(r->status, 400);
  EXPECT_EQ(json::parse(r->body)["error"], "UrlNotAllowed");
  r = client->Post("/api/images", "{not json", "application/json");
  EXPECT_EQ(r->status, 400);
  r = post("/api/images", {{"url", "https://unsplash.com/a"}, {"complexity", "hard"}});
  EXPECT_EQ(r->status, 400);
}

TEST_F(ServiceTest, ListByComplexity) {
  auto r = client->Get("/api/images?complexity=simple");
  ASSERT_EQ(r->status, 200);
  EXPECT_EQ(json::parse(r->body).size(), 87u);
  EXPECT_EQ(json::parse(client->Get("/api/images?complexity=moderate")->body).size(), 56u);
  EXPECT_EQ(json::parse(client->Get("/api/images?complexity=complex")->body).size(), 68u);
  EXPECT_EQ(json::parse(client->Get("/api/images")->body).size(), 211u);
  EXPECT_EQ(client->Get("/api/images?complexity=huge")->status, 400);

  r = client->Get("/api/images/random?complexity=complex&seed=5");
  ASSERT_EQ(r->status, 200);
  EXPECT_EQ(json::parse(r->body)["complexity"], "complex");
  EXPECT_EQ(json::parse(client->Get("/api/images/random?complexity=complex&seed=5")->body)["id"],
            json::parse(r->body)["id"]);
}

TEST_F(ServiceTest, MultipartUploadAndSizeLimit) {
  httplib::MultipartFormDataItems small{{"file", std::string("\x89PNG\r\n\x1a\n", 8) + "pixels", "cat.png", "image/png"},
                                        {"complexity", "simple", "", ""}};
  auto r = client->Post("/api/images", small);
  ASSERT_EQ(r->status, 201) << r->body;
  const json img = json::parse(r->body);
  EXPECT_EQ(img["source"], "upload");
  EXPECT_EQ(img["complexity"], "simple");
  EXPECT_TRUE(store->has_blob(img["sha256"].get<std::string>()));
  EXPECT_EQ(client->Post("/api/images", small)->status, 409);

  httplib::MultipartFormDataItems big{
      {"file", std::string(service::kMaxUploadBytes + 1, 'x'), "big.jpg", "image/jpeg"}};
  r = client->Post("/api/images", big);
  EXPECT_EQ(r->status, 413);
}

TEST_F(ServiceTest, QuizSetIsConcealed) {
  const json view = quizset(images[0].id);
  const std::string body = view.dump();
  ASSERT_EQ(view["quizzes"].size(), 2u);
  for (const auto& q : view["quizzes"]) EXPECT_EQ(q["options"].size(), 4u);
  EXPECT_EQ(body.find("declared_correct"), std::string::npos);
  EXPECT_EQ(body.find("correct"), std::string::npos);
  EXPECT_EQ(body.find("desc-zero"), std::string::npos);
}

TEST_F(ServiceTest, QuizSetErrors) {
  EXPECT_EQ(quizset("01JBX0000000000000000000ZZ", 404)["error"], "UnknownImage");
  const json rejected = quizset(images[1].id, 409);
  EXPECT_EQ(rejected["error"], "AllQuizzesRejected");
  EXPECT_NE(rejected["summary"].get<std::string>().find("NO_QUESTIONS"), std::string::npos);
  EXPECT_EQ(quizset(images[2].id, 502)["error"], "MockFixtureMissing");
  auto r = post("/api/images/" + images[0].id + "/quizset", {{"quiz_profile", "nobody"}});
  EXPECT_EQ(r->status, 400);
  r = post("/api/images/" + images[0].id + "/quizset", {{"n", 0}});
  EXPECT_EQ(r->status, 400);
}

TEST_F(ServiceTest, AnswersFeedbackAndProgress) {
  const json view = quizset(images[0].id);
  const std::string q1 = view["quizzes"][0]["id"];
  const std::string q2 = view["quizzes"][1]["id"];
  const std::string s = new_session();

  auto r = post("/api/quizzes/" + q1 + "/answer", {{"session_id", s}, {"label", "a"}});
  ASSERT_EQ(r->status, 200) << r->body;
  const json fb = json::parse(r->body);
  EXPECT_EQ(fb["is_correct"], true);

  r = post("/api/quizzes/" + q2 + "/answer", {{"session_id", s}, {"label", "c"}});
  const json wrong = json::parse(r->body);
  EXPECT_EQ(wrong["is_correct"], false);
  EXPECT_EQ(wrong["correct_label"], "b");
  EXPECT_EQ(wrong["correct_text_ar"], "أَزْرَقُ");

  // Same (session, quiz) again with a different label: first answer stands.
  r = post("/api/quizzes/" + q2 + "/answer", {{"session_id", s}, {"label", "b"}});
  EXPECT_EQ(r->status, 200);
  EXPECT_EQ(json::parse(r->body), wrong);

  EXPECT_EQ(post("/api/quizzes/" + q1 + "/answer", {{"session_id", s}, {"label", "e"}})->status, 422);
  EXPECT_EQ(post("/api/quizzes/" + q1 + "/answer", {{"session_id", s}, {"label", 3}})->status, 422);
  EXPECT_EQ(post("/api/quizzes/01JBX0000000000000000000ZZ/answer", {{"session_id", s}, {"label", "a"}})->status,
            404);

  r = client->Get("/api/sessions/" + s + "/progress");
  ASSERT_EQ(r->status, 200);
  const json prog = json::parse(r->body);
  EXPECT_EQ(prog["attempts"], 2);
  EXPECT_EQ(prog["correct"], 1);
  EXPECT_EQ(client->Get("/api/sessions/01JBX0000000000000000000ZZ/progress")->status, 404);
}

TEST_F(ServiceTest, AdminEndpointsNeedToken) {
  const json view = quizset(images[0].id);
  const std::string q1 = view["quizzes"][0]["id"];
  EXPECT_EQ(client->Get("/api/quizzes/" + q1 + "/full")->status, 401);
  EXPECT_EQ(client->Get("/api/quizzes/" + q1 + "/full", {{"X-Admin-Token", "wrong"}})->status, 401);
  auto r = client->Get("/api/quizzes/" + q1 + "/full", {{"X-Admin-Token", kToken}});
  ASSERT_EQ(r->status, 200);
  const json full = json::parse(r->body);
  EXPECT_EQ(full["quiz"]["declared_correct"], "a");
  EXPECT_EQ(full["lint_report"]["pass"], true);
  EXPECT_EQ(full["delivered"], true);

  EXPECT_EQ(client->Get("/api/reports/rates")->status, 401);
  AnnotationRecord a;
  a.subject_type = SubjectType::Quiz;
  a.subject_id = q1;
  a.annotator_id = "ann1";
  a.score = 8;
  a.verdict_correct_answer = true;
  store->put(a);
  r = client->Get("/api/reports/rates", {{"X-Admin-Token", kToken}});
  ASSERT_EQ(r->status, 200) << r->body;
  EXPECT_NE(r->body.find("| simple | 1 | 1 | 100.00 |"), std::string::npos);
  r = client->Get("/api/reports/dist?format=csv", {{"X-Admin-Token", kToken}});
  ASSERT_EQ(r->status, 200);
  EXPECT_EQ(r->body.rfind("model_id,", 0), 0u);
  EXPECT_EQ(client->Get("/api/reports/dist?bins=0,5,5,10", {{"X-Admin-Token", kToken}})->status, 422);
  EXPECT_EQ(client->Get("/api/reports/nope", {{"X-Admin-Token", kToken}})->status, 404);
}

TEST_F(ServiceTest, ConcealmentAcrossLearnerResponses) {
  // Every learner-facing body before an attempt: no description text, no answer fields.
  std::vector<std::string> bodies;
  const json view = quizset(images[0].id);
  bodies.push_back(view.dump());
  bodies.push_back(client->Get("/api/images")->body);
  bodies.push_back(client->Get("/api/images/" + images[0].id)->body);
  const std::string s = new_session();
  bodies.push_back(client->Get("/api/sessions/" + s + "/progress")->body);
  for (const auto& b : bodies) {
    EXPECT_EQ(b.find("desc-zero"), std::string::npos);
    EXPECT_EQ(b.find("declared_correct"), std::string::npos);
    EXPECT_EQ(b.find("correct_label"), std::string::npos);
    EXPECT_EQ(b.find("correct_text_ar"), std::string::npos);
  }
}

TEST_F(ServiceTest, ConcurrentDoubleSubmitRecordsOneAttempt) {
  const json view = quizset(images[0].id);
  const std::string q1 = view["quizzes"][0]["id"];
  const std::string s = new_session();
  std::vector<std::thread> ts;
  std::vector<std::string> bodies(6);
  for (int i = 0; i < 6; ++i) {
    ts.emplace_back([&, i] {
      httplib::Client c("127.0.0.1", port);
      auto r = c.Post("/api/quizzes/" + q1 + "/answer", json{{"session_id", s}, {"label", i % 2 ? "a" : "d"}}.dump(),
                      "application/json");
      bodies[static_cast<std::size_t>(i)] = r ? r->body : "";
    });
  }
  for (auto& t : ts) t.join();
  for (const auto& b : bodies) EXPECT_EQ(b, bodies[0]);
  EXPECT_EQ(store->list_attempts().size(), 1u);
}

TEST_F(ServiceTest, OpenApiListsEndpoints) {
  auto r = client->Get("/api/openapi.json");
  ASSERT_EQ(r->status, 200);
  const json doc = json::parse(r->body);
  for (const char* p : {"/api/sessions", "/api/images", "/api/images/{id}/quizset", "/api/quizzes/{id}/answer",
                        "/api/sessions/{id}/progress", "/api/quizzes/{id}/full", "/api/reports/{kind}"}) {
    EXPECT_TRUE(doc["paths"].contains(p)) << p;
  }
  EXPECT_EQ(client->Get("/api/nothing-here")->status, 404);
}
