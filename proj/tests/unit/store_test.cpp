#include "arabiq/core/error.hpp"
#include "arabiq/core/ids.hpp"
#include "arabiq/core/time.hpp"
#include "arabiq/store/manifest.hpp"
#include "arabiq/store/store.hpp"

#include "support/fixtures.hpp"

#include <gtest/gtest.h>
#include <json.hpp>

#include <unistd.h>

using namespace arabiq;
using namespace arabiq::store;
using fixtures::TempDir;

namespace {

Timestamp ts(int64_t ms) { return Timestamp(std::chrono::milliseconds(ms)); }

ImageRecord image(Complexity c, const std::string& seed) {
  return {new_ulid(), ImageSource::Url, "https://images.unsplash.com/" + seed,
          sha256_hex(std::string_view(seed)), c, ts(1700000000000)};
}

Quiz quiz_for(const ImageRecord& img, const std::string& model, int ordinal = 1) {
  Quiz q = fixtures::sample_quiz1();
  q.id = new_ulid();
  q.image_id = img.id;
  q.description_id = new_ulid();
  q.model_id = model;
  q.ordinal = ordinal;
  return q;
}

std::size_t line_count(const std::filesystem::path& p) {
  const std::string s = fixtures::read_file(p);
  return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n'));
}

void chop_bytes(const std::filesystem::path& p, std::size_t n) {
  const auto size = std::filesystem::file_size(p);
  std::filesystem::resize_file(p, size - n);
}

}  // namespace

TEST(Store, PutGetRoundTrip) {
  TempDir dir("store_rt");
  const ImageRecord img = image(Complexity::Simple, "a");
  const Description d{new_ulid(), img.id, "gemma", PromptCondition::Bare, "A red book.", ts(5)};
  const Quiz q = quiz_for(img, "gemma");
  LintReport r;
  r.quiz_id = q.id;
  r.diacritic_coverage = {{'a', 1.0}, {'b', 1.0}, {'c', 1.0}, {'d', 1.0}};
  QuizSet set{new_ulid(), img.id, d.id, "gemma", {q.id}, {}, {}, ts(6)};
  const Session s{new_ulid(), "en", ts(7)};
  const AttemptRecord a{new_ulid(), s.session_id, q.id, 'a', true, ts(8)};
  const AnnotationRecord ann{SubjectType::Quiz, q.id, "ann-1", 5, true, std::string("fine")};
  {
    Store st(dir.path());
    st.put(img);
    st.put(d);
    st.put(q);
    st.put(r);
    st.put(set);
    st.put(s);
    st.put(a);
    st.put(ann);
    EXPECT_EQ(st.get_image(img.id), img);
    EXPECT_EQ(st.get_quiz(q.id), q);
  }
  Store st(dir.path());
  EXPECT_TRUE(st.repairs().empty());
  EXPECT_EQ(st.get_image(img.id), img);
  EXPECT_EQ(st.get_description(d.id), d);
  EXPECT_EQ(st.get_quiz(q.id), q);
  EXPECT_EQ(st.get_lint_report(q.id), r);
  EXPECT_EQ(st.get_quiz_set(set.id), set);
  EXPECT_EQ(st.get_session(s.session_id), s);
  EXPECT_EQ(st.get_attempt(a.id), a);
  EXPECT_EQ(st.find_attempt(s.session_id, q.id), a);
  EXPECT_EQ(st.delivering_quiz_set(q.id), set);
  EXPECT_EQ(st.list_annotations(), std::vector<AnnotationRecord>{ann});
  EXPECT_THROW(st.get_quiz("01ZZZZZZZZZZZZZZZZZZZZZZZZ"), Error);
}

TEST(Store, DuplicateSha) {
  TempDir dir("store_dup");
  Store st(dir.path());
  const ImageRecord a = image(Complexity::Simple, "same");
  ImageRecord b = image(Complexity::Complex, "same");
  st.put(a);
  try {
    st.put(b);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::DuplicateSha);
  }
  EXPECT_EQ(st.count(EntityType::Image), 1u);
  EXPECT_EQ(st.put_blob("bytes"), st.put_blob("bytes"));
  EXPECT_EQ(st.read_blob(sha256_hex(std::string_view("bytes"))), "bytes");
}

TEST(Store, FilterByModel) {
  TempDir dir("store_filter");
  Store st(dir.path());
  const ImageRecord s = image(Complexity::Simple, "s");
  const ImageRecord c = image(Complexity::Complex, "c");
  st.put(s);
  st.put(c);
  // 10 quizzes, 4 from fanar (2 on each image).
  const std::vector<std::pair<const ImageRecord*, std::string>> plan = {
      {&s, "fanar"}, {&s, "gemma"}, {&s, "fanar"}, {&c, "llama"}, {&c, "gemma"},
      {&c, "fanar"}, {&s, "llama"}, {&c, "fanar"}, {&s, "gemma"}, {&c, "llama"}};
  for (const auto& [img, model] : plan) st.put(quiz_for(*img, model));

  Filter f;
  f.model_id = "fanar";
  const auto fanar = st.list_quizzes(f);
  ASSERT_EQ(fanar.size(), 4u);
  for (const auto& q : fanar) EXPECT_EQ(q.model_id, "fanar");

  f.complexity = Complexity::Complex;
  EXPECT_EQ(st.list_quizzes(f).size(), 2u);
  Filter by_image;
  by_image.image_id = s.id;
  EXPECT_EQ(st.list_quizzes(by_image).size(), 5u);
  Filter simple;
  simple.complexity = Complexity::Simple;
  EXPECT_EQ(st.list_images(simple).size(), 1u);
}

TEST(Store, DescriptionFilters) {
  TempDir dir("store_desc");
  Store st(dir.path());
  const ImageRecord img = image(Complexity::Moderate, "m");
  st.put(img);
  for (auto cond : {PromptCondition::Prompted, PromptCondition::Bare}) {
    for (const char* model : {"llama", "gemma"}) {
      st.put(Description{new_ulid(), img.id, model, cond, "text", ts(1)});
    }
  }
  Filter f;
  f.condition = PromptCondition::Bare;
  EXPECT_EQ(st.list_descriptions(f).size(), 2u);
  f.model_id = "gemma";
  EXPECT_EQ(st.list_descriptions(f).size(), 1u);
  f.complexity = Complexity::Simple;
  EXPECT_TRUE(st.list_descriptions(f).empty());
}

TEST(Store, ManifestCountsMatchFiles) {
  TempDir dir("store_manifest");
  {
    Store st(dir.path());
    for (int i = 0; i < 5; ++i) st.put(image(Complexity::Simple, "img" + std::to_string(i)));
  }
  const auto j = nlohmann::json::parse(fixtures::read_file(dir / "manifest.json"));
  EXPECT_EQ(j["schema_version"], 1);
  EXPECT_EQ(j["counts"]["images"], 5);
  EXPECT_EQ(line_count(dir / "images.jsonl"), 5u);
}

TEST(Store, SchemaMismatch) {
  TempDir dir("store_schema");
  fixtures::write_file(dir / "manifest.json", R"({"schema_version": 2, "counts": {}})");
  try {
    Store st(dir.path());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::SchemaMismatch);
  }
}

TEST(Store, MidFileCorruptionIsFatal) {
  TempDir dir("store_mid");
  {
    Store st(dir.path());
    for (int i = 0; i < 3; ++i) st.put(image(Complexity::Simple, "x" + std::to_string(i)));
  }
  std::string s = fixtures::read_file(dir / "images.jsonl");
  s[s.find('\n') - 3] = '#';
  fixtures::write_file(dir / "images.jsonl", s);
  EXPECT_THROW(Store st(dir.path()), Error);
}

// Truncating the final line of every entity file loses exactly that record.
TEST(StoreCrash, TruncatedFinalLinesAreDroppedAndReported) {
  TempDir dir("store_crash");
  std::map<EntityType, std::size_t> before;
  {
    Store st(dir.path());
    fixtures::Gen g(3);
    std::vector<ImageRecord> imgs;
    for (int i = 0; i < 4; ++i) {
      imgs.push_back(image(Complexity::Simple, "c" + std::to_string(i)));
      st.put(imgs.back());
    }
    for (int i = 0; i < 3; ++i) {
      Quiz q = g.valid_quiz();
      q.id = new_ulid();
      q.image_id = imgs[0].id;
      st.put(q);
      LintReport r;
      r.quiz_id = q.id;
      st.put(r);
      st.put(Description{new_ulid(), imgs[1].id, "m", PromptCondition::Prompted, "d", ts(1)});
      st.put(QuizSet{new_ulid(), imgs[1].id, new_ulid(), "m", {q.id}, {}, {}, ts(2)});
      st.put(AttemptRecord{new_ulid(), new_ulid(), q.id, 'b', false, ts(3)});
      st.put(AnnotationRecord{SubjectType::Description, new_ulid(), "a", 4, std::nullopt, std::nullopt});
      st.put(Session{new_ulid(), "en", ts(4)});
    }
    for (EntityType t : kAllEntityTypes) before[t] = st.count(t);
  }
  for (EntityType t : kAllEntityTypes) chop_bytes(dir / (std::string(file_stem(t)) + ".jsonl"), 7);

  Store st(dir.path());
  ASSERT_EQ(st.repairs().size(), std::size(kAllEntityTypes));
  for (EntityType t : kAllEntityTypes) {
    EXPECT_EQ(st.count(t), before[t] - 1) << file_stem(t);
    EXPECT_EQ(line_count(dir / (std::string(file_stem(t)) + ".jsonl")), before[t] - 1);
  }
  for (const auto& r : st.repairs()) {
    EXPECT_EQ(r.reason, "truncated final line");
    EXPECT_GT(r.bytes_dropped, 0u);
  }
  // Appends after repair land on a clean line boundary.
  st.put(image(Complexity::Complex, "after"));
  Store again(dir.path());
  EXPECT_TRUE(again.repairs().empty());
  EXPECT_EQ(again.count(EntityType::Image), before[EntityType::Image]);
}

TEST(StoreCrash, LostNewlineKeepsRecord) {
  TempDir dir("store_nl");
  {
    Store st(dir.path());
    st.put(image(Complexity::Simple, "one"));
    st.put(image(Complexity::Simple, "two"));
  }
  chop_bytes(dir / "images.jsonl", 1);
  Store st(dir.path());
  EXPECT_TRUE(st.repairs().empty());
  EXPECT_EQ(st.count(EntityType::Image), 2u);
  st.put(image(Complexity::Simple, "three"));
  Store again(dir.path());
  EXPECT_EQ(again.count(EntityType::Image), 3u);
}

// get(put(x)) == x, and survives a reopen, for generated quizzes.
TEST(StoreProperty, QuizIdentity) {
  TempDir dir("store_prop");
  fixtures::Gen g(42);
  std::vector<Quiz> put;
  {
    Store st(dir.path());
    for (int i = 0; i < 300; ++i) {
      Quiz q = g.valid_quiz();
      q.id = new_ulid();
      q.image_id = new_ulid();
      q.model_id = g.pick(std::vector<std::string>{"llama", "gemma", "fanar"});
      if (g.coin()) q.declared_correct_text = "‏" + q.declared_correct_text;
      st.put(q);
      ASSERT_EQ(st.get_quiz(q.id), q);
      put.push_back(q);
    }
  }
  Store st(dir.path());
  EXPECT_EQ(st.list_quizzes(), put);
}

namespace {

void write_images(const TempDir& dir, int simple, int moderate, int complex) {
  std::string csv = "locator,complexity\n";
  int n = 0;
  for (auto [count, name] : {std::pair{simple, "simple"}, {moderate, "moderate"}, {complex, "complex"}}) {
    for (int i = 0; i < count; ++i, ++n) {
      const std::string file = "img/" + std::to_string(n) + ".jpg";
      fixtures::write_file(dir / file, "\xFF\xD8\xFF" + std::to_string(n));
      csv += file + "," + name + "\n";
    }
  }
  fixtures::write_file(dir / "manifest.csv", csv);
}

}  // namespace

TEST(Manifest, BenchmarkCounts) {
  TempDir dir("manifest_211");
  write_images(dir, 87, 56, 68);
  Store st(dir / "store");
  const auto m = BenchmarkManifest::load(dir / "manifest.csv");
  ASSERT_EQ(m.entries.size(), 211u);
  const auto r = import_manifest(st, m);
  EXPECT_EQ(r.summary(), "simple 87 / moderate 56 / complex 68 / total 211");
  EXPECT_EQ(r.created, 211);
  EXPECT_TRUE(r.failures.empty());

  const auto again = import_manifest(st, m);
  EXPECT_EQ(again.summary(), "simple 87 / moderate 56 / complex 68 / total 211");
  EXPECT_EQ(again.created, 0);
  EXPECT_EQ(again.already_present, 211);
  EXPECT_EQ(st.count(EntityType::Image), 211u);
}

TEST(Manifest, EmptyAndFailures) {
  TempDir dir("manifest_fail");
  Store st(dir / "store");
  const auto empty = import_manifest(st, BenchmarkManifest{});
  EXPECT_EQ(empty.summary(), "simple 0 / moderate 0 / complex 0 / total 0");

  fixtures::write_file(dir / "a.png", "a");
  fixtures::write_file(dir / "b.png", "b");
  fixtures::write_file(dir / "m.csv", "locator,complexity\na.png,simple\nmissing.png,complex\nb.png,Mid-Complex\n");
  const auto r = import_manifest(st, BenchmarkManifest::load(dir / "m.csv"));
  EXPECT_EQ(r.total(), 2);
  ASSERT_EQ(r.failures.size(), 1u);
  EXPECT_EQ(r.failures[0].index, 1u);
  EXPECT_EQ(r.failures[0].locator, "missing.png");
  EXPECT_EQ(r.per_category.at(Complexity::Moderate), 1);
}

TEST(Manifest, JsonlAndUrls) {
  TempDir dir("manifest_jsonl");
  fixtures::write_file(dir / "m.jsonl",
                       "{\"locator\":\"https://images.unsplash.com/p1\",\"complexity\":\"simple\"}\n"
                       "{\"locator\":\"https://images.unsplash.com/p2\",\"complexity\":\"complex\",\"sha256\":\"" +
                           std::string(64, 'e') + "\"}\n");
  Store st(dir / "store");
  const auto r = import_manifest(st, BenchmarkManifest::load(dir / "m.jsonl"));
  EXPECT_EQ(r.created, 2);
  const auto imgs = st.list_images();
  EXPECT_EQ(imgs[0].source, ImageSource::Url);
  EXPECT_EQ(imgs[0].sha256, sha256_hex(std::string_view("https://images.unsplash.com/p1")));
  EXPECT_EQ(imgs[1].sha256, std::string(64, 'e'));
}

TEST(Manifest, MalformedRows) {
  TempDir dir("manifest_bad");
  fixtures::write_file(dir / "bad.csv", "locator,complexity\nx.png,enormous\n");
  EXPECT_THROW(BenchmarkManifest::load(dir / "bad.csv"), Error);
  fixtures::write_file(dir / "hdr.csv", "path,level\n");
  EXPECT_THROW(BenchmarkManifest::load(dir / "hdr.csv"), Error);
  EXPECT_TRUE(is_http_url("https://images.unsplash.com/x"));
  EXPECT_FALSE(is_http_url("ftp://x"));
  EXPECT_FALSE(is_http_url("https://"));
}
