#include "arabiq/store/store.hpp"

#include "arabiq/core/error.hpp"
#include "arabiq/core/ids.hpp"
#include "arabiq/core/json.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <fstream>
#include <mutex>
#include <sstream>

namespace arabiq::store {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

[[noreturn]] void io_fail(const std::string& what) {
  throw Error(Errc::StoreIo, what + ": " + std::strerror(errno));
}

void write_all(int fd, std::string_view data, const std::string& what) {
  while (!data.empty()) {
    const ssize_t n = ::write(fd, data.data(), data.size());
    if (n < 0) {
      if (errno == EINTR) continue;
      io_fail(what);
    }
    data.remove_prefix(static_cast<std::size_t>(n));
  }
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Write-then-rename so readers never see a half-written file.
void write_atomic(const fs::path& p, std::string_view data) {
  const fs::path tmp = p.string() + ".tmp";
  const int fd = ::open(tmp.c_str(), O_WRONLY | O_CREAT | O_TRUNC | O_CLOEXEC, 0644);
  if (fd < 0) io_fail("open " + tmp.string());
  write_all(fd, data, tmp.string());
  ::fdatasync(fd);
  ::close(fd);
  fs::rename(tmp, p);
}

std::string pair_key(const Ulid& a, const Ulid& b) { return a + "/" + b; }

}  // namespace

std::string_view file_stem(EntityType t) noexcept {
  switch (t) {
    case EntityType::Image: return "images";
    case EntityType::Description: return "descriptions";
    case EntityType::Quiz: return "quizzes";
    case EntityType::LintReport: return "lint_reports";
    case EntityType::QuizSet: return "quiz_sets";
    case EntityType::Attempt: return "attempts";
    case EntityType::Annotation: return "annotations";
    case EntityType::Session: return "sessions";
  }
  return "unknown";
}

Store::Store(fs::path root) : root_(std::move(root)) {
  std::error_code ec;
  fs::create_directories(root_ / "blobs", ec);
  if (ec) {
    throw Error(Errc::StoreIo, "cannot create store at " + root_.string() + ": " + ec.message());
  }
  const fs::path manifest_path = root_ / "manifest.json";
  if (fs::exists(manifest_path)) {
    int version = -1;
    try {
      version = json::parse(slurp(manifest_path)).at("schema_version").get<int>();
    } catch (const std::exception& e) {
      throw Error(Errc::SchemaMismatch, "unreadable manifest.json: " + std::string(e.what()));
    }
    if (version != kSchemaVersion) {
      throw Error(Errc::SchemaMismatch, "store schema_version " + std::to_string(version) + ", expected " +
                                            std::to_string(kSchemaVersion));
    }
  }
  for (EntityType t : kAllEntityTypes) {
    load_file(t);
    const int fd = ::open(entity_path(t).c_str(), O_WRONLY | O_CREAT | O_APPEND | O_CLOEXEC, 0644);
    if (fd < 0) io_fail("open " + entity_path(t).string());
    fds_[t] = fd;
  }
  sync_manifest();
}

Store::~Store() {
  try {
    sync_manifest();
  } catch (...) {
  }
  for (const auto& [t, fd] : fds_) ::close(fd);
}

fs::path Store::entity_path(EntityType t) const { return root_ / (std::string(file_stem(t)) + ".jsonl"); }

void Store::load_file(EntityType t) {
  const fs::path path = entity_path(t);
  if (!fs::exists(path)) return;
  const std::string data = slurp(path);

  std::size_t pos = 0;
  int line_no = 0;
  while (pos < data.size()) {
    ++line_no;
    const std::size_t nl = data.find('\n', pos);
    const bool terminated = nl != std::string::npos;
    const std::size_t end = terminated ? nl : data.size();
    const std::string_view line(data.data() + pos, end - pos);
    const bool last = !terminated || nl + 1 == data.size();

    if (line.find_first_not_of(" \t\r") == std::string_view::npos) {
      pos = end + 1;
      continue;
    }
    try {
      const json j = json::parse(line);
      switch (t) {
        case EntityType::Image: index_row(t, j.get<ImageRecord>()); break;
        case EntityType::Description: index_row(t, j.get<Description>()); break;
        case EntityType::Quiz: index_row(t, j.get<Quiz>()); break;
        case EntityType::LintReport: index_row(t, j.get<LintReport>()); break;
        case EntityType::QuizSet: index_row(t, j.get<QuizSet>()); break;
        case EntityType::Attempt: index_row(t, j.get<AttemptRecord>()); break;
        case EntityType::Annotation: index_row(t, j.get<AnnotationRecord>()); break;
        case EntityType::Session: index_row(t, j.get<Session>()); break;
      }
    } catch (const std::exception& e) {
      if (!last) {
        throw Error(Errc::SchemaMismatch, path.string() + ":" + std::to_string(line_no) + ": " + e.what());
      }
      repairs_.push_back({path.filename().string(), line_no, data.size() - pos,
                          terminated ? "unparseable final line" : "truncated final line"});
      if (::truncate(path.c_str(), static_cast<off_t>(pos)) != 0) io_fail("truncate " + path.string());
      return;
    }
    if (!terminated) {
      // Complete record that only lost its newline: keep it.
      const int fd = ::open(path.c_str(), O_WRONLY | O_APPEND | O_CLOEXEC);
      if (fd < 0) io_fail("open " + path.string());
      write_all(fd, "\n", path.string());
      ::fdatasync(fd);
      ::close(fd);
    }
    pos = end + 1;
  }
}

template <typename T>
void Store::index_row(EntityType t, T v) {
  auto upsert = [](auto& table, std::string key, auto&& row) -> std::size_t {
    if (auto it = table.by_key.find(key); it != table.by_key.end()) {
      table.rows[it->second] = std::forward<decltype(row)>(row);
      return it->second;
    }
    table.rows.push_back(std::forward<decltype(row)>(row));
    table.by_key.emplace(std::move(key), table.rows.size() - 1);
    return table.rows.size() - 1;
  };
  if constexpr (std::is_same_v<T, ImageRecord>) {
    const std::string sha = v.sha256;
    const std::size_t i = upsert(images_, v.id, std::move(v));
    image_by_sha_[sha] = i;
  } else if constexpr (std::is_same_v<T, Description>) {
    upsert(descriptions_, v.id, std::move(v));
  } else if constexpr (std::is_same_v<T, Quiz>) {
    upsert(quizzes_, v.id, std::move(v));
  } else if constexpr (std::is_same_v<T, LintReport>) {
    upsert(lint_reports_, v.quiz_id, std::move(v));
  } else if constexpr (std::is_same_v<T, QuizSet>) {
    std::vector<Ulid> delivered = v.quizzes;
    const std::size_t i = upsert(quiz_sets_, v.id, std::move(v));
    for (const auto& q : delivered) set_by_quiz_.emplace(q, i);
  } else if constexpr (std::is_same_v<T, AttemptRecord>) {
    const std::string pk = pair_key(v.session_id, v.quiz_id);
    const std::size_t i = upsert(attempts_, v.id, std::move(v));
    attempt_by_pair_.emplace(pk, i);
  } else if constexpr (std::is_same_v<T, AnnotationRecord>) {
    annotations_.rows.push_back(std::move(v));
  } else if constexpr (std::is_same_v<T, Session>) {
    upsert(sessions_, v.session_id, std::move(v));
  }
  (void)t;
}

void Store::append_line(EntityType t, const std::string& line) {
  const int fd = fds_.at(t);
  write_all(fd, line, entity_path(t).string());
  if (::fdatasync(fd) != 0) io_fail("fdatasync " + entity_path(t).string());
}

namespace {

template <typename T>
std::string line_of(const T& v) {
  return json(v).dump() + "\n";
}

void require_id(const Ulid& id, const char* what) {
  if (id.empty()) throw Error(Errc::InvalidArgument, std::string(what) + " has no id");
}

}  // namespace

Ulid Store::put(const ImageRecord& v) {
  require_id(v.id, "image");
  if (!is_sha256_hex(v.sha256)) throw Error(Errc::InvalidArgument, "image sha256 is not 64 lowercase hex");
  std::unique_lock lock(mu_);
  if (image_by_sha_.count(v.sha256) != 0) {
    throw Error(Errc::DuplicateSha, "image with sha256 " + v.sha256 + " already stored");
  }
  append_line(EntityType::Image, line_of(v));
  index_row(EntityType::Image, v);
  return v.id;
}

Ulid Store::put(const Description& v) {
  require_id(v.id, "description");
  std::unique_lock lock(mu_);
  append_line(EntityType::Description, line_of(v));
  index_row(EntityType::Description, v);
  return v.id;
}

Ulid Store::put(const Quiz& v) {
  require_id(v.id, "quiz");
  std::unique_lock lock(mu_);
  append_line(EntityType::Quiz, line_of(v));
  index_row(EntityType::Quiz, v);
  return v.id;
}

Ulid Store::put(const LintReport& v) {
  require_id(v.quiz_id, "lint report");
  std::unique_lock lock(mu_);
  append_line(EntityType::LintReport, line_of(v));
  index_row(EntityType::LintReport, v);
  return v.quiz_id;
}

Ulid Store::put(const QuizSet& v) {
  require_id(v.id, "quiz set");
  std::unique_lock lock(mu_);
  append_line(EntityType::QuizSet, line_of(v));
  index_row(EntityType::QuizSet, v);
  return v.id;
}

Ulid Store::put(const AttemptRecord& v) {
  require_id(v.id, "attempt");
  std::unique_lock lock(mu_);
  append_line(EntityType::Attempt, line_of(v));
  index_row(EntityType::Attempt, v);
  return v.id;
}

void Store::put(const AnnotationRecord& v) {
  std::unique_lock lock(mu_);
  append_line(EntityType::Annotation, line_of(v));
  index_row(EntityType::Annotation, v);
}

Ulid Store::put(const Session& v) {
  require_id(v.session_id, "session");
  std::unique_lock lock(mu_);
  append_line(EntityType::Session, line_of(v));
  index_row(EntityType::Session, v);
  return v.session_id;
}

std::string Store::put_blob(std::string_view bytes) {
  std::string sha = sha256_hex(bytes);
  const fs::path p = root_ / "blobs" / sha;
  std::unique_lock lock(mu_);
  if (!fs::exists(p)) write_atomic(p, bytes);
  return sha;
}

std::string Store::read_blob(std::string_view sha256) const {
  const fs::path p = root_ / "blobs" / std::string(sha256);
  if (!is_sha256_hex(sha256) || !fs::exists(p)) {
    throw Error(Errc::NotFound, "no blob " + std::string(sha256));
  }
  return slurp(p);
}

bool Store::has_blob(std::string_view sha256) const {
  return is_sha256_hex(sha256) && fs::exists(root_ / "blobs" / std::string(sha256));
}

namespace {

template <typename T>
const T& lookup(const auto& table, const std::string& key, const char* what) {
  const auto it = table.by_key.find(key);
  if (it == table.by_key.end()) throw Error(Errc::NotFound, std::string(what) + " " + key + " not found");
  return table.rows[it->second];
}

}  // namespace

ImageRecord Store::get_image(const Ulid& id) const {
  std::shared_lock lock(mu_);
  return lookup<ImageRecord>(images_, id, "image");
}

Description Store::get_description(const Ulid& id) const {
  std::shared_lock lock(mu_);
  return lookup<Description>(descriptions_, id, "description");
}

Quiz Store::get_quiz(const Ulid& id) const {
  std::shared_lock lock(mu_);
  return lookup<Quiz>(quizzes_, id, "quiz");
}

LintReport Store::get_lint_report(const Ulid& quiz_id) const {
  std::shared_lock lock(mu_);
  return lookup<LintReport>(lint_reports_, quiz_id, "lint report for quiz");
}

QuizSet Store::get_quiz_set(const Ulid& id) const {
  std::shared_lock lock(mu_);
  return lookup<QuizSet>(quiz_sets_, id, "quiz set");
}

AttemptRecord Store::get_attempt(const Ulid& id) const {
  std::shared_lock lock(mu_);
  return lookup<AttemptRecord>(attempts_, id, "attempt");
}

Session Store::get_session(const Ulid& id) const {
  std::shared_lock lock(mu_);
  return lookup<Session>(sessions_, id, "session");
}

std::optional<ImageRecord> Store::find_image_by_sha(std::string_view sha256) const {
  std::shared_lock lock(mu_);
  const auto it = image_by_sha_.find(std::string(sha256));
  if (it == image_by_sha_.end()) return std::nullopt;
  return images_.rows[it->second];
}

std::optional<AttemptRecord> Store::find_attempt(const Ulid& session_id, const Ulid& quiz_id) const {
  std::shared_lock lock(mu_);
  const auto it = attempt_by_pair_.find(pair_key(session_id, quiz_id));
  if (it == attempt_by_pair_.end()) return std::nullopt;
  return attempts_.rows[it->second];
}

std::optional<QuizSet> Store::delivering_quiz_set(const Ulid& quiz_id) const {
  std::shared_lock lock(mu_);
  const auto it = set_by_quiz_.find(quiz_id);
  if (it == set_by_quiz_.end()) return std::nullopt;
  return quiz_sets_.rows[it->second];
}

bool Store::image_matches(const Ulid& image_id, const Filter& f) const {
  if (f.image_id && *f.image_id != image_id) return false;
  if (f.complexity) {
    const auto it = images_.by_key.find(image_id);
    if (it == images_.by_key.end() || images_.rows[it->second].complexity != *f.complexity) return false;
  }
  return true;
}

std::vector<ImageRecord> Store::list_images(const Filter& f) const {
  std::shared_lock lock(mu_);
  std::vector<ImageRecord> out;
  for (const auto& r : images_.rows) {
    if (f.image_id && *f.image_id != r.id) continue;
    if (f.complexity && *f.complexity != r.complexity) continue;
    out.push_back(r);
  }
  return out;
}

std::vector<Description> Store::list_descriptions(const Filter& f) const {
  std::shared_lock lock(mu_);
  std::vector<Description> out;
  for (const auto& r : descriptions_.rows) {
    if (!image_matches(r.image_id, f)) continue;
    if (f.model_id && *f.model_id != r.model_id) continue;
    if (f.condition && *f.condition != r.condition) continue;
    out.push_back(r);
  }
  return out;
}

std::vector<Quiz> Store::list_quizzes(const Filter& f) const {
  std::shared_lock lock(mu_);
  std::vector<Quiz> out;
  for (const auto& r : quizzes_.rows) {
    if (!image_matches(r.image_id, f)) continue;
    if (f.model_id && *f.model_id != r.model_id) continue;
    if (f.description_id && *f.description_id != r.description_id) continue;
    if (f.quiz_id && *f.quiz_id != r.id) continue;
    if (f.condition) {
      const auto d = descriptions_.by_key.find(r.description_id);
      if (d == descriptions_.by_key.end() || descriptions_.rows[d->second].condition != *f.condition) continue;
    }
    out.push_back(r);
  }
  return out;
}

std::vector<LintReport> Store::list_lint_reports(const Filter& f) const {
  std::shared_lock lock(mu_);
  std::vector<LintReport> out;
  for (const auto& r : lint_reports_.rows) {
    if (f.quiz_id && *f.quiz_id != r.quiz_id) continue;
    out.push_back(r);
  }
  return out;
}

std::vector<QuizSet> Store::list_quiz_sets(const Filter& f) const {
  std::shared_lock lock(mu_);
  std::vector<QuizSet> out;
  for (const auto& r : quiz_sets_.rows) {
    if (!image_matches(r.image_id, f)) continue;
    if (f.model_id && *f.model_id != r.model_id) continue;
    if (f.description_id && *f.description_id != r.description_id) continue;
    out.push_back(r);
  }
  return out;
}

std::vector<AttemptRecord> Store::list_attempts(const Filter& f) const {
  std::shared_lock lock(mu_);
  std::vector<AttemptRecord> out;
  for (const auto& r : attempts_.rows) {
    if (f.session_id && *f.session_id != r.session_id) continue;
    if (f.quiz_id && *f.quiz_id != r.quiz_id) continue;
    out.push_back(r);
  }
  return out;
}

std::vector<AnnotationRecord> Store::list_annotations(const Filter& f) const {
  std::shared_lock lock(mu_);
  std::vector<AnnotationRecord> out;
  for (const auto& r : annotations_.rows) {
    if (f.subject_id && *f.subject_id != r.subject_id) continue;
    if (f.subject_type && *f.subject_type != r.subject_type) continue;
    out.push_back(r);
  }
  return out;
}

std::vector<Session> Store::list_sessions() const {
  std::shared_lock lock(mu_);
  return sessions_.rows;
}

std::size_t Store::count(EntityType t) const {
  std::shared_lock lock(mu_);
  switch (t) {
    case EntityType::Image: return images_.rows.size();
    case EntityType::Description: return descriptions_.rows.size();
    case EntityType::Quiz: return quizzes_.rows.size();
    case EntityType::LintReport: return lint_reports_.rows.size();
    case EntityType::QuizSet: return quiz_sets_.rows.size();
    case EntityType::Attempt: return attempts_.rows.size();
    case EntityType::Annotation: return annotations_.rows.size();
    case EntityType::Session: return sessions_.rows.size();
  }
  return 0;
}

StoreManifest Store::manifest() const {
  StoreManifest m;
  m.root_path = root_;
  m.schema_version = kSchemaVersion;
  for (EntityType t : kAllEntityTypes) m.counts[std::string(file_stem(t))] = count(t);
  return m;
}

void Store::sync_manifest() {
  const StoreManifest m = manifest();
  json j;
  j["schema_version"] = m.schema_version;
  j["counts"] = m.counts;
  write_atomic(root_ / "manifest.json", j.dump(2) + "\n");
}

}  // namespace arabiq::store
