#pragma once

#include "arabiq/core/types.hpp"

#include <cstdio>
#include <filesystem>
#include <map>
#include <optional>
#include <shared_mutex>
#include <string>
#include <unordered_map>
#include <vector>

namespace arabiq::store {

enum class EntityType { Image, Description, Quiz, LintReport, QuizSet, Attempt, Annotation, Session };

inline constexpr EntityType kAllEntityTypes[] = {
    EntityType::Image,   EntityType::Description, EntityType::Quiz,       EntityType::LintReport,
    EntityType::QuizSet, EntityType::Attempt,     EntityType::Annotation, EntityType::Session};

/// File stem of the entity file, e.g. "quizzes" for quizzes.jsonl.
std::string_view file_stem(EntityType t) noexcept;

struct RepairEvent {
  std::string file;
  int line_no = 0;  // 1-based line that was dropped
  std::size_t bytes_dropped = 0;
  std::string reason;
};

struct StoreManifest {
  std::filesystem::path root_path;
  std::map<std::string, std::size_t> counts;
  int schema_version = 1;
};

/// Every field is optional; unset fields do not constrain. Fields that do not
/// apply to an entity type are ignored.
struct Filter {
  std::optional<Ulid> image_id;
  std::optional<Complexity> complexity;  // joined through the image
  std::optional<std::string> model_id;
  std::optional<PromptCondition> condition;
  std::optional<Ulid> description_id;
  std::optional<Ulid> session_id;
  std::optional<Ulid> quiz_id;
  std::optional<Ulid> subject_id;
  std::optional<SubjectType> subject_type;
};

/// Append-only JSONL store. One writer at a time (internally serialized);
/// reads run against the in-memory index rebuilt on open.
class Store {
public:
  static constexpr int kSchemaVersion = 1;

  /// Creates the layout if missing. A truncated or unparseable final line in
  /// any entity file is cut off and reported in repairs(); corruption
  /// anywhere else throws Error(SchemaMismatch), as does a manifest with a
  /// different schema_version.
  explicit Store(std::filesystem::path root);
  ~Store();

  Store(const Store&) = delete;
  Store& operator=(const Store&) = delete;

  [[nodiscard]] const std::vector<RepairEvent>& repairs() const noexcept { return repairs_; }
  [[nodiscard]] const std::filesystem::path& root() const noexcept { return root_; }

  // Each put appends one line and fsyncs before returning.
  Ulid put(const ImageRecord& v);  // Error(DuplicateSha) if the sha is stored
  Ulid put(const Description& v);
  Ulid put(const Quiz& v);
  Ulid put(const LintReport& v);  // keyed by quiz_id
  Ulid put(const QuizSet& v);
  Ulid put(const AttemptRecord& v);
  void put(const AnnotationRecord& v);
  Ulid put(const Session& v);

  /// Writes blobs/<sha256> (if absent) and returns the digest.
  std::string put_blob(std::string_view bytes);
  [[nodiscard]] std::string read_blob(std::string_view sha256) const;
  [[nodiscard]] bool has_blob(std::string_view sha256) const;

  // Throw Error(NotFound).
  [[nodiscard]] ImageRecord get_image(const Ulid& id) const;
  [[nodiscard]] Description get_description(const Ulid& id) const;
  [[nodiscard]] Quiz get_quiz(const Ulid& id) const;
  [[nodiscard]] LintReport get_lint_report(const Ulid& quiz_id) const;
  [[nodiscard]] QuizSet get_quiz_set(const Ulid& id) const;
  [[nodiscard]] AttemptRecord get_attempt(const Ulid& id) const;
  [[nodiscard]] Session get_session(const Ulid& id) const;

  [[nodiscard]] std::optional<ImageRecord> find_image_by_sha(std::string_view sha256) const;
  [[nodiscard]] std::optional<AttemptRecord> find_attempt(const Ulid& session_id, const Ulid& quiz_id) const;
  /// The quiz set that delivered the quiz, if any.
  [[nodiscard]] std::optional<QuizSet> delivering_quiz_set(const Ulid& quiz_id) const;

  // Results keep insertion order.
  [[nodiscard]] std::vector<ImageRecord> list_images(const Filter& f = {}) const;
  [[nodiscard]] std::vector<Description> list_descriptions(const Filter& f = {}) const;
  [[nodiscard]] std::vector<Quiz> list_quizzes(const Filter& f = {}) const;
  [[nodiscard]] std::vector<LintReport> list_lint_reports(const Filter& f = {}) const;
  [[nodiscard]] std::vector<QuizSet> list_quiz_sets(const Filter& f = {}) const;
  [[nodiscard]] std::vector<AttemptRecord> list_attempts(const Filter& f = {}) const;
  [[nodiscard]] std::vector<AnnotationRecord> list_annotations(const Filter& f = {}) const;
  [[nodiscard]] std::vector<Session> list_sessions() const;

  [[nodiscard]] std::size_t count(EntityType t) const;
  [[nodiscard]] StoreManifest manifest() const;

  /// Rewrites manifest.json from the in-memory counts (atomic rename). Also
  /// done by the destructor.
  void sync_manifest();

private:
  template <typename T>
  struct Table {
    std::vector<T> rows;
    std::unordered_map<std::string, std::size_t> by_key;
  };

  void load_file(EntityType t);
  void append_line(EntityType t, const std::string& line);
  [[nodiscard]] std::filesystem::path entity_path(EntityType t) const;
  [[nodiscard]] bool image_matches(const Ulid& image_id, const Filter& f) const;

  template <typename T>
  void index_row(EntityType t, T v);

  std::filesystem::path root_;
  std::vector<RepairEvent> repairs_;
  std::map<EntityType, int> fds_;

  mutable std::shared_mutex mu_;
  Table<ImageRecord> images_;
  Table<Description> descriptions_;
  Table<Quiz> quizzes_;
  Table<LintReport> lint_reports_;
  Table<QuizSet> quiz_sets_;
  Table<AttemptRecord> attempts_;
  Table<AnnotationRecord> annotations_;
  Table<Session> sessions_;
  std::unordered_map<std::string, std::size_t> image_by_sha_;
  std::unordered_map<std::string, std::size_t> attempt_by_pair_;
  std::unordered_map<std::string, std::size_t> set_by_quiz_;
};

}  // namespace arabiq::store
