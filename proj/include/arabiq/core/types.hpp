#pragma once

#include "arabiq/core/ids.hpp"
#include "arabiq/core/time.hpp"

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace arabiq {

enum class Complexity { Simple, Moderate, Complex };
enum class ImageSource { Upload, Url };
enum class PromptCondition { Prompted, Bare };
enum class SkillTag { Actions, Objects, Colors, Adjectives, Untagged };
enum class Modality { Vision, Text, Mock };
enum class PromptTask { DescribeImage, GenerateQuiz };
enum class SubjectType { Description, Quiz };

inline constexpr Complexity kAllComplexities[] = {Complexity::Simple, Complexity::Moderate,
                                                  Complexity::Complex};

std::string_view to_string(Complexity v) noexcept;
std::string_view to_string(ImageSource v) noexcept;
std::string_view to_string(PromptCondition v) noexcept;
std::string_view to_string(SkillTag v) noexcept;
std::string_view to_string(Modality v) noexcept;
std::string_view to_string(PromptTask v) noexcept;
std::string_view to_string(SubjectType v) noexcept;

std::optional<Complexity> parse_complexity(std::string_view s) noexcept;
std::optional<ImageSource> parse_image_source(std::string_view s) noexcept;
std::optional<PromptCondition> parse_condition(std::string_view s) noexcept;
// Accepts "Actions", "action", "colours", ... case-insensitively.
std::optional<SkillTag> parse_skill(std::string_view s) noexcept;
std::optional<Modality> parse_modality(std::string_view s) noexcept;
std::optional<PromptTask> parse_task(std::string_view s) noexcept;
std::optional<SubjectType> parse_subject_type(std::string_view s) noexcept;

inline constexpr char kOptionLabels[] = {'a', 'b', 'c', 'd'};

constexpr bool is_option_label(char c) noexcept { return c >= 'a' && c <= 'd'; }

struct ImageRecord {
  Ulid id;
  ImageSource source = ImageSource::Upload;
  std::string locator;
  std::string sha256;
  Complexity complexity = Complexity::Moderate;
  Timestamp created_at{};

  bool operator==(const ImageRecord&) const = default;
};

struct Description {
  Ulid id;
  Ulid image_id;
  std::string model_id;
  PromptCondition condition = PromptCondition::Prompted;
  std::string text;
  Timestamp created_at{};

  bool operator==(const Description&) const = default;
};

struct QuizOption {
  char label = 'a';
  std::string text_ar;

  /// NFC-normalizes and trims the text.
  static QuizOption make(char label, std::string_view text);

  bool operator==(const QuizOption&) const = default;
};

struct Quiz {
  Ulid id;
  Ulid image_id;
  Ulid description_id;
  std::string model_id;
  int ordinal = 1;
  std::string stem;
  std::vector<QuizOption> options;
  char declared_correct = 'a';
  // Text that followed "Correct answer: x)" in the model output. Empty when
  // the quiz was built by hand.
  std::string declared_correct_text;
  SkillTag skill = SkillTag::Untagged;

  [[nodiscard]] const QuizOption* option(char label) const noexcept;

  bool operator==(const Quiz&) const = default;
};

struct ProviderProfile {
  std::string profile_id;
  std::string endpoint_url;
  std::string model_name;
  Modality modality = Modality::Mock;
  std::string api_key_env;
  int timeout_ms = 30000;
  int max_retries = 2;
  int max_parallel = 4;
  // Mock only: JSONL fixture file.
  std::string fixtures_path;

  bool operator==(const ProviderProfile&) const = default;
};

struct PromptTemplate {
  std::string template_id;
  PromptTask task = PromptTask::DescribeImage;
  std::string body;
  std::string version_hash;

  static PromptTemplate make(std::string id, PromptTask task, std::string body);

  bool operator==(const PromptTemplate&) const = default;
};

enum class FindingCode {
  LowDiacritics,
  CodeSwitch,
  NoArabic,
  DuplicateOption,
  NearDuplicateOption,
  CorrectTextMismatch,
  EmptyOption,
  LexiconMiss,
};

enum class Severity { Error, Warning };

std::string_view to_string(FindingCode v) noexcept;
std::string_view to_string(Severity v) noexcept;
std::optional<FindingCode> parse_finding_code(std::string_view s) noexcept;

struct Finding {
  FindingCode code = FindingCode::LowDiacritics;
  Severity severity = Severity::Warning;
  std::optional<char> option_label;
  std::string detail;

  bool operator==(const Finding&) const = default;
};

struct LintReport {
  Ulid quiz_id;
  std::vector<Finding> findings;
  std::map<char, double> diacritic_coverage;
  bool pass = true;

  [[nodiscard]] bool has(FindingCode code) const noexcept;

  bool operator==(const LintReport&) const = default;
};

/// Parser diagnostic. `ordinal` is 0 when the diagnostic is not tied to a
/// numbered question.
struct Diagnostic {
  std::string code;
  int line_no = 0;
  std::string message;
  int ordinal = 0;
  std::optional<char> label;

  bool operator==(const Diagnostic&) const = default;
};

struct RejectedQuiz {
  Quiz quiz;
  LintReport report;
  std::vector<std::string> violations;

  bool operator==(const RejectedQuiz&) const = default;
};

struct QuizSet {
  Ulid id;
  Ulid image_id;
  Ulid description_id;
  std::string model_id;
  std::vector<Ulid> quizzes;
  std::vector<RejectedQuiz> rejected;
  std::vector<Diagnostic> diagnostics;
  Timestamp created_at{};

  bool operator==(const QuizSet&) const = default;
};

struct AttemptRecord {
  Ulid id;
  Ulid session_id;
  Ulid quiz_id;
  char chosen_label = 'a';
  bool is_correct = false;
  Timestamp created_at{};

  bool operator==(const AttemptRecord&) const = default;
};

enum class FeedbackMessage { Correct, IncorrectShowAnswer };

struct Feedback {
  bool is_correct = false;
  char correct_label = 'a';
  std::string correct_text_ar;
  FeedbackMessage message_key = FeedbackMessage::Correct;

  bool operator==(const Feedback&) const = default;
};

struct AnnotationRecord {
  SubjectType subject_type = SubjectType::Description;
  Ulid subject_id;
  std::string annotator_id;
  int score = 0;
  std::optional<bool> verdict_correct_answer;
  std::optional<std::string> rubric_note;

  bool operator==(const AnnotationRecord&) const = default;
};

struct Session {
  Ulid session_id;
  std::string native_language = "en";
  Timestamp created_at{};

  bool operator==(const Session&) const = default;
};

}  // namespace arabiq
