#include "arabiq/core/types.hpp"

#include "arabiq/core/text.hpp"

#include <algorithm>
#include <cctype>

namespace arabiq {

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

}  // namespace

std::string_view to_string(Complexity v) noexcept {
  switch (v) {
    case Complexity::Simple: return "simple";
    case Complexity::Moderate: return "moderate";
    case Complexity::Complex: return "complex";
  }
  return "moderate";
}

std::string_view to_string(ImageSource v) noexcept {
  return v == ImageSource::Upload ? "upload" : "url";
}

std::string_view to_string(PromptCondition v) noexcept {
  return v == PromptCondition::Prompted ? "prompted" : "bare";
}

std::string_view to_string(SkillTag v) noexcept {
  switch (v) {
    case SkillTag::Actions: return "actions";
    case SkillTag::Objects: return "objects";
    case SkillTag::Colors: return "colors";
    case SkillTag::Adjectives: return "adjectives";
    case SkillTag::Untagged: return "untagged";
  }
  return "untagged";
}

std::string_view to_string(Modality v) noexcept {
  switch (v) {
    case Modality::Vision: return "vision";
    case Modality::Text: return "text";
    case Modality::Mock: return "mock";
  }
  return "mock";
}

std::string_view to_string(PromptTask v) noexcept {
  return v == PromptTask::DescribeImage ? "describe_image" : "generate_quiz";
}

std::string_view to_string(SubjectType v) noexcept {
  return v == SubjectType::Description ? "description" : "quiz";
}

std::optional<Complexity> parse_complexity(std::string_view s) noexcept {
  const std::string l = lower(s);
  if (l == "simple") return Complexity::Simple;
  // "mid-complex" is the same tier under another name.
  if (l == "moderate" || l == "mid-complex") return Complexity::Moderate;
  if (l == "complex") return Complexity::Complex;
  return std::nullopt;
}

std::optional<ImageSource> parse_image_source(std::string_view s) noexcept {
  const std::string l = lower(s);
  if (l == "upload") return ImageSource::Upload;
  if (l == "url") return ImageSource::Url;
  return std::nullopt;
}

std::optional<PromptCondition> parse_condition(std::string_view s) noexcept {
  const std::string l = lower(s);
  if (l == "prompted") return PromptCondition::Prompted;
  if (l == "bare") return PromptCondition::Bare;
  return std::nullopt;
}

std::optional<SkillTag> parse_skill(std::string_view s) noexcept {
  const std::string l = lower(s);
  if (l == "actions" || l == "action") return SkillTag::Actions;
  if (l == "objects" || l == "object") return SkillTag::Objects;
  if (l == "colors" || l == "color" || l == "colours" || l == "colour") return SkillTag::Colors;
  if (l == "adjectives" || l == "adjective") return SkillTag::Adjectives;
  if (l == "untagged") return SkillTag::Untagged;
  return std::nullopt;
}

std::optional<Modality> parse_modality(std::string_view s) noexcept {
  const std::string l = lower(s);
  if (l == "vision") return Modality::Vision;
  if (l == "text") return Modality::Text;
  if (l == "mock") return Modality::Mock;
  return std::nullopt;
}

std::optional<PromptTask> parse_task(std::string_view s) noexcept {
  const std::string l = lower(s);
  if (l == "describe_image") return PromptTask::DescribeImage;
  if (l == "generate_quiz") return PromptTask::GenerateQuiz;
  return std::nullopt;
}

std::optional<SubjectType> parse_subject_type(std::string_view s) noexcept {
  const std::string l = lower(s);
  if (l == "description") return SubjectType::Description;
  if (l == "quiz") return SubjectType::Quiz;
  return std::nullopt;
}

std::string_view to_string(FindingCode v) noexcept {
  switch (v) {
    case FindingCode::LowDiacritics: return "LOW_DIACRITICS";
    case FindingCode::CodeSwitch: return "CODE_SWITCH";
    case FindingCode::NoArabic: return "NO_ARABIC";
    case FindingCode::DuplicateOption: return "DUPLICATE_OPTION";
    case FindingCode::NearDuplicateOption: return "NEAR_DUPLICATE_OPTION";
    case FindingCode::CorrectTextMismatch: return "CORRECT_TEXT_MISMATCH";
    case FindingCode::EmptyOption: return "EMPTY_OPTION";
    case FindingCode::LexiconMiss: return "LEXICON_MISS";
  }
  return "LOW_DIACRITICS";
}

std::string_view to_string(Severity v) noexcept {
  return v == Severity::Error ? "error" : "warning";
}

std::optional<FindingCode> parse_finding_code(std::string_view s) noexcept {
  for (auto code : {FindingCode::LowDiacritics, FindingCode::CodeSwitch, FindingCode::NoArabic,
                    FindingCode::DuplicateOption, FindingCode::NearDuplicateOption,
                    FindingCode::CorrectTextMismatch, FindingCode::EmptyOption,
                    FindingCode::LexiconMiss}) {
    if (to_string(code) == s) {
      return code;
    }
  }
  return std::nullopt;
}

QuizOption QuizOption::make(char label, std::string_view text) {
  return QuizOption{label, text::trim(text::nfc(text))};
}

const QuizOption* Quiz::option(char label) const noexcept {
  for (const auto& o : options) {
    if (o.label == label) {
      return &o;
    }
  }
  return nullptr;
}

PromptTemplate PromptTemplate::make(std::string id, PromptTask task, std::string body) {
  PromptTemplate t;
  t.template_id = std::move(id);
  t.task = task;
  t.version_hash = sha256_hex(body);
  t.body = std::move(body);
  return t;
}

bool LintReport::has(FindingCode code) const noexcept {
  return std::any_of(findings.begin(), findings.end(),
                     [code](const Finding& f) { return f.code == code; });
}

}  // namespace arabiq
