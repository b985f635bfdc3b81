#pragma once

#include "arabiq/core/text.hpp"
#include "arabiq/core/types.hpp"

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace arabiq::parser {

using text::strip_bidi_controls;

/// Free text the parser recognized but deliberately kept out of the quiz,
/// e.g. an English gloss "Translation (Table, Pen, String, Chair)".
struct Annotation {
  int ordinal = 0;
  std::string text;

  bool operator==(const Annotation&) const = default;
};

struct ParseOutcome {
  // Drafts: id, image_id, description_id and model_id are empty.
  std::vector<Quiz> quizzes;
  std::vector<Diagnostic> diagnostics;
  std::vector<Annotation> annotations;

  [[nodiscard]] bool has(std::string_view code) const noexcept;
};

namespace codes {
inline constexpr std::string_view kNoQuestions = "NO_QUESTIONS";
inline constexpr std::string_view kMissingOption = "MISSING_OPTION";
inline constexpr std::string_view kDuplicateLabel = "DUPLICATE_LABEL";
inline constexpr std::string_view kMissingCorrect = "MISSING_CORRECT";
inline constexpr std::string_view kCorrectLabelUnknown = "CORRECT_LABEL_UNKNOWN";
inline constexpr std::string_view kCorrectTextMismatch = "CORRECT_TEXT_MISMATCH";
inline constexpr std::string_view kEmptyStem = "EMPTY_STEM";
}  // namespace codes

/// Parses model output in the "Question N: stem a) .. b) .. c) .. d) ..
/// Correct answer: x) .." shape. Accepts "Q N" headers, "(Tag)" skill
/// markers, options split across lines and English glosses. Malformed
/// questions are reported in diagnostics and skipped; never throws on
/// arbitrary input.
ParseOutcome parse_quiz_block(std::string_view raw);

/// Canonical one-line form. Throws Error(InvalidQuiz) if validate_quiz fails.
std::string serialize_quiz(const Quiz& q);

/// One canonical line per quiz, newline-terminated.
std::string serialize_quizzes(std::span<const Quiz> quizzes);

}  // namespace arabiq::parser
