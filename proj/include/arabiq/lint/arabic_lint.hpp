#pragma once

#include "arabiq/core/types.hpp"

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace arabiq::lint {

struct LintConfig {
  double diacritic_threshold = 0.75;
  int near_duplicate_max_edit = 1;
  std::optional<std::filesystem::path> lexicon_path;
};

/// Newline-delimited word list, matched on de-diacritized NFC skeletons.
/// Lines starting with '#' are comments.
class Lexicon {
public:
  Lexicon() = default;

  static Lexicon load(const std::filesystem::path& path);
  static Lexicon from_words(const std::vector<std::string>& words);

  [[nodiscard]] bool contains(std::string_view word) const;
  [[nodiscard]] std::size_t size() const noexcept { return words_.size(); }

private:
  std::unordered_set<std::string> words_;
};

/// Marks (U+064B..U+065F, U+0670) per Arabic base letter, computed on the NFC
/// form with bidi controls removed. Can exceed 1.0 (shadda plus vowel).
/// Throws Error(NoArabicLetters) when the text has no base letters.
double diacritic_coverage(std::string_view text_ar);

/// CODE_SWITCH when Arabic and Latin letters are mixed, NO_ARABIC when only
/// Latin letters are present.
std::optional<Finding> detect_code_switch(std::string_view text_ar,
                                          std::optional<char> label = std::nullopt);

std::size_t levenshtein(std::u32string_view a, std::u32string_view b);

std::vector<Finding> detect_duplicates(const Quiz& q, int near_duplicate_max_edit = 1);

class Linter {
public:
  explicit Linter(LintConfig cfg = {});
  Linter(LintConfig cfg, Lexicon lexicon);

  [[nodiscard]] LintReport lint(const Quiz& q) const;
  [[nodiscard]] const LintConfig& config() const noexcept { return cfg_; }

private:
  LintConfig cfg_;
  std::optional<Lexicon> lexicon_;
};

/// Convenience wrapper; loads the lexicon on every call when one is configured.
LintReport lint_quiz(const Quiz& q, const LintConfig& cfg = {});

}  // namespace arabiq::lint
