#include "arabiq/lint/arabic_lint.hpp"

#include "arabiq/core/error.hpp"
#include "arabiq/core/text.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <numeric>

namespace arabiq::lint {

namespace {

std::string format_ratio(double r) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", r);
  return buf;
}

bool has_arabic_base_letter(std::string_view s) {
  const auto cps = text::decode_utf8(s);
  return std::any_of(cps.begin(), cps.end(), [](char32_t c) { return text::is_arabic_base_letter(c); });
}

// Word-level pieces of a skeleton, with surrounding punctuation dropped.
std::vector<std::string> words_of(std::string_view skeleton) {
  std::vector<std::string> words;
  std::u32string current;
  auto flush = [&] {
    if (!current.empty()) {
      words.push_back(text::encode_utf8(current));
      current.clear();
    }
  };
  for (char32_t cp : text::decode_utf8(skeleton)) {
    if (text::is_arabic_letter(cp) || text::is_latin_letter(cp)) {
      current.push_back(cp);
    } else {
      flush();
    }
  }
  flush();
  return words;
}

}  // namespace

Lexicon Lexicon::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(Errc::ConfigError, "cannot read lexicon " + path.string());
  }
  std::vector<std::string> words;
  std::string line;
  while (std::getline(in, line)) {
    const std::string t = text::trim(line);
    if (t.empty() || t.front() == '#') {
      continue;
    }
    words.push_back(t);
  }
  return from_words(words);
}

Lexicon Lexicon::from_words(const std::vector<std::string>& words) {
  Lexicon lex;
  for (const auto& w : words) {
    std::string key = text::skeleton(w);
    if (!key.empty()) {
      lex.words_.insert(std::move(key));
    }
  }
  return lex;
}

bool Lexicon::contains(std::string_view word) const {
  return words_.count(text::skeleton(word)) > 0;
}

double diacritic_coverage(std::string_view text_ar) {
  const auto cps = text::decode_utf8(text::nfc(text::strip_bidi_controls(text_ar)));
  std::size_t marks = 0;
  std::size_t letters = 0;
  for (char32_t cp : cps) {
    if (text::is_arabic_mark(cp)) {
      ++marks;
    } else if (text::is_arabic_base_letter(cp)) {
      ++letters;
    }
  }
  if (letters == 0) {
    throw Error(Errc::NoArabicLetters, "text has no Arabic base letters");
  }
  return static_cast<double>(marks) / static_cast<double>(letters);
}

std::optional<Finding> detect_code_switch(std::string_view text_ar, std::optional<char> label) {
  std::size_t arabic = 0;
  std::size_t latin = 0;
  for (char32_t cp : text::decode_utf8(text::strip_bidi_controls(text_ar))) {
    if (text::is_arabic_letter(cp)) {
      ++arabic;
    } else if (text::is_latin_letter(cp)) {
      ++latin;
    }
  }
  if (latin == 0) {
    return std::nullopt;
  }
  if (arabic == 0) {
    return Finding{FindingCode::NoArabic, Severity::Error, label, "option has no Arabic letters"};
  }
  return Finding{FindingCode::CodeSwitch, Severity::Error, label,
                 "option mixes Arabic and Latin script (" + std::to_string(latin) + " Latin letters)"};
}

std::size_t levenshtein(std::u32string_view a, std::u32string_view b) {
  std::vector<std::size_t> prev(b.size() + 1);
  std::vector<std::size_t> cur(b.size() + 1);
  std::iota(prev.begin(), prev.end(), std::size_t{0});
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t subst = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, subst});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

std::vector<Finding> detect_duplicates(const Quiz& q, int near_duplicate_max_edit) {
  std::vector<Finding> out;
  std::vector<std::string> canon;
  std::vector<std::u32string> skel;
  for (const auto& o : q.options) {
    canon.push_back(text::canonical(o.text_ar));
    skel.push_back(text::decode_utf8(text::skeleton(o.text_ar)));
  }
  for (std::size_t i = 0; i < q.options.size(); ++i) {
    for (std::size_t j = i + 1; j < q.options.size(); ++j) {
      const std::string pair = std::string(1, q.options[i].label) + "," + q.options[j].label;
      if (canon[i].empty() || canon[j].empty()) {
        continue;
      }
      if (canon[i] == canon[j]) {
        out.push_back({FindingCode::DuplicateOption, Severity::Error, std::nullopt, pair});
      } else if (near_duplicate_max_edit >= 0 &&
                 levenshtein(skel[i], skel[j]) <= static_cast<std::size_t>(near_duplicate_max_edit)) {
        out.push_back({FindingCode::NearDuplicateOption, Severity::Warning, std::nullopt, pair});
      }
    }
  }
  return out;
}

Linter::Linter(LintConfig cfg) : cfg_(std::move(cfg)) {
  if (cfg_.lexicon_path) {
    lexicon_ = Lexicon::load(*cfg_.lexicon_path);
  }
}

Linter::Linter(LintConfig cfg, Lexicon lexicon) : cfg_(std::move(cfg)), lexicon_(std::move(lexicon)) {}

LintReport Linter::lint(const Quiz& q) const {
  LintReport report;
  report.quiz_id = q.id;

  for (const auto& o : q.options) {
    const std::string t = text::canonical(o.text_ar);
    if (t.empty()) {
      report.findings.push_back({FindingCode::EmptyOption, Severity::Error, o.label, "option text is empty"});
      report.diacritic_coverage[o.label] = 0.0;
      continue;
    }
    if (auto f = detect_code_switch(t, o.label)) {
      report.findings.push_back(std::move(*f));
    }
    if (!has_arabic_base_letter(t)) {
      report.diacritic_coverage[o.label] = 0.0;
      continue;
    }
    const double coverage = diacritic_coverage(t);
    report.diacritic_coverage[o.label] = coverage;
    if (coverage < cfg_.diacritic_threshold) {
      report.findings.push_back({FindingCode::LowDiacritics, Severity::Warning, o.label,
                                 "coverage " + format_ratio(coverage) + " below " +
                                     format_ratio(cfg_.diacritic_threshold)});
    }
    if (lexicon_) {
      const std::string skel = text::skeleton(t);
      bool known = lexicon_->contains(skel);
      if (!known) {
        const auto words = words_of(skel);
        known = !words.empty() && std::all_of(words.begin(), words.end(), [&](const std::string& w) {
          return lexicon_->contains(w);
        });
      }
      if (!known) {
        report.findings.push_back({FindingCode::LexiconMiss, Severity::Warning, o.label,
                                   "'" + skel + "' is not in the lexicon"});
      }
    }
  }

  auto dups = detect_duplicates(q, cfg_.near_duplicate_max_edit);
  report.findings.insert(report.findings.end(), dups.begin(), dups.end());

  if (!q.declared_correct_text.empty()) {
    const QuizOption* opt = q.option(q.declared_correct);
    if (opt != nullptr && text::canonical(opt->text_ar) != text::canonical(q.declared_correct_text)) {
      report.findings.push_back({FindingCode::CorrectTextMismatch, Severity::Error, q.declared_correct,
                                 "declared answer text does not match option " +
                                     std::string(1, q.declared_correct)});
    }
  }

  report.pass = std::none_of(report.findings.begin(), report.findings.end(),
                             [](const Finding& f) { return f.severity == Severity::Error; });
  return report;
}

LintReport lint_quiz(const Quiz& q, const LintConfig& cfg) { return Linter(cfg).lint(q); }

}  // namespace arabiq::lint
