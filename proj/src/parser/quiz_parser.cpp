#include "arabiq/parser/quiz_parser.hpp"

#include "arabiq/core/error.hpp"
#include "arabiq/core/validate.hpp"

#include <algorithm>
#include <array>
#include <optional>

namespace arabiq::parser {

namespace {

constexpr bool is_blank(char c) noexcept { return c == ' ' || c == '\t'; }
constexpr bool is_ws(char c) noexcept {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}
constexpr bool is_digit(char c) noexcept { return c >= '0' && c <= '9'; }
constexpr char ascii_lower(char c) noexcept {
  return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
}

bool starts_with_ci(std::string_view s, std::size_t pos, std::string_view word) noexcept {
  if (pos > s.size() || s.size() - pos < word.size()) {
    return false;
  }
  for (std::size_t i = 0; i < word.size(); ++i) {
    if (ascii_lower(s[pos + i]) != word[i]) {
      return false;
    }
  }
  return true;
}

std::size_t find_ci(std::string_view s, std::string_view word, std::size_t from) noexcept {
  for (std::size_t p = from; p + word.size() <= s.size(); ++p) {
    if (starts_with_ci(s, p, word)) {
      return p;
    }
  }
  return std::string_view::npos;
}

// The input is normalized (bidi marks gone, \r\n folded) before scanning so
// byte offsets and line numbers refer to one string.
std::string prepare(std::string_view raw) {
  std::string s = strip_bidi_controls(raw);
  std::string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '\r') {
      if (i + 1 < s.size() && s[i + 1] == '\n') {
        continue;
      }
      out.push_back('\n');
      continue;
    }
    out.push_back(s[i]);
  }
  return out;
}

class LineIndex {
public:
  explicit LineIndex(std::string_view s) {
    starts_.push_back(0);
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (s[i] == '\n') {
        starts_.push_back(i + 1);
      }
    }
  }

  [[nodiscard]] int line_of(std::size_t pos) const {
    const auto it = std::upper_bound(starts_.begin(), starts_.end(), pos);
    return static_cast<int>(it - starts_.begin());
  }

  [[nodiscard]] const std::vector<std::size_t>& starts() const { return starts_; }

private:
  std::vector<std::size_t> starts_;
};

struct Header {
  std::size_t begin = 0;       // first byte belonging to the header (bullet included)
  std::size_t body_begin = 0;  // first byte after the colon
  int ordinal = 0;
  SkillTag skill = SkillTag::Untagged;
};

// Matches `("Question"|"Q") <int> (":" | "(" tag ")" ":")` at `pos`.
std::optional<Header> match_header(std::string_view s, std::size_t begin, std::size_t pos) {
  std::size_t k = pos;
  if (starts_with_ci(s, k, "question")) {
    k += 8;
  } else if (k < s.size() && s[k] == 'Q') {
    k += 1;
  } else {
    return std::nullopt;
  }
  while (k < s.size() && is_blank(s[k])) {
    ++k;
  }
  if (k < s.size() && s[k] == '#') {
    ++k;
  }
  const std::size_t digits_begin = k;
  while (k < s.size() && is_digit(s[k]) && k - digits_begin < 6) {
    ++k;
  }
  if (k < s.size() && is_digit(s[k])) {
    return std::nullopt;
  }
  Header h;
  h.begin = begin;
  // Numberless "Q:" headers get their position as ordinal later.
  h.ordinal = k == digits_begin ? 0 : std::stoi(std::string(s.substr(digits_begin, k - digits_begin)));
  while (k < s.size() && is_blank(s[k])) {
    ++k;
  }
  if (k < s.size() && s[k] == '(') {
    const std::size_t close = s.find(')', k + 1);
    if (close == std::string_view::npos || close - k > 40) {
      return std::nullopt;
    }
    const std::string_view tag = s.substr(k + 1, close - k - 1);
    if (tag.find('\n') != std::string_view::npos) {
      return std::nullopt;
    }
    h.skill = parse_skill(text::trim(tag)).value_or(SkillTag::Untagged);
    k = close + 1;
    while (k < s.size() && is_blank(s[k])) {
      ++k;
    }
  }
  while (k < s.size() && s[k] == '*') {
    ++k;
  }
  if (k >= s.size() || s[k] != ':') {
    return std::nullopt;
  }
  ++k;
  while (k < s.size() && s[k] == '*') {
    ++k;
  }
  h.body_begin = k;
  return h;
}

// Skips indentation and list/markdown decoration at a line start.
std::size_t skip_decoration(std::string_view s, std::size_t p) {
  while (p < s.size() && is_blank(s[p])) {
    ++p;
  }
  for (;;) {
    if (p < s.size() && (s[p] == '-' || s[p] == '*' || s[p] == '#')) {
      ++p;
    } else if (s.substr(p, 3) == "\xE2\x80\xA2") {  // U+2022 bullet
      p += 3;
    } else {
      break;
    }
    while (p < s.size() && is_blank(s[p])) {
      ++p;
    }
  }
  return p;
}

std::vector<Header> find_headers(std::string_view s, const LineIndex& lines) {
  std::vector<Header> headers;
  for (std::size_t start : lines.starts()) {
    if (start > s.size()) {
      continue;
    }
    const std::size_t p = skip_decoration(s, start);
    if (auto h = match_header(s, start, p)) {
      headers.push_back(*h);
    }
  }
  // Mid-line " - Question N:" continuations, as produced when a model puts the
  // whole set on one line.
  for (std::size_t p = 1; p < s.size(); ++p) {
    if (s[p] != '-' || !is_blank(s[p - 1])) {
      continue;
    }
    std::size_t k = p + 1;
    while (k < s.size() && is_blank(s[k])) {
      ++k;
    }
    if (auto h = match_header(s, p, k)) {
      headers.push_back(*h);
    }
  }
  std::sort(headers.begin(), headers.end(),
            [](const Header& a, const Header& b) { return a.begin < b.begin; });
  // A header must start after the previous one's colon.
  std::vector<Header> out;
  for (const auto& h : headers) {
    if (out.empty() || h.begin >= out.back().body_begin) {
      out.push_back(h);
    }
  }
  return out;
}

struct Gloss {
  std::size_t begin;
  std::size_t end;
  std::string text;
};

// "Translation (..)" or "Translation: ..." up to the end of the line.
std::vector<Gloss> find_glosses(std::string_view region) {
  std::vector<Gloss> out;
  std::size_t from = 0;
  while (true) {
    const std::size_t p = find_ci(region, "translation", from);
    if (p == std::string_view::npos) {
      break;
    }
    if (p > 0 && !is_ws(region[p - 1]) && region[p - 1] != '(') {
      from = p + 1;
      continue;
    }
    std::size_t k = p + 11;
    bool colon = false;
    while (k < region.size() && (is_blank(region[k]) || region[k] == ':')) {
      colon = colon || region[k] == ':';
      ++k;
    }
    if (!colon && (k >= region.size() || region[k] != '(')) {
      from = p + 1;
      continue;
    }
    std::size_t end = 0;
    std::size_t text_begin = k;
    std::size_t text_end = 0;
    if (k < region.size() && region[k] == '(') {
      const std::size_t close = region.find(')', k + 1);
      end = close == std::string_view::npos ? region.size() : close + 1;
      text_begin = k + 1;
      text_end = close == std::string_view::npos ? region.size() : close;
    } else {
      const std::size_t nl = region.find('\n', k);
      end = nl == std::string_view::npos ? region.size() : nl;
      text_end = end;
    }
    const std::size_t begin = (p > 0 && region[p - 1] == '(') ? p - 1 : p;
    out.push_back({begin, end, text::collapse_whitespace(region.substr(text_begin, text_end - text_begin))});
    from = end;
  }
  return out;
}

std::string excise(std::string_view region, const std::vector<Gloss>& glosses) {
  std::string out;
  std::size_t cursor = 0;
  for (const auto& g : glosses) {
    out.append(region.substr(cursor, g.begin - cursor));
    out.push_back(' ');
    cursor = g.end;
  }
  out.append(region.substr(std::min(cursor, region.size())));
  return out;
}

struct Marker {
  std::size_t pos;
  char label;
};

std::vector<Marker> find_markers(std::string_view region) {
  std::vector<Marker> out;
  for (std::size_t p = 0; p + 1 < region.size(); ++p) {
    if (is_option_label(region[p]) && region[p + 1] == ')' && (p == 0 || is_ws(region[p - 1]))) {
      out.push_back({p, region[p]});
    }
  }
  return out;
}

std::size_t find_correct_marker(std::string_view region, std::size_t& after_colon) {
  std::size_t from = 0;
  while (true) {
    const std::size_t p = find_ci(region, "correct answer", from);
    if (p == std::string_view::npos) {
      return p;
    }
    std::size_t k = p + 14;
    while (k < region.size() && is_blank(region[k])) {
      ++k;
    }
    if (k < region.size() && (region[k] == ':' || region[k] == '-')) {
      after_colon = k + 1;
      return p;
    }
    from = p + 1;
  }
}

std::string clean(std::string_view s) { return text::canonical(s); }

void parse_block(std::string_view s, const Header& h, std::size_t block_end, const LineIndex& lines,
                 ParseOutcome& out) {
  const std::string_view body = s.substr(h.body_begin, block_end - h.body_begin);
  const int header_line = lines.line_of(h.begin);
  std::vector<Diagnostic> diags;
  auto diag = [&](std::string_view code, int line, std::string message,
                  std::optional<char> label = std::nullopt) {
    diags.push_back(Diagnostic{std::string(code), line, std::move(message), h.ordinal, label});
  };

  std::size_t after_colon = 0;
  const std::size_t correct_pos = find_correct_marker(body, after_colon);
  const std::string_view options_raw =
      correct_pos == std::string_view::npos ? body : body.substr(0, correct_pos);

  const auto glosses = find_glosses(options_raw);
  for (const auto& g : glosses) {
    out.annotations.push_back({h.ordinal, g.text});
  }
  const std::string options_region = excise(options_raw, glosses);

  const auto markers = find_markers(options_region);
  std::array<int, 4> counts{};
  for (const auto& m : markers) {
    ++counts[static_cast<std::size_t>(m.label - 'a')];
  }
  bool malformed = false;
  for (char label : kOptionLabels) {
    if (counts[static_cast<std::size_t>(label - 'a')] > 1) {
      diag(codes::kDuplicateLabel, header_line, std::string("label ") + label + ") appears more than once",
           label);
      malformed = true;
    }
  }

  // Walk labels in order; a label that only appears before its predecessor
  // counts as missing.
  std::array<std::optional<std::size_t>, 4> found{};
  std::size_t cursor = 0;
  for (char label : kOptionLabels) {
    const auto it = std::find_if(markers.begin(), markers.end(), [&](const Marker& m) {
      return m.label == label && m.pos >= cursor;
    });
    if (it == markers.end()) {
      diag(codes::kMissingOption, header_line, std::string("option ") + label + ") not found", label);
      malformed = true;
      continue;
    }
    found[static_cast<std::size_t>(label - 'a')] = it->pos;
    cursor = it->pos + 2;
  }

  std::size_t first_marker = options_region.size();
  for (const auto& f : found) {
    if (f) {
      first_marker = std::min(first_marker, *f);
    }
  }
  Quiz quiz;
  quiz.ordinal = h.ordinal;
  quiz.skill = h.skill;
  quiz.stem = clean(std::string_view(options_region).substr(0, first_marker));
  while (!quiz.stem.empty() && quiz.stem.front() == '*') {
    quiz.stem = text::trim(std::string_view(quiz.stem).substr(1));
  }
  if (quiz.stem.empty()) {
    diag(codes::kEmptyStem, header_line, "question stem is empty");
    malformed = true;
  }

  for (std::size_t i = 0; i < 4; ++i) {
    if (!found[i]) {
      continue;
    }
    const std::size_t begin = *found[i] + 2;
    std::size_t end = options_region.size();
    for (std::size_t j = i + 1; j < 4; ++j) {
      if (found[j]) {
        end = *found[j];
        break;
      }
    }
    const char label = kOptionLabels[i];
    QuizOption option = QuizOption::make(label, clean(std::string_view(options_region).substr(begin, end - begin)));
    if (option.text_ar.empty()) {
      diag(codes::kMissingOption, header_line, std::string("option ") + label + ") is empty", label);
      malformed = true;
    }
    quiz.options.push_back(std::move(option));
  }

  if (correct_pos == std::string_view::npos) {
    diag(codes::kMissingCorrect, header_line, "no 'Correct answer:' clause");
    malformed = true;
  } else {
    const int correct_line = lines.line_of(h.body_begin + correct_pos);
    std::size_t k = after_colon;
    while (k < body.size() && is_ws(body[k])) {
      ++k;
    }
    if (k < body.size() && body[k] == '(') {
      ++k;
    }
    const std::size_t nl = body.find('\n', k);
    const std::size_t line_end = nl == std::string_view::npos ? body.size() : nl;
    if (k >= line_end) {
      diag(codes::kMissingCorrect, correct_line, "'Correct answer:' has no label");
      malformed = true;
    } else {
      const char c = ascii_lower(body[k]);
      const bool terminated = k + 1 >= line_end || body[k + 1] == ')' || body[k + 1] == '.' ||
                              body[k + 1] == ':' || is_ws(body[k + 1]);
      // Only Latin a-d count as labels; Arabic letters such as "أ" are refused.
      if (!is_option_label(c) || static_cast<unsigned char>(body[k]) >= 0x80 || !terminated) {
        const std::u32string cp = text::decode_utf8(body.substr(k, std::min<std::size_t>(4, line_end - k)));
        std::string shown;
        if (!cp.empty()) {
          text::append_utf8(shown, cp.front());
        }
        diag(codes::kCorrectLabelUnknown, correct_line, "correct answer label '" + shown + "' is not a-d");
        malformed = true;
      } else {
        quiz.declared_correct = c;
        std::size_t t = k + 1;
        if (t < line_end && (body[t] == ')' || body[t] == '.' || body[t] == ':')) {
          ++t;
        }
        std::string_view declared = body.substr(t, line_end - t);
        // A trailing gloss on the same line is not part of the answer text.
        const auto trailing = find_glosses(declared);
        if (!trailing.empty()) {
          for (const auto& g : trailing) {
            out.annotations.push_back({h.ordinal, g.text});
          }
          declared = declared.substr(0, trailing.front().begin);
        }
        quiz.declared_correct_text = text::trim(text::nfc(clean(declared)));
      }
    }
    if (!malformed && !quiz.declared_correct_text.empty()) {
      const QuizOption* opt = quiz.option(quiz.declared_correct);
      if (opt != nullptr && clean(opt->text_ar) != clean(quiz.declared_correct_text)) {
        diag(codes::kCorrectTextMismatch, correct_line,
             std::string("answer text differs from option ") + quiz.declared_correct + ")",
             quiz.declared_correct);
      }
    }
  }

  out.diagnostics.insert(out.diagnostics.end(), diags.begin(), diags.end());
  if (!malformed) {
    out.quizzes.push_back(std::move(quiz));
  }
}

std::string_view skill_title(SkillTag tag) {
  switch (tag) {
    case SkillTag::Actions: return "Actions";
    case SkillTag::Objects: return "Objects";
    case SkillTag::Colors: return "Colors";
    case SkillTag::Adjectives: return "Adjectives";
    case SkillTag::Untagged: return "";
  }
  return "";
}

}  // namespace

bool ParseOutcome::has(std::string_view code) const noexcept {
  return std::any_of(diagnostics.begin(), diagnostics.end(),
                     [code](const Diagnostic& d) { return d.code == code; });
}

ParseOutcome parse_quiz_block(std::string_view raw) {
  ParseOutcome out;
  const std::string s = prepare(raw);
  const LineIndex lines(s);
  const auto headers = find_headers(s, lines);
  if (headers.empty()) {
    out.diagnostics.push_back(
        Diagnostic{std::string(codes::kNoQuestions), 1, "no question headers found", 0, std::nullopt});
    return out;
  }
  for (std::size_t i = 0; i < headers.size(); ++i) {
    const std::size_t end = i + 1 < headers.size() ? headers[i + 1].begin : s.size();
    Header h = headers[i];
    if (h.ordinal == 0) {
      h.ordinal = static_cast<int>(i) + 1;
    }
    parse_block(s, h, end, lines, out);
  }
  return out;
}

std::string serialize_quiz(const Quiz& q) {
  const ValidationResult v = validate_quiz(q);
  if (!v.ok()) {
    throw Error(Errc::InvalidQuiz, "cannot serialize invalid quiz: " + v.violations.front().message);
  }
  std::string out = "- Question " + std::to_string(q.ordinal);
  if (q.skill != SkillTag::Untagged) {
    out += " (";
    out += skill_title(q.skill);
    out += ")";
  }
  out += ": ";
  out += q.stem;
  for (char label : kOptionLabels) {
    out += ' ';
    out += label;
    out += ") ";
    out += q.option(label)->text_ar;
  }
  out += " Correct answer: ";
  out += q.declared_correct;
  out += ") ";
  out += q.declared_correct_text.empty() ? q.option(q.declared_correct)->text_ar
                                         : q.declared_correct_text;
  return out;
}

std::string serialize_quizzes(std::span<const Quiz> quizzes) {
  std::string out;
  for (const auto& q : quizzes) {
    out += serialize_quiz(q);
    out += '\n';
  }
  return out;
}

}  // namespace arabiq::parser
