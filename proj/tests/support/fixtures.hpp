#pragma once

// Shared test fixtures: the two sample quizzes, file helpers and random
// generators for property tests.

#include "arabiq/core/text.hpp"
#include "arabiq/core/types.hpp"

#include <unistd.h>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace arabiq::fixtures {

inline std::filesystem::path testdata(const std::string& rel) {
  return std::filesystem::path(ARABIQ_TESTDATA) / rel;
}

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::filesystem::path& p, const std::string& content) {
  std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out << content;
}

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
  explicit TempDir(const std::string& tag) {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("arabiq_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  [[nodiscard]] const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& rel) const { return path_ / rel; }

private:
  std::filesystem::path path_;
};

inline Quiz make_quiz(int ordinal, std::string stem, std::vector<std::string> opts, char correct,
                      SkillTag skill = SkillTag::Untagged) {
  Quiz q;
  q.ordinal = ordinal;
  q.stem = std::move(stem);
  for (std::size_t i = 0; i < opts.size(); ++i) {
    q.options.push_back(QuizOption::make(static_cast<char>('a' + i), opts[i]));
  }
  q.declared_correct = correct;
  if (const QuizOption* o = q.option(correct)) {
    q.declared_correct_text = o->text_ar;
  }
  q.skill = skill;
  return q;
}

inline Quiz sample_quiz1() {
  return make_quiz(1, "What is the boy doing?", {"يَكْتُبُ", "يَجْلِسُ", "يَأْكُلُ", "يَشْرَبُ"}, 'a');
}

inline Quiz sample_quiz2() {
  return make_quiz(2, "What color is the book?", {"أَحْمَرٌ", "أَزْرَقُ", "أَخْضَرُ", "أَصْفَرُ"}, 'b');
}

inline const std::string& sample_block_text() {
  static const std::string text =
      "- Question 1: What is the boy doing? a) يَكْتُبُ b) يَجْلِسُ c) يَأْكُلُ d) يَشْرَبُ "
      "Correct answer: a) يَكْتُبُ\n"
      "- Question 2 : What color is the book? a) أَحْمَرٌ b) أَزْرَقُ c) أَخْضَرُ d) أَصْفَرُ "
      "Correct answer: b) أَزْرَقُ\n";
  return text;
}

class Gen {
public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  int uniform(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  bool coin(double p = 0.5) { return std::bernoulli_distribution(p)(rng_); }

  template <typename T>
  const T& pick(const std::vector<T>& v) {
    return v[static_cast<std::size_t>(uniform(0, static_cast<int>(v.size()) - 1))];
  }

  std::string arabic_word() {
    std::u32string w;
    const int letters = uniform(2, 6);
    for (int i = 0; i < letters; ++i) {
      w.push_back(static_cast<char32_t>(uniform(0x0628, 0x063A)));
      if (coin(0.7)) {
        w.push_back(static_cast<char32_t>(uniform(0x064B, 0x0652)));
      }
    }
    return text::encode_utf8(w);
  }

  std::string arabic_phrase() {
    std::string s = arabic_word();
    const int extra = uniform(0, 2);
    for (int i = 0; i < extra; ++i) {
      s += " " + arabic_word();
    }
    return s;
  }

  std::string english_stem() {
    static const std::vector<std::string> words = {
        "What", "is", "the", "boy", "doing", "color", "of", "book", "which", "object",
        "near", "table", "girl", "holding", "where", "kind", "animal", "big", "small", "red"};
    std::string s = pick(words);
    const int n = uniform(1, 8);
    for (int i = 0; i < n; ++i) {
      s += " " + pick(words);
    }
    return s + "?";
  }

  Quiz valid_quiz() {
    std::vector<std::string> opts;
    for (int i = 0; i < 4; ++i) {
      opts.push_back(arabic_phrase());
    }
    static const std::vector<SkillTag> skills = {SkillTag::Actions, SkillTag::Objects,
                                                 SkillTag::Colors, SkillTag::Adjectives,
                                                 SkillTag::Untagged};
    return make_quiz(uniform(1, 99), text::canonical(english_stem()), opts,
                     static_cast<char>('a' + uniform(0, 3)), pick(skills));
  }

  // Arbitrary valid UTF-8 biased toward fragments of the quiz grammar.
  std::string fuzz_text() {
    static const std::vector<std::string> fragments = {
        "Question", "Q", " ", "  ", "\n", "\r\n", "-", ":", "(", ")", "(Actions)", "1", "2", "42",
        "a)", "b)", "c)", "d)", "e)", " a) ", " b) ", " c) ", " d) ", "Correct answer:",
        "correct answer -", "Translation (", "Translation:", "‏", "‫", "⁩",
        "يَكْتُبُ", "أ)", "ّ", "ٌ", "**", "#", "•", "Q 1 (", "Question 99999999:"};
    if (coin(0.3)) return mutated_block(fragments);
    std::string s;
    const int parts = uniform(0, 40);
    for (int i = 0; i < parts; ++i) {
      if (coin(0.75)) {
        s += pick(fragments);
      } else {
        char32_t cp = 0;
        do {
          cp = static_cast<char32_t>(uniform(1, coin(0.8) ? 0x07FF : 0x10FFFF));
        } while (cp >= 0xD800 && cp <= 0xDFFF);
        text::append_utf8(s, cp);
      }
    }
    return s;
  }

  // A well-formed block with a few random splices, deletions and duplications,
  // cut on codepoint boundaries so the result stays valid UTF-8.
  std::string mutated_block(const std::vector<std::string>& fragments) {
    std::string s = sample_block_text();
    auto boundary = [&](std::size_t i) {
      while (i < s.size() && (static_cast<unsigned char>(s[i]) & 0xC0) == 0x80) ++i;
      return i;
    };
    const int edits = uniform(0, 4);
    for (int e = 0; e < edits && !s.empty(); ++e) {
      const std::size_t at = boundary(static_cast<std::size_t>(uniform(0, static_cast<int>(s.size()) - 1)));
      const std::size_t end = boundary(std::min(s.size(), at + static_cast<std::size_t>(uniform(1, 30))));
      switch (uniform(0, 2)) {
        case 0:
          s.insert(at, pick(fragments));
          break;
        case 1:
          s.erase(at, end - at);
          break;
        default:
          s.insert(at, s.substr(at, end - at));
      }
    }
    return s;
  }

  std::mt19937_64& engine() { return rng_; }

private:
  std::mt19937_64 rng_;
};

}  // namespace arabiq::fixtures
