#include "arabiq/gateway/prompts.hpp"

#include "arabiq/core/error.hpp"
#include "default_prompts.hpp"

#include <array>
#include <fstream>
#include <sstream>

namespace arabiq::gateway {

namespace {

bool ident_start(char c) { return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || c == '_'; }
bool ident_char(char c) { return ident_start(c) || (c >= '0' && c <= '9'); }

// Length of the placeholder starting at body[i] == '{', or 0.
std::size_t placeholder_len(std::string_view body, std::size_t i) {
  std::size_t j = i + 1;
  if (j >= body.size() || !ident_start(body[j])) {
    return 0;
  }
  while (j < body.size() && ident_char(body[j])) {
    ++j;
  }
  return (j < body.size() && body[j] == '}') ? j - i + 1 : 0;
}

}  // namespace

std::vector<std::string> placeholders(std::string_view body) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < body.size(); ++i) {
    if (body[i] != '{') continue;
    if (const std::size_t n = placeholder_len(body, i)) {
      out.emplace_back(body.substr(i + 1, n - 2));
      i += n - 1;
    }
  }
  return out;
}

std::string render_prompt(const PromptTemplate& t, const PromptVars& vars) {
  const std::string_view body = t.body;
  std::string out;
  out.reserve(body.size());
  for (std::size_t i = 0; i < body.size(); ++i) {
    const std::size_t n = body[i] == '{' ? placeholder_len(body, i) : 0;
    if (n == 0) {
      out.push_back(body[i]);
      continue;
    }
    const std::string name(body.substr(i + 1, n - 2));
    const auto it = vars.find(name);
    if (it == vars.end()) {
      throw Error(Errc::MissingVar, name);
    }
    out += it->second;
    i += n - 1;
  }
  return out;
}

PromptTemplate default_describe_template() {
  return PromptTemplate::make("describe", PromptTask::DescribeImage, generated::kDescribePrompt);
}

PromptTemplate default_quiz_template() {
  return PromptTemplate::make("quiz", PromptTask::GenerateQuiz, generated::kQuizPrompt);
}

PromptTemplate load_template(const std::filesystem::path& path, std::string template_id, PromptTask task) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(Errc::ConfigError, "cannot read template " + path.string());
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  std::string body = ss.str();
  if (!body.empty() && body.back() == '\n') {
    body.pop_back();
  }
  return PromptTemplate::make(std::move(template_id), task, std::move(body));
}

std::string number_word(int n) {
  static constexpr std::array<const char*, 11> words = {"zero", "one", "two", "three", "four", "five",
                                                        "six",  "seven", "eight", "nine", "ten"};
  if (n >= 0 && n <= 10) {
    return words[static_cast<std::size_t>(n)];
  }
  return std::to_string(n);
}

}  // namespace arabiq::gateway
