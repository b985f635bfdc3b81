#include "arabiq/core/validate.hpp"

#include "arabiq/core/text.hpp"

#include <algorithm>
#include <array>

namespace arabiq {

bool ValidationResult::has(std::string_view code) const noexcept {
  return std::any_of(violations.begin(), violations.end(),
                     [code](const Violation& v) { return v.code == code; });
}

ValidationResult validate_quiz(const Quiz& q) {
  ValidationResult result;
  auto add = [&](std::string code, std::string message) {
    result.violations.push_back({std::move(code), std::move(message)});
  };

  if (q.ordinal < 1) {
    add("ORDINAL", "ordinal must be positive");
  }
  if (text::trim(q.stem).empty()) {
    add("EMPTY_STEM", "stem is empty");
  }
  if (q.options.size() != 4) {
    add("OPTION_COUNT", "expected 4 options, found " + std::to_string(q.options.size()));
  }

  std::array<int, 4> seen{};
  for (const auto& option : q.options) {
    if (!is_option_label(option.label)) {
      add("LABEL_INVALID", std::string("option label '") + option.label + "' is not one of a-d");
      continue;
    }
    if (++seen[static_cast<std::size_t>(option.label - 'a')] == 2) {
      add("LABEL_DUPLICATE", std::string("label '") + option.label + "' appears more than once");
    }
    if (text::trim(option.text_ar).empty()) {
      add("OPTION_EMPTY", std::string("option ") + option.label + " has no text");
    }
  }
  if (std::any_of(seen.begin(), seen.end(), [](int n) { return n != 1; })) {
    add("LABEL_SET", "option labels are not exactly {a,b,c,d}");
  }

  if (!is_option_label(q.declared_correct) || q.option(q.declared_correct) == nullptr) {
    add("CORRECT_LABEL_UNKNOWN",
        std::string("declared correct label '") + q.declared_correct + "' is not an option");
  }
  return result;
}

}  // namespace arabiq
