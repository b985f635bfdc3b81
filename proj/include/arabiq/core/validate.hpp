#pragma once

#include "arabiq/core/types.hpp"

#include <string>
#include <vector>

namespace arabiq {

struct Violation {
  std::string code;
  std::string message;

  bool operator==(const Violation&) const = default;
};

struct ValidationResult {
  std::vector<Violation> violations;

  [[nodiscard]] bool ok() const noexcept { return violations.empty(); }
  [[nodiscard]] bool has(std::string_view code) const noexcept;
};

/// Structural checks only. Codes: OPTION_COUNT, LABEL_INVALID, LABEL_DUPLICATE,
/// LABEL_SET, CORRECT_LABEL_UNKNOWN, OPTION_EMPTY, EMPTY_STEM, ORDINAL.
ValidationResult validate_quiz(const Quiz& q);

}  // namespace arabiq
