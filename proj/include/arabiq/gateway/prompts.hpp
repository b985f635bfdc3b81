#pragma once

#include "arabiq/core/types.hpp"

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace arabiq::gateway {

// Control text for the Bare (non-prompted) condition.
inline constexpr std::string_view kBarePrompt = "Describe the image.";

using PromptVars = std::map<std::string, std::string>;

/// Placeholders are `{name}` with name = [A-Za-z_][A-Za-z0-9_]*. Other braces
/// are literal. Throws Error(MissingVar) naming the first unbound placeholder;
/// extra vars are ignored.
std::string render_prompt(const PromptTemplate& t, const PromptVars& vars);

std::vector<std::string> placeholders(std::string_view body);

/// Templates compiled in from config/prompts.
PromptTemplate default_describe_template();
PromptTemplate default_quiz_template();

/// Reads a template file; one trailing newline is dropped.
PromptTemplate load_template(const std::filesystem::path& path, std::string template_id, PromptTask task);

/// "one".."ten", digits above that.
std::string number_word(int n);

}  // namespace arabiq::gateway
