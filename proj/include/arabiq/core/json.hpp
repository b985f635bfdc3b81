#pragma once

// Canonical JSON encodings (snake_case field names) for every domain type.
// Decoders throw nlohmann::json exceptions or arabiq::Error(MalformedInput)
// on missing or ill-typed fields.

#include "arabiq/core/types.hpp"

#include <json.hpp>

namespace arabiq {

void to_json(nlohmann::json& j, const ImageRecord& v);
void from_json(const nlohmann::json& j, ImageRecord& v);
void to_json(nlohmann::json& j, const Description& v);
void from_json(const nlohmann::json& j, Description& v);
void to_json(nlohmann::json& j, const QuizOption& v);
void from_json(const nlohmann::json& j, QuizOption& v);
void to_json(nlohmann::json& j, const Quiz& v);
void from_json(const nlohmann::json& j, Quiz& v);
void to_json(nlohmann::json& j, const ProviderProfile& v);
void from_json(const nlohmann::json& j, ProviderProfile& v);
void to_json(nlohmann::json& j, const PromptTemplate& v);
void from_json(const nlohmann::json& j, PromptTemplate& v);
void to_json(nlohmann::json& j, const Finding& v);
void from_json(const nlohmann::json& j, Finding& v);
void to_json(nlohmann::json& j, const LintReport& v);
void from_json(const nlohmann::json& j, LintReport& v);
void to_json(nlohmann::json& j, const Diagnostic& v);
void from_json(const nlohmann::json& j, Diagnostic& v);
void to_json(nlohmann::json& j, const RejectedQuiz& v);
void from_json(const nlohmann::json& j, RejectedQuiz& v);
void to_json(nlohmann::json& j, const QuizSet& v);
void from_json(const nlohmann::json& j, QuizSet& v);
void to_json(nlohmann::json& j, const AttemptRecord& v);
void from_json(const nlohmann::json& j, AttemptRecord& v);
void to_json(nlohmann::json& j, const Feedback& v);
void from_json(const nlohmann::json& j, Feedback& v);
void to_json(nlohmann::json& j, const AnnotationRecord& v);
void from_json(const nlohmann::json& j, AnnotationRecord& v);
void to_json(nlohmann::json& j, const Session& v);
void from_json(const nlohmann::json& j, Session& v);

}  // namespace arabiq
