#include "arabiq/core/json.hpp"

#include "arabiq/core/error.hpp"

namespace arabiq {

using nlohmann::json;

namespace {

const json& field(const json& j, const char* name) {
  if (!j.is_object()) {
    throw Error(Errc::MalformedInput, "expected a JSON object");
  }
  const auto it = j.find(name);
  if (it == j.end()) {
    throw Error(Errc::MalformedInput, std::string("missing field '") + name + "'");
  }
  return *it;
}

std::string str(const json& j, const char* name) {
  const json& v = field(j, name);
  if (!v.is_string()) {
    throw Error(Errc::MalformedInput, std::string("field '") + name + "' must be a string");
  }
  return v.get<std::string>();
}

std::string str_or(const json& j, const char* name, std::string fallback) {
  const auto it = j.find(name);
  if (it == j.end() || it->is_null()) {
    return fallback;
  }
  if (!it->is_string()) {
    throw Error(Errc::MalformedInput, std::string("field '") + name + "' must be a string");
  }
  return it->get<std::string>();
}

int integer(const json& j, const char* name) {
  const json& v = field(j, name);
  if (!v.is_number_integer()) {
    throw Error(Errc::MalformedInput, std::string("field '") + name + "' must be an integer");
  }
  return v.get<int>();
}

int integer_or(const json& j, const char* name, int fallback) {
  const auto it = j.find(name);
  if (it == j.end() || it->is_null()) {
    return fallback;
  }
  if (!it->is_number_integer()) {
    throw Error(Errc::MalformedInput, std::string("field '") + name + "' must be an integer");
  }
  return it->get<int>();
}

bool boolean(const json& j, const char* name) {
  const json& v = field(j, name);
  if (!v.is_boolean()) {
    throw Error(Errc::MalformedInput, std::string("field '") + name + "' must be a boolean");
  }
  return v.get<bool>();
}

char label_char(const json& j, const char* name) {
  const std::string s = str(j, name);
  if (s.size() != 1) {
    throw Error(Errc::MalformedInput, std::string("field '") + name + "' must be one character");
  }
  return s[0];
}

template <typename E>
E enum_field(const json& j, const char* name, std::optional<E> (*parse)(std::string_view) noexcept) {
  const std::string s = str(j, name);
  if (auto v = parse(s)) {
    return *v;
  }
  throw Error(Errc::MalformedInput, std::string("field '") + name + "' has unknown value '" + s + "'");
}

Timestamp time_field(const json& j, const char* name) {
  const std::string s = str(j, name);
  if (auto t = parse_timestamp(s)) {
    return *t;
  }
  throw Error(Errc::MalformedInput, std::string("field '") + name + "' is not a UTC timestamp");
}

}  // namespace

void to_json(json& j, const ImageRecord& v) {
  j = json{{"id", v.id},
           {"source", to_string(v.source)},
           {"locator", v.locator},
           {"sha256", v.sha256},
           {"complexity", to_string(v.complexity)},
           {"created_at", format_timestamp(v.created_at)}};
}

void from_json(const json& j, ImageRecord& v) {
  v.id = str(j, "id");
  v.source = enum_field(j, "source", &parse_image_source);
  v.locator = str(j, "locator");
  v.sha256 = str(j, "sha256");
  v.complexity = enum_field(j, "complexity", &parse_complexity);
  v.created_at = time_field(j, "created_at");
}

void to_json(json& j, const Description& v) {
  j = json{{"id", v.id},
           {"image_id", v.image_id},
           {"model_id", v.model_id},
           {"condition", to_string(v.condition)},
           {"text", v.text},
           {"created_at", format_timestamp(v.created_at)}};
}

void from_json(const json& j, Description& v) {
  v.id = str(j, "id");
  v.image_id = str(j, "image_id");
  v.model_id = str(j, "model_id");
  v.condition = enum_field(j, "condition", &parse_condition);
  v.text = str(j, "text");
  v.created_at = time_field(j, "created_at");
}

void to_json(json& j, const QuizOption& v) {
  j = json{{"label", std::string(1, v.label)}, {"text_ar", v.text_ar}};
}

void from_json(const json& j, QuizOption& v) {
  v.label = label_char(j, "label");
  v.text_ar = str(j, "text_ar");
}

void to_json(json& j, const Quiz& v) {
  j = json{{"id", v.id},
           {"image_id", v.image_id},
           {"description_id", v.description_id},
           {"model_id", v.model_id},
           {"ordinal", v.ordinal},
           {"stem", v.stem},
           {"options", v.options},
           {"declared_correct", std::string(1, v.declared_correct)},
           {"declared_correct_text", v.declared_correct_text},
           {"skill", to_string(v.skill)}};
}

void from_json(const json& j, Quiz& v) {
  v.id = str_or(j, "id", "");
  v.image_id = str_or(j, "image_id", "");
  v.description_id = str_or(j, "description_id", "");
  v.model_id = str_or(j, "model_id", "");
  v.ordinal = integer(j, "ordinal");
  v.stem = str(j, "stem");
  const json& opts = field(j, "options");
  if (!opts.is_array()) {
    throw Error(Errc::MalformedInput, "field 'options' must be an array");
  }
  v.options.clear();
  for (const auto& o : opts) {
    v.options.push_back(o.get<QuizOption>());
  }
  v.declared_correct = label_char(j, "declared_correct");
  v.declared_correct_text = str_or(j, "declared_correct_text", "");
  v.skill = j.contains("skill") ? enum_field(j, "skill", &parse_skill) : SkillTag::Untagged;
}

void to_json(json& j, const ProviderProfile& v) {
  j = json{{"profile_id", v.profile_id},       {"endpoint_url", v.endpoint_url},
           {"model_name", v.model_name},       {"modality", to_string(v.modality)},
           {"api_key_env", v.api_key_env},     {"timeout_ms", v.timeout_ms},
           {"max_retries", v.max_retries},     {"max_parallel", v.max_parallel}};
  if (!v.fixtures_path.empty()) {
    j["fixtures_path"] = v.fixtures_path;
  }
}

void from_json(const json& j, ProviderProfile& v) {
  v.profile_id = str(j, "profile_id");
  v.modality = enum_field(j, "modality", &parse_modality);
  v.model_name = str_or(j, "model_name", v.profile_id);
  v.endpoint_url = str_or(j, "endpoint_url", "");
  v.api_key_env = str_or(j, "api_key_env", "");
  v.timeout_ms = integer_or(j, "timeout_ms", 30000);
  v.max_retries = integer_or(j, "max_retries", 2);
  v.max_parallel = integer_or(j, "max_parallel", 4);
  v.fixtures_path = str_or(j, "fixtures_path", "");
}

void to_json(json& j, const PromptTemplate& v) {
  j = json{{"template_id", v.template_id},
           {"task", to_string(v.task)},
           {"body", v.body},
           {"version_hash", v.version_hash}};
}

void from_json(const json& j, PromptTemplate& v) {
  v = PromptTemplate::make(str(j, "template_id"), enum_field(j, "task", &parse_task), str(j, "body"));
}

void to_json(json& j, const Finding& v) {
  j = json{{"code", to_string(v.code)},
           {"severity", to_string(v.severity)},
           {"option_label", v.option_label ? json(std::string(1, *v.option_label)) : json(nullptr)},
           {"detail", v.detail}};
}

void from_json(const json& j, Finding& v) {
  v.code = enum_field(j, "code", &parse_finding_code);
  const std::string sev = str(j, "severity");
  if (sev != "error" && sev != "warning") {
    throw Error(Errc::MalformedInput, "unknown severity '" + sev + "'");
  }
  v.severity = sev == "error" ? Severity::Error : Severity::Warning;
  const auto it = j.find("option_label");
  if (it != j.end() && !it->is_null()) {
    v.option_label = label_char(j, "option_label");
  } else {
    v.option_label.reset();
  }
  v.detail = str_or(j, "detail", "");
}

void to_json(json& j, const LintReport& v) {
  json coverage = json::object();
  for (const auto& [label, ratio] : v.diacritic_coverage) {
    coverage[std::string(1, label)] = ratio;
  }
  j = json{{"quiz_id", v.quiz_id},
           {"findings", v.findings},
           {"diacritic_coverage", coverage},
           {"pass", v.pass}};
}

void from_json(const json& j, LintReport& v) {
  v.quiz_id = str_or(j, "quiz_id", "");
  v.findings = field(j, "findings").get<std::vector<Finding>>();
  v.diacritic_coverage.clear();
  for (const auto& [key, ratio] : field(j, "diacritic_coverage").items()) {
    if (key.size() != 1 || !ratio.is_number()) {
      throw Error(Errc::MalformedInput, "bad diacritic_coverage entry");
    }
    v.diacritic_coverage[key[0]] = ratio.get<double>();
  }
  v.pass = boolean(j, "pass");
}

void to_json(json& j, const Diagnostic& v) {
  j = json{{"code", v.code}, {"line_no", v.line_no}, {"message", v.message}, {"ordinal", v.ordinal}};
  j["label"] = v.label ? json(std::string(1, *v.label)) : json(nullptr);
}

void from_json(const json& j, Diagnostic& v) {
  v.code = str(j, "code");
  v.line_no = integer_or(j, "line_no", 0);
  v.message = str_or(j, "message", "");
  v.ordinal = integer_or(j, "ordinal", 0);
  const auto it = j.find("label");
  if (it != j.end() && !it->is_null()) {
    v.label = label_char(j, "label");
  } else {
    v.label.reset();
  }
}

void to_json(json& j, const RejectedQuiz& v) {
  j = json{{"quiz", v.quiz}, {"report", v.report}, {"violations", v.violations}};
}

void from_json(const json& j, RejectedQuiz& v) {
  v.quiz = field(j, "quiz").get<Quiz>();
  v.report = field(j, "report").get<LintReport>();
  v.violations = j.value("violations", std::vector<std::string>{});
}

void to_json(json& j, const QuizSet& v) {
  j = json{{"id", v.id},
           {"image_id", v.image_id},
           {"description_id", v.description_id},
           {"model_id", v.model_id},
           {"quizzes", v.quizzes},
           {"rejected", v.rejected},
           {"diagnostics", v.diagnostics},
           {"created_at", format_timestamp(v.created_at)}};
}

void from_json(const json& j, QuizSet& v) {
  v.id = str(j, "id");
  v.image_id = str(j, "image_id");
  v.description_id = str(j, "description_id");
  v.model_id = str_or(j, "model_id", "");
  v.quizzes = field(j, "quizzes").get<std::vector<std::string>>();
  v.rejected = field(j, "rejected").get<std::vector<RejectedQuiz>>();
  v.diagnostics = j.value("diagnostics", std::vector<Diagnostic>{});
  v.created_at = time_field(j, "created_at");
}

void to_json(json& j, const AttemptRecord& v) {
  j = json{{"id", v.id},
           {"session_id", v.session_id},
           {"quiz_id", v.quiz_id},
           {"chosen_label", std::string(1, v.chosen_label)},
           {"is_correct", v.is_correct},
           {"created_at", format_timestamp(v.created_at)}};
}

void from_json(const json& j, AttemptRecord& v) {
  v.id = str(j, "id");
  v.session_id = str(j, "session_id");
  v.quiz_id = str(j, "quiz_id");
  v.chosen_label = label_char(j, "chosen_label");
  v.is_correct = boolean(j, "is_correct");
  v.created_at = time_field(j, "created_at");
}

void to_json(json& j, const Feedback& v) {
  j = json{{"is_correct", v.is_correct},
           {"correct_label", std::string(1, v.correct_label)},
           {"correct_text_ar", v.correct_text_ar},
           {"message_key", v.message_key == FeedbackMessage::Correct ? "correct"
                                                                      : "incorrect_show_answer"}};
}

void from_json(const json& j, Feedback& v) {
  v.is_correct = boolean(j, "is_correct");
  v.correct_label = label_char(j, "correct_label");
  v.correct_text_ar = str(j, "correct_text_ar");
  const std::string key = str(j, "message_key");
  if (key == "correct") {
    v.message_key = FeedbackMessage::Correct;
  } else if (key == "incorrect_show_answer") {
    v.message_key = FeedbackMessage::IncorrectShowAnswer;
  } else {
    throw Error(Errc::MalformedInput, "unknown message_key '" + key + "'");
  }
}

void to_json(json& j, const AnnotationRecord& v) {
  j = json{{"subject_type", to_string(v.subject_type)},
           {"subject_id", v.subject_id},
           {"annotator_id", v.annotator_id},
           {"score", v.score}};
  j["verdict_correct_answer"] =
      v.verdict_correct_answer ? json(*v.verdict_correct_answer) : json(nullptr);
  j["rubric_note"] = v.rubric_note ? json(*v.rubric_note) : json(nullptr);
}

void from_json(const json& j, AnnotationRecord& v) {
  v.subject_type = enum_field(j, "subject_type", &parse_subject_type);
  v.subject_id = str(j, "subject_id");
  v.annotator_id = str(j, "annotator_id");
  v.score = integer(j, "score");
  const auto verdict = j.find("verdict_correct_answer");
  if (verdict != j.end() && !verdict->is_null()) {
    v.verdict_correct_answer = boolean(j, "verdict_correct_answer");
  } else {
    v.verdict_correct_answer.reset();
  }
  const auto note = j.find("rubric_note");
  if (note != j.end() && !note->is_null()) {
    v.rubric_note = str(j, "rubric_note");
  } else {
    v.rubric_note.reset();
  }
}

void to_json(json& j, const Session& v) {
  j = json{{"session_id", v.session_id},
           {"native_language", v.native_language},
           {"created_at", format_timestamp(v.created_at)}};
}

void from_json(const json& j, Session& v) {
  v.session_id = str(j, "session_id");
  v.native_language = str_or(j, "native_language", "en");
  v.created_at = time_field(j, "created_at");
}

}  // namespace arabiq
