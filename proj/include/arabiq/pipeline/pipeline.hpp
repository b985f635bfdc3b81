#pragma once

#include "arabiq/core/error.hpp"
#include "arabiq/core/types.hpp"
#include "arabiq/eval/eval.hpp"
#include "arabiq/gateway/gateway.hpp"
#include "arabiq/lint/arabic_lint.hpp"
#include "arabiq/store/store.hpp"

#include <json.hpp>

#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace arabiq::pipeline {

inline constexpr int kDefaultQuestions = 2;

struct PipelineConfig {
  lint::LintConfig lint;
  PromptTemplate describe_template = gateway::default_describe_template();
  PromptTemplate quiz_template = gateway::default_quiz_template();
};

/// Thrown after the all-rejected QuizSet has been persisted, so callers can
/// report what went wrong.
class AllRejectedError : public Error {
public:
  explicit AllRejectedError(QuizSet set);
  [[nodiscard]] const QuizSet& quiz_set() const noexcept { return set_; }

private:
  QuizSet set_;
};

/// "DUPLICATE_OPTION x2, NO_QUESTIONS" style summary of a quiz set's rejections
/// and parser diagnostics.
std::string rejection_summary(const QuizSet& set);

Feedback feedback_for(const Quiz& q, char chosen_label);

/// Learner-facing form of a quiz set: stems, skills and options only.
nlohmann::json learner_view(const QuizSet& set, const store::Store& store);

/// Reads Upload image bytes from the store's blob directory.
gateway::ImageLoader blob_loader(const store::Store& store);

/// Model, category and (for descriptions) prompting condition of every stored
/// description and quiz, for the eval reports.
eval::Catalog store_catalog(const store::Store& store);

struct BatchRequest {
  store::Filter filter;
  std::vector<ProviderProfile> vision_profiles;
  std::vector<ProviderProfile> quiz_profiles;
  std::vector<PromptCondition> conditions{PromptCondition::Prompted, PromptCondition::Bare};
  int n_questions = kDefaultQuestions;
};

struct CategoryStats {
  int images = 0;
  int descriptions = 0;  // stored after the run, created or resumed
  int quizzes = 0;
  int rejected = 0;

  bool operator==(const CategoryStats&) const = default;
};

struct BatchStats {
  int images = 0;
  int descriptions_created = 0;
  int descriptions_existing = 0;
  int description_failures = 0;
  int quiz_sets_created = 0;
  int quiz_sets_existing = 0;
  int quiz_set_failures = 0;
  int quizzes_created = 0;  // parsed drafts, delivered or rejected
  int quizzes_delivered = 0;
  int rejected_count = 0;
  std::map<Complexity, CategoryStats> per_category;
  std::vector<std::string> failures;

  [[nodiscard]] std::string summary() const;
};

class Pipeline {
public:
  Pipeline(store::Store& store, gateway::Gateway& gw, PipelineConfig cfg = {});

  /// Describe, persist the description, then quiz_from_description.
  QuizSet run_vision_quiz(const Ulid& image_id, const ProviderProfile& vision, const ProviderProfile& quiz,
                          PromptCondition condition, int n_questions = kDefaultQuestions);

  /// Generates, parses, validates and lints; persists every draft, its lint
  /// report and the QuizSet. Throws AllRejectedError when nothing survives.
  QuizSet quiz_from_description(const Description& d, const ProviderProfile& quiz,
                                int n_questions = kDefaultQuestions);

  Session create_session(std::string native_language = "en");

  /// Idempotent per (session, quiz).
  Feedback submit_answer(const Ulid& session_id, const Ulid& quiz_id, char chosen_label);

  /// The description quizzes are generated from: highest aggregate score if
  /// annotated, else Prompted from the first vision profile, else the first
  /// stored one.
  std::optional<Description> best_description(const Ulid& image_id,
                                               const std::vector<ProviderProfile>& vision_profiles) const;

  BatchStats batch_generate(const BatchRequest& req);

  /// Uniform pick among images matching the filter.
  std::optional<ImageRecord> random_image(const store::Filter& f, std::uint64_t seed) const;

  [[nodiscard]] const lint::Linter& linter() const noexcept { return linter_; }

private:
  store::Store& store_;
  gateway::Gateway& gw_;
  PipelineConfig cfg_;
  lint::Linter linter_;
  std::mutex answer_mu_;
};

}  // namespace arabiq::pipeline
