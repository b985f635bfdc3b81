#pragma once

#include "arabiq/core/types.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace arabiq::eval {

// Fixed-point hundredths. 833 == 8.33. All reported numbers are computed
// in this representation, never through binary floating point.
using Centi = std::int64_t;

/// num/den in hundredths, rounded half-up (half away from zero for negative
/// quotients). den must be non-zero.
Centi div_round_centi(std::int64_t num, std::int64_t den);

/// "8.33", "-0.05", "100.00".
std::string format_centi(Centi v);

struct AggregateScore {
  Ulid subject_id;
  std::vector<int> included_scores;
  std::vector<int> excluded_scores;
  Centi mean = 0;  // over included_scores; 0 when needs_adjudication
  bool needs_adjudication = false;

  bool operator==(const AggregateScore&) const = default;
};

/// Median of all scores (mean of the two middle ones for even counts);
/// scores within 2 points of it are averaged. Throws EmptyInput for no
/// records and InvalidArgument for mixed subjects or scores outside 0..10.
AggregateScore aggregate_score(std::span<const AnnotationRecord> records);

/// What an annotated subject belongs to. condition is empty for quizzes
/// unless the caller knows the prompting condition of the source description.
struct SubjectInfo {
  SubjectType type = SubjectType::Description;
  std::string model_id;
  Complexity complexity = Complexity::Moderate;
  std::optional<PromptCondition> condition;
};

using Catalog = std::map<Ulid, SubjectInfo>;

struct RateRow {
  std::int64_t correct = 0;
  std::int64_t total = 0;
  Centi rate = 0;  // 100 * correct / total

  bool operator==(const RateRow&) const = default;
};

struct RateReport {
  std::map<Complexity, RateRow> per_category;  // only categories with quizzes
  RateRow global;
};

/// One verdict per quiz by majority over its records; ties count as
/// incorrect. Throws MissingVerdict(quiz_id) for a quiz with no verdict and
/// MissingGroup for a quiz absent from the catalog.
RateReport correct_answer_rates(std::span<const AnnotationRecord> records, const Catalog& catalog);

struct ModelMean {
  Centi mean = 0;
  std::int64_t subjects = 0;
};

struct ComparisonRow {
  Complexity complexity = Complexity::Simple;
  ModelMean a;
  ModelMean b;
  Centi absolute_delta = 0;          // a - b
  Centi relative_delta_percent = 0;  // 100 * (a - b) / b
};

struct ComparisonReport {
  std::string model_a;
  std::string model_b;
  std::vector<ComparisonRow> rows;
};

/// Mean of per-subject means (subjects needing adjudication are skipped) per
/// model and category, then deltas from those rounded means.
std::map<std::pair<std::string, Complexity>, ModelMean> group_means(std::span<const AggregateScore> agg,
                                                                    const Catalog& catalog);

/// Throws MissingGroup when either model lacks a category the other has.
ComparisonReport compare_models(std::span<const AggregateScore> agg, const Catalog& catalog,
                                const std::string& model_a, const std::string& model_b);

ComparisonRow compare_means(Complexity c, ModelMean a, ModelMean b);

inline const std::vector<double> kDefaultBins = {0, 2, 4, 6, 8, 10};

struct DistributionGroup {
  std::string model_id;
  Complexity complexity = Complexity::Simple;
  std::string condition;  // "prompted", "bare" or "-"
  std::vector<std::int64_t> counts;
  std::vector<Centi> percents;  // largest-remainder rounding; sums to 10000
};

struct LowScoreShare {
  std::int64_t low = 0;
  std::int64_t total = 0;
  Centi percent = 0;
};

struct DistributionReport {
  std::vector<double> edges;
  std::vector<DistributionGroup> groups;  // sorted by (model, complexity, condition)
  // Share of subjects with mean below `low_threshold`, per model over all
  // categories and conditions.
  double low_threshold = 4.0;
  std::map<std::string, LowScoreShare> low_share;
};

/// Bins are [e0,e1), [e1,e2), ... with the last bin right-closed. Throws
/// BadBins unless edges are strictly increasing from 0 to 10.
DistributionReport distribution(std::span<const AggregateScore> agg, const Catalog& catalog,
                                const std::vector<double>& edges = kDefaultBins, double low_threshold = 4.0);

/// Aggregates every subject found in the records, in subject_id order.
std::vector<AggregateScore> aggregate_all(std::span<const AnnotationRecord> records);

/// CSV header subject_type,subject_id,annotator_id,score,verdict_correct_answer
/// plus optional rubric_note, model_id, complexity, condition columns, or
/// JSONL with the same keys (".jsonl"). When the optional catalog columns are
/// present they are returned in `catalog`.
struct AnnotationFile {
  std::vector<AnnotationRecord> records;
  Catalog catalog;
};
AnnotationFile load_annotations(const std::filesystem::path& path);

enum class ReportFormat { Markdown, Csv };

std::string render(const RateReport& r, ReportFormat f);
std::string render(const ComparisonReport& r, ReportFormat f);
std::string render(const DistributionReport& r, ReportFormat f);
std::string render(std::span<const AggregateScore> agg, ReportFormat f);

/// Automated scoring (CLIP, VQA) would plug in here; no implementation ships.
class ExternalScorer {
public:
  virtual ~ExternalScorer() = default;
  virtual std::optional<double> score(const ImageRecord& image, const Description& description) = 0;
};

}  // namespace arabiq::eval
