#include "arabiq/pipeline/pipeline.hpp"

#include "arabiq/core/ids.hpp"
#include "arabiq/core/json.hpp"
#include "arabiq/core/time.hpp"
#include "arabiq/core/validate.hpp"
#include "arabiq/parser/quiz_parser.hpp"

#include <algorithm>
#include <atomic>
#include <functional>
#include <random>
#include <sstream>
#include <thread>

namespace arabiq::pipeline {

AllRejectedError::AllRejectedError(QuizSet set)
    : Error(Errc::AllQuizzesRejected, "all quizzes rejected: " + rejection_summary(set)), set_(std::move(set)) {}

std::string rejection_summary(const QuizSet& set) {
  std::map<std::string, int> counts;
  for (const auto& r : set.rejected) {
    for (const auto& v : r.violations) ++counts[v];
  }
  for (const auto& d : set.diagnostics) ++counts[d.code];
  if (counts.empty()) return "no quizzes";
  std::string out;
  for (const auto& [code, n] : counts) {
    if (!out.empty()) out += ", ";
    out += code;
    if (n > 1) out += " x" + std::to_string(n);
  }
  return out;
}

Feedback feedback_for(const Quiz& q, char chosen_label) {
  Feedback fb;
  fb.is_correct = chosen_label == q.declared_correct;
  fb.correct_label = q.declared_correct;
  if (const QuizOption* o = q.option(q.declared_correct)) fb.correct_text_ar = o->text_ar;
  fb.message_key = fb.is_correct ? FeedbackMessage::Correct : FeedbackMessage::IncorrectShowAnswer;
  return fb;
}

nlohmann::json learner_view(const QuizSet& set, const store::Store& store) {
  nlohmann::json quizzes = nlohmann::json::array();
  for (const auto& id : set.quizzes) {
    const Quiz q = store.get_quiz(id);
    nlohmann::json options = nlohmann::json::array();
    for (const auto& o : q.options) options.push_back({{"label", std::string(1, o.label)}, {"text_ar", o.text_ar}});
    quizzes.push_back({{"id", q.id},
                       {"ordinal", q.ordinal},
                       {"stem", q.stem},
                       {"skill", std::string(to_string(q.skill))},
                       {"options", std::move(options)}});
  }
  return {{"quiz_set_id", set.id}, {"image_id", set.image_id}, {"quizzes", std::move(quizzes)}};
}

gateway::ImageLoader blob_loader(const store::Store& store) {
  return [&store](const ImageRecord& img) { return store.read_blob(img.sha256); };
}

eval::Catalog store_catalog(const store::Store& store) {
  std::map<Ulid, Complexity> complexity;
  for (const auto& img : store.list_images()) complexity[img.id] = img.complexity;
  eval::Catalog cat;
  for (const auto& d : store.list_descriptions()) {
    const auto it = complexity.find(d.image_id);
    if (it == complexity.end()) continue;
    cat[d.id] = {SubjectType::Description, d.model_id, it->second, d.condition};
  }
  for (const auto& q : store.list_quizzes()) {
    const auto it = complexity.find(q.image_id);
    if (it == complexity.end()) continue;
    cat[q.id] = {SubjectType::Quiz, q.model_id, it->second, std::nullopt};
  }
  return cat;
}

std::string BatchStats::summary() const {
  std::ostringstream ss;
  ss << "images: " << images << "\n"
     << "descriptions: " << descriptions_created + descriptions_existing << " (created " << descriptions_created
     << ", existing " << descriptions_existing << ", failed " << description_failures << ")\n"
     << "quiz sets: " << quiz_sets_created + quiz_sets_existing << " (created " << quiz_sets_created << ", existing "
     << quiz_sets_existing << ", failed " << quiz_set_failures << ")\n"
     << "quiz drafts: " << quizzes_created << " (delivered " << quizzes_delivered << ", rejected " << rejected_count
     << ")\n";
  for (const auto& [c, s] : per_category) {
    ss << "  " << to_string(c) << ": images " << s.images << ", descriptions " << s.descriptions << ", quizzes "
       << s.quizzes << ", rejected " << s.rejected << "\n";
  }
  for (const auto& f : failures) ss << "failure: " << f << "\n";
  return ss.str();
}

Pipeline::Pipeline(store::Store& store, gateway::Gateway& gw, PipelineConfig cfg)
    : store_(store), gw_(gw), cfg_(std::move(cfg)), linter_(cfg_.lint) {}

QuizSet Pipeline::run_vision_quiz(const Ulid& image_id, const ProviderProfile& vision, const ProviderProfile& quiz,
                                  PromptCondition condition, int n_questions) {
  ImageRecord img;
  try {
    img = store_.get_image(image_id);
  } catch (const Error& e) {
    if (e.code() != Errc::NotFound) throw;
    throw Error(Errc::UnknownImage, image_id);
  }
  if (n_questions < 1) throw Error(Errc::InvalidArgument, "n_questions must be at least 1");
  const Description d = gw_.describe_image(img, vision, condition, cfg_.describe_template);
  store_.put(d);
  return quiz_from_description(d, quiz, n_questions);
}

QuizSet Pipeline::quiz_from_description(const Description& d, const ProviderProfile& quiz, int n_questions) {
  const std::string raw = gw_.generate_quiz_text(d, quiz, n_questions, cfg_.quiz_template);
  parser::ParseOutcome parsed = parser::parse_quiz_block(raw);

  QuizSet set;
  set.id = new_ulid();
  set.image_id = d.image_id;
  set.description_id = d.id;
  set.model_id = quiz.profile_id;
  set.diagnostics = std::move(parsed.diagnostics);
  set.created_at = now_utc();

  for (Quiz& q : parsed.quizzes) {
    q.id = new_ulid();
    q.image_id = d.image_id;
    q.description_id = d.id;
    q.model_id = quiz.profile_id;
    const ValidationResult vr = validate_quiz(q);
    const LintReport report = linter_.lint(q);
    store_.put(q);
    store_.put(report);
    if (vr.ok() && report.pass) {
      set.quizzes.push_back(q.id);
      continue;
    }
    RejectedQuiz r{q, report, {}};
    for (const auto& v : vr.violations) r.violations.push_back(v.code);
    for (const auto& f : report.findings) {
      if (f.severity == Severity::Error) r.violations.emplace_back(to_string(f.code));
    }
    set.rejected.push_back(std::move(r));
  }
  store_.put(set);
  if (set.quizzes.empty()) throw AllRejectedError(set);
  return set;
}

Session Pipeline::create_session(std::string native_language) {
  Session s;
  s.session_id = new_ulid();
  s.native_language = native_language.empty() ? "en" : std::move(native_language);
  s.created_at = now_utc();
  store_.put(s);
  return s;
}

Feedback Pipeline::submit_answer(const Ulid& session_id, const Ulid& quiz_id, char chosen_label) {
  if (!is_option_label(chosen_label)) {
    throw Error(Errc::InvalidLabel, "label '" + std::string(1, chosen_label) + "' is not one of a, b, c, d");
  }
  // Serialized so two racing first submissions cannot both record an attempt.
  std::lock_guard lock(answer_mu_);
  Quiz q;
  try {
    q = store_.get_quiz(quiz_id);
  } catch (const Error& e) {
    if (e.code() != Errc::NotFound) throw;
    throw Error(Errc::UnknownQuiz, quiz_id);
  }
  if (!store_.delivering_quiz_set(quiz_id)) throw Error(Errc::QuizNotDelivered, quiz_id);
  try {
    (void)store_.get_session(session_id);
  } catch (const Error& e) {
    if (e.code() != Errc::NotFound) throw;
    throw Error(Errc::UnknownSession, session_id);
  }
  if (const auto prior = store_.find_attempt(session_id, quiz_id)) return feedback_for(q, prior->chosen_label);

  const Feedback fb = feedback_for(q, chosen_label);
  AttemptRecord a;
  a.id = new_ulid();
  a.session_id = session_id;
  a.quiz_id = quiz_id;
  a.chosen_label = chosen_label;
  a.is_correct = fb.is_correct;
  a.created_at = now_utc();
  store_.put(a);
  return fb;
}

std::optional<Description> Pipeline::best_description(const Ulid& image_id,
                                                      const std::vector<ProviderProfile>& vision_profiles) const {
  store::Filter f;
  f.image_id = image_id;
  const auto descs = store_.list_descriptions(f);
  if (descs.empty()) return std::nullopt;

  const Description* best = nullptr;
  eval::Centi best_mean = -1;
  for (const auto& d : descs) {
    store::Filter af;
    af.subject_type = SubjectType::Description;
    af.subject_id = d.id;
    const auto recs = store_.list_annotations(af);
    if (recs.empty()) continue;
    const auto agg = eval::aggregate_score(recs);
    if (!agg.needs_adjudication && agg.mean > best_mean) {
      best_mean = agg.mean;
      best = &d;
    }
  }
  if (best) return *best;
  if (!vision_profiles.empty()) {
    for (const auto& d : descs) {
      if (d.model_id == vision_profiles.front().profile_id && d.condition == PromptCondition::Prompted) return d;
    }
  }
  return descs.front();
}

namespace {

void run_parallel(std::size_t items, std::size_t workers, const std::function<void(std::size_t)>& fn) {
  workers = std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(items, 1));
  std::atomic<std::size_t> next{0};
  auto loop = [&] {
    for (std::size_t i = next++; i < items; i = next++) fn(i);
  };
  std::vector<std::thread> pool;
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(loop);
  loop();
  for (auto& t : pool) t.join();
}

std::size_t parallel_budget(const std::vector<ProviderProfile>& profiles) {
  std::size_t n = 0;
  for (const auto& p : profiles) n += static_cast<std::size_t>(std::max(1, p.max_parallel));
  return n;
}

}  // namespace

BatchStats Pipeline::batch_generate(const BatchRequest& req) {
  if (req.n_questions < 1) throw Error(Errc::InvalidArgument, "n_questions must be at least 1");
  BatchStats stats;
  std::mutex stats_mu;
  const auto images = store_.list_images(req.filter);
  stats.images = static_cast<int>(images.size());
  for (const auto& img : images) ++stats.per_category[img.complexity].images;

  struct DescItem {
    const ImageRecord* img;
    const ProviderProfile* profile;
    PromptCondition condition;
  };
  std::vector<DescItem> desc_items;
  for (const auto& img : images) {
    for (const auto& p : req.vision_profiles) {
      for (PromptCondition c : req.conditions) desc_items.push_back({&img, &p, c});
    }
  }
  run_parallel(desc_items.size(), parallel_budget(req.vision_profiles), [&](std::size_t i) {
    const DescItem& it = desc_items[i];
    store::Filter f;
    f.image_id = it.img->id;
    f.model_id = it.profile->profile_id;
    f.condition = it.condition;
    if (!store_.list_descriptions(f).empty()) {
      std::lock_guard lock(stats_mu);
      ++stats.descriptions_existing;
      ++stats.per_category[it.img->complexity].descriptions;
      return;
    }
    try {
      const Description d = gw_.describe_image(*it.img, *it.profile, it.condition, cfg_.describe_template);
      store_.put(d);
      std::lock_guard lock(stats_mu);
      ++stats.descriptions_created;
      ++stats.per_category[it.img->complexity].descriptions;
    } catch (const std::exception& e) {
      std::lock_guard lock(stats_mu);
      ++stats.description_failures;
      stats.failures.push_back("describe " + it.img->id + " " + it.profile->profile_id + " " +
                               std::string(to_string(it.condition)) + ": " + e.what());
    }
  });

  struct QuizItem {
    const ImageRecord* img;
    const ProviderProfile* profile;
  };
  std::vector<QuizItem> quiz_items;
  for (const auto& img : images) {
    for (const auto& p : req.quiz_profiles) quiz_items.push_back({&img, &p});
  }
  run_parallel(quiz_items.size(), parallel_budget(req.quiz_profiles), [&](std::size_t i) {
    const QuizItem& it = quiz_items[i];
    store::Filter f;
    f.image_id = it.img->id;
    f.model_id = it.profile->profile_id;
    if (!store_.list_quiz_sets(f).empty()) {
      std::lock_guard lock(stats_mu);
      ++stats.quiz_sets_existing;
      return;
    }
    auto record = [&](const QuizSet& set) {
      std::lock_guard lock(stats_mu);
      const int drafts = static_cast<int>(set.quizzes.size() + set.rejected.size());
      ++stats.quiz_sets_created;
      stats.quizzes_created += drafts;
      stats.quizzes_delivered += static_cast<int>(set.quizzes.size());
      stats.rejected_count += static_cast<int>(set.rejected.size());
      auto& cat = stats.per_category[it.img->complexity];
      cat.quizzes += drafts;
      cat.rejected += static_cast<int>(set.rejected.size());
    };
    try {
      const auto d = best_description(it.img->id, req.vision_profiles);
      if (!d) throw Error(Errc::NotFound, "no description for image");
      record(quiz_from_description(*d, *it.profile, req.n_questions));
    } catch (const AllRejectedError& e) {
      record(e.quiz_set());
    } catch (const std::exception& e) {
      std::lock_guard lock(stats_mu);
      ++stats.quiz_set_failures;
      stats.failures.push_back("quiz " + it.img->id + " " + it.profile->profile_id + ": " + e.what());
    }
  });
  std::sort(stats.failures.begin(), stats.failures.end());
  return stats;
}

std::optional<ImageRecord> Pipeline::random_image(const store::Filter& f, std::uint64_t seed) const {
  const auto images = store_.list_images(f);
  if (images.empty()) return std::nullopt;
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, images.size() - 1);
  return images[pick(rng)];
}

}  // namespace arabiq::pipeline
