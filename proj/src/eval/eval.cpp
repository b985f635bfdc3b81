#include "arabiq/eval/eval.hpp"

#include "arabiq/core/error.hpp"
#include "arabiq/core/json.hpp"
#include "arabiq/core/text.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

namespace arabiq::eval {

Centi div_round_centi(std::int64_t num, std::int64_t den) {
  if (den == 0) throw Error(Errc::InvalidArgument, "division by zero");
  const __int128 q = static_cast<__int128>(num) * 100;
  const bool negative = (q < 0) != (den < 0);
  const __int128 aq = q < 0 ? -q : q;
  const __int128 ad = den < 0 ? -static_cast<__int128>(den) : den;
  const __int128 r = (2 * aq + ad) / (2 * ad);
  return static_cast<Centi>(negative ? -r : r);
}

std::string format_centi(Centi v) {
  const bool neg = v < 0;
  const std::uint64_t a = neg ? static_cast<std::uint64_t>(-v) : static_cast<std::uint64_t>(v);
  std::string frac = std::to_string(a % 100);
  if (frac.size() < 2) frac.insert(0, "0");
  return (neg ? "-" : "") + std::to_string(a / 100) + "." + frac;
}

AggregateScore aggregate_score(std::span<const AnnotationRecord> records) {
  if (records.empty()) throw Error(Errc::EmptyInput, "no annotation records");
  AggregateScore out;
  out.subject_id = records.front().subject_id;
  std::vector<int> scores;
  for (const auto& r : records) {
    if (r.subject_id != out.subject_id) throw Error(Errc::InvalidArgument, "records span several subjects");
    if (r.score < 0 || r.score > 10) {
      throw Error(Errc::InvalidArgument, "score " + std::to_string(r.score) + " outside 0..10");
    }
    scores.push_back(r.score);
  }
  std::sort(scores.begin(), scores.end());
  const std::size_t n = scores.size();
  // Twice the median keeps even-count medians integral.
  const int median2 = n % 2 == 1 ? 2 * scores[n / 2] : scores[n / 2 - 1] + scores[n / 2];
  std::int64_t sum = 0;
  for (int s : scores) {
    if (std::abs(2 * s - median2) <= 4) {
      out.included_scores.push_back(s);
      sum += s;
    } else {
      out.excluded_scores.push_back(s);
    }
  }
  out.needs_adjudication = out.included_scores.empty();
  if (!out.needs_adjudication) {
    out.mean = div_round_centi(sum, static_cast<std::int64_t>(out.included_scores.size()));
  }
  return out;
}

std::vector<AggregateScore> aggregate_all(std::span<const AnnotationRecord> records) {
  std::map<Ulid, std::vector<AnnotationRecord>> by_subject;
  for (const auto& r : records) by_subject[r.subject_id].push_back(r);
  std::vector<AggregateScore> out;
  for (const auto& [id, rs] : by_subject) out.push_back(aggregate_score(rs));
  return out;
}

RateReport correct_answer_rates(std::span<const AnnotationRecord> records, const Catalog& catalog) {
  struct Votes {
    int yes = 0;
    int no = 0;
  };
  std::map<Ulid, Votes> votes;
  for (const auto& r : records) {
    if (r.subject_type != SubjectType::Quiz) continue;
    auto& v = votes[r.subject_id];
    if (r.verdict_correct_answer) ++(*r.verdict_correct_answer ? v.yes : v.no);
  }
  RateReport rep;
  for (const auto& [id, v] : votes) {
    if (v.yes + v.no == 0) throw Error(Errc::MissingVerdict, id);
    const auto it = catalog.find(id);
    if (it == catalog.end()) throw Error(Errc::MissingGroup, "quiz " + id + " has no category");
    RateRow& row = rep.per_category[it->second.complexity];
    ++row.total;
    if (v.yes > v.no) ++row.correct;
  }
  for (auto& [c, row] : rep.per_category) {
    row.rate = div_round_centi(100 * row.correct, row.total);
    rep.global.correct += row.correct;
    rep.global.total += row.total;
  }
  if (rep.global.total > 0) rep.global.rate = div_round_centi(100 * rep.global.correct, rep.global.total);
  return rep;
}

std::map<std::pair<std::string, Complexity>, ModelMean> group_means(std::span<const AggregateScore> agg,
                                                                    const Catalog& catalog) {
  std::map<std::pair<std::string, Complexity>, std::pair<std::int64_t, std::int64_t>> sums;
  for (const auto& a : agg) {
    if (a.needs_adjudication) continue;
    const auto it = catalog.find(a.subject_id);
    if (it == catalog.end()) continue;
    auto& s = sums[{it->second.model_id, it->second.complexity}];
    s.first += a.mean;
    ++s.second;
  }
  std::map<std::pair<std::string, Complexity>, ModelMean> out;
  for (const auto& [k, s] : sums) {
    // Mean of centi values, kept in centi: divide the centi sum, not scale it.
    const Centi mean = div_round_centi(s.first, s.second * 100);
    out[k] = {mean, s.second};
  }
  return out;
}

ComparisonRow compare_means(Complexity c, ModelMean a, ModelMean b) {
  ComparisonRow row;
  row.complexity = c;
  row.a = a;
  row.b = b;
  row.absolute_delta = a.mean - b.mean;
  if (b.mean == 0) throw Error(Errc::InvalidArgument, "relative delta against a zero mean");
  row.relative_delta_percent = div_round_centi(100 * (a.mean - b.mean), b.mean);
  return row;
}

ComparisonReport compare_models(std::span<const AggregateScore> agg, const Catalog& catalog,
                                const std::string& model_a, const std::string& model_b) {
  const auto means = group_means(agg, catalog);
  ComparisonReport rep{model_a, model_b, {}};
  for (Complexity c : {Complexity::Simple, Complexity::Moderate, Complexity::Complex}) {
    const auto a = means.find({model_a, c});
    const auto b = means.find({model_b, c});
    if (a == means.end() && b == means.end()) continue;
    if (a == means.end() || b == means.end()) {
      throw Error(Errc::MissingGroup, std::string(to_string(c)) + " has scores for only one of " + model_a +
                                          ", " + model_b);
    }
    rep.rows.push_back(compare_means(c, a->second, b->second));
  }
  if (rep.rows.empty()) throw Error(Errc::MissingGroup, "no scored subjects for " + model_a + " or " + model_b);
  return rep;
}

namespace {

std::vector<Centi> largest_remainder(const std::vector<std::int64_t>& counts) {
  const std::int64_t total = std::accumulate(counts.begin(), counts.end(), std::int64_t{0});
  std::vector<Centi> out(counts.size(), 0);
  if (total == 0) return out;
  std::vector<std::pair<std::int64_t, std::size_t>> rem;
  Centi assigned = 0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    out[i] = counts[i] * 10000 / total;
    assigned += out[i];
    rem.emplace_back(counts[i] * 10000 % total, i);
  }
  std::stable_sort(rem.begin(), rem.end(), [](const auto& x, const auto& y) { return x.first > y.first; });
  for (std::size_t k = 0; assigned < 10000; ++k, ++assigned) ++out[rem[k].second];
  return out;
}

Centi to_centi(double v) { return static_cast<Centi>(std::llround(v * 100.0)); }

}  // namespace

DistributionReport distribution(std::span<const AggregateScore> agg, const Catalog& catalog,
                                const std::vector<double>& edges, double low_threshold) {
  if (edges.size() < 2 || to_centi(edges.front()) != 0 || to_centi(edges.back()) != 1000) {
    throw Error(Errc::BadBins, "bins must start at 0 and end at 10");
  }
  std::vector<Centi> ec;
  for (double e : edges) ec.push_back(to_centi(e));
  for (std::size_t i = 1; i < ec.size(); ++i) {
    if (ec[i] <= ec[i - 1]) throw Error(Errc::BadBins, "bins must be strictly increasing");
  }
  const std::size_t nbins = ec.size() - 1;
  const Centi low_c = to_centi(low_threshold);

  DistributionReport rep;
  rep.edges = edges;
  rep.low_threshold = low_threshold;
  std::map<std::tuple<std::string, Complexity, std::string>, std::vector<std::int64_t>> groups;
  for (const auto& a : agg) {
    if (a.needs_adjudication) continue;
    const auto it = catalog.find(a.subject_id);
    if (it == catalog.end()) throw Error(Errc::MissingGroup, "subject " + a.subject_id + " is not in the catalog");
    const SubjectInfo& s = it->second;
    const std::string cond = s.condition ? std::string(to_string(*s.condition)) : "-";
    auto& counts = groups[{s.model_id, s.complexity, cond}];
    counts.resize(nbins, 0);
    std::size_t bin = nbins - 1;
    for (std::size_t i = 0; i < nbins; ++i) {
      if (a.mean >= ec[i] && a.mean < ec[i + 1]) {
        bin = i;
        break;
      }
    }
    ++counts[bin];
    auto& low = rep.low_share[s.model_id];
    ++low.total;
    if (a.mean < low_c) ++low.low;
  }
  for (auto& [k, counts] : groups) {
    rep.groups.push_back({std::get<0>(k), std::get<1>(k), std::get<2>(k), counts, largest_remainder(counts)});
  }
  for (auto& [m, low] : rep.low_share) low.percent = div_round_centi(100 * low.low, low.total);
  return rep;
}

namespace {

std::vector<std::string> split_csv_row(const std::string& line) {
  std::vector<std::string> cells;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur.push_back('"');
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      cells.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  cells.push_back(cur);
  return cells;
}

std::optional<bool> parse_verdict(const std::string& s) {
  const std::string t = text::trim(s);
  if (t.empty()) return std::nullopt;
  if (t == "true" || t == "1" || t == "yes" || t == "TRUE" || t == "True") return true;
  if (t == "false" || t == "0" || t == "no" || t == "FALSE" || t == "False") return false;
  throw Error(Errc::MalformedInput, "verdict '" + t + "' is not true/false");
}

void check_record(const AnnotationRecord& r) {
  if (r.score < 0 || r.score > 10) throw Error(Errc::MalformedInput, "score outside 0..10");
  if (r.verdict_correct_answer && r.subject_type != SubjectType::Quiz) {
    throw Error(Errc::MalformedInput, "verdict on a description");
  }
  if (r.subject_id.empty()) throw Error(Errc::MalformedInput, "empty subject_id");
}

}  // namespace

AnnotationFile load_annotations(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::ConfigError, "cannot read annotations " + path.string());
  AnnotationFile out;
  std::string line;
  int line_no = 0;
  auto fail = [&](const std::string& why) {
    throw Error(Errc::MalformedInput, path.string() + ":" + std::to_string(line_no) + ": " + why);
  };
  auto note_catalog = [&](const AnnotationRecord& r, const std::string& model, const std::string& cx,
                          const std::string& cond) {
    if (model.empty() && cx.empty()) return;
    const auto c = parse_complexity(cx);
    if (!c) fail("unknown complexity '" + cx + "'");
    SubjectInfo info{r.subject_type, model, *c, std::nullopt};
    if (!cond.empty()) {
      info.condition = parse_condition(cond);
      if (!info.condition) fail("unknown condition '" + cond + "'");
    }
    out.catalog[r.subject_id] = info;
  };

  if (path.extension() == ".jsonl") {
    while (std::getline(in, line)) {
      ++line_no;
      if (text::trim(line).empty()) continue;
      try {
        const auto j = nlohmann::json::parse(line);
        AnnotationRecord r = j.get<AnnotationRecord>();
        check_record(r);
        note_catalog(r, j.value("model_id", ""), j.value("complexity", ""), j.value("condition", ""));
        out.records.push_back(std::move(r));
      } catch (const Error& e) {
        if (e.code() == Errc::MalformedInput && std::string(e.what()).rfind(path.string(), 0) == 0) throw;
        fail(e.what());
      } catch (const std::exception& e) {
        fail(e.what());
      }
    }
    return out;
  }

  if (!std::getline(in, line)) return out;
  ++line_no;
  const auto header = split_csv_row(line);
  std::map<std::string, std::size_t> col;
  for (std::size_t i = 0; i < header.size(); ++i) col[text::trim(header[i])] = i;
  for (const char* need : {"subject_type", "subject_id", "annotator_id", "score", "verdict_correct_answer"}) {
    if (!col.count(need)) fail(std::string("missing column ") + need);
  }
  while (std::getline(in, line)) {
    ++line_no;
    if (text::trim(line).empty()) continue;
    const auto cells = split_csv_row(line);
    auto cell = [&](const char* name) -> std::string {
      const auto it = col.find(name);
      return (it != col.end() && it->second < cells.size()) ? text::trim(cells[it->second]) : std::string();
    };
    AnnotationRecord r;
    const auto st = parse_subject_type(cell("subject_type"));
    if (!st) fail("unknown subject_type '" + cell("subject_type") + "'");
    r.subject_type = *st;
    r.subject_id = cell("subject_id");
    r.annotator_id = cell("annotator_id");
    try {
      std::size_t used = 0;
      const std::string s = cell("score");
      r.score = std::stoi(s, &used);
      if (used != s.size()) fail("score '" + s + "' is not an integer");
      r.verdict_correct_answer = parse_verdict(cell("verdict_correct_answer"));
      if (const std::string note = cell("rubric_note"); !note.empty()) r.rubric_note = note;
      check_record(r);
    } catch (const std::invalid_argument&) {
      fail("score is not an integer");
    } catch (const std::out_of_range&) {
      fail("score out of range");
    } catch (const Error& e) {
      if (std::string(e.what()).rfind(path.string(), 0) == 0) throw;
      fail(e.what());
    }
    note_catalog(r, cell("model_id"), cell("complexity"), cell("condition"));
    out.records.push_back(std::move(r));
  }
  return out;
}

namespace {

std::string bin_label(const std::vector<double>& edges, std::size_t i) {
  auto fmt = [](double v) {
    std::ostringstream ss;
    ss << v;
    return ss.str();
  };
  const bool last = i + 2 == edges.size();
  return "[" + fmt(edges[i]) + "," + fmt(edges[i + 1]) + (last ? "]" : ")");
}

}  // namespace

std::string render(const RateReport& r, ReportFormat f) {
  std::ostringstream ss;
  if (f == ReportFormat::Markdown) {
    ss << "# Correct-answer rates\n\n| Category | Correct | Total | Rate (%) |\n|---|---:|---:|---:|\n";
    for (const auto& [c, row] : r.per_category) {
      ss << "| " << to_string(c) << " | " << row.correct << " | " << row.total << " | " << format_centi(row.rate)
         << " |\n";
    }
    ss << "| global | " << r.global.correct << " | " << r.global.total << " | " << format_centi(r.global.rate)
       << " |\n";
  } else {
    ss << "category,correct,total,rate_percent\n";
    for (const auto& [c, row] : r.per_category) {
      ss << to_string(c) << "," << row.correct << "," << row.total << "," << format_centi(row.rate) << "\n";
    }
    ss << "global," << r.global.correct << "," << r.global.total << "," << format_centi(r.global.rate) << "\n";
  }
  return ss.str();
}

std::string render(const ComparisonReport& r, ReportFormat f) {
  std::ostringstream ss;
  if (f == ReportFormat::Markdown) {
    ss << "# Model comparison: " << r.model_a << " vs " << r.model_b << "\n\n"
       << "| Category | Mean " << r.model_a << " | Mean " << r.model_b
       << " | Absolute delta | Relative delta (%) |\n|---|---:|---:|---:|---:|\n";
    for (const auto& row : r.rows) {
      ss << "| " << to_string(row.complexity) << " | " << format_centi(row.a.mean) << " | "
         << format_centi(row.b.mean) << " | " << format_centi(row.absolute_delta) << " | "
         << format_centi(row.relative_delta_percent) << " |\n";
    }
  } else {
    ss << "category,model_a,mean_a,subjects_a,model_b,mean_b,subjects_b,absolute_delta,relative_delta_percent\n";
    for (const auto& row : r.rows) {
      ss << to_string(row.complexity) << "," << r.model_a << "," << format_centi(row.a.mean) << "," << row.a.subjects
         << "," << r.model_b << "," << format_centi(row.b.mean) << "," << row.b.subjects << ","
         << format_centi(row.absolute_delta) << "," << format_centi(row.relative_delta_percent) << "\n";
    }
  }
  return ss.str();
}

std::string render(const DistributionReport& r, ReportFormat f) {
  std::ostringstream ss;
  const std::size_t nbins = r.edges.size() - 1;
  std::ostringstream thr;
  thr << r.low_threshold;
  if (f == ReportFormat::Markdown) {
    ss << "# Score distribution\n\n| Model | Category | Condition |";
    for (std::size_t i = 0; i < nbins; ++i) ss << " " << bin_label(r.edges, i) << " |";
    ss << " n |\n|---|---|---|";
    for (std::size_t i = 0; i < nbins; ++i) ss << "---:|";
    ss << "---:|\n";
    for (const auto& g : r.groups) {
      ss << "| " << g.model_id << " | " << to_string(g.complexity) << " | " << g.condition << " |";
      std::int64_t n = 0;
      for (std::size_t i = 0; i < nbins; ++i) {
        ss << " " << g.counts[i] << " (" << format_centi(g.percents[i]) << "%) |";
        n += g.counts[i];
      }
      ss << " " << n << " |\n";
    }
    ss << "\n## Low scores (mean below " << thr.str() << ")\n\n| Model | Low | Total | Share (%) |\n|---|---:|---:|---:|\n";
    for (const auto& [m, low] : r.low_share) {
      ss << "| " << m << " | " << low.low << " | " << low.total << " | " << format_centi(low.percent) << " |\n";
    }
  } else {
    ss << "model_id,complexity,condition,bin,count,percent\n";
    for (const auto& g : r.groups) {
      for (std::size_t i = 0; i < nbins; ++i) {
        ss << g.model_id << "," << to_string(g.complexity) << "," << g.condition << ",\"" << bin_label(r.edges, i)
           << "\"," << g.counts[i] << "," << format_centi(g.percents[i]) << "\n";
      }
    }
    for (const auto& [m, low] : r.low_share) {
      ss << m << ",all,all,\"<" << thr.str() << "\"," << low.low << "," << format_centi(low.percent) << "\n";
    }
  }
  return ss.str();
}

std::string render(std::span<const AggregateScore> agg, ReportFormat f) {
  std::vector<const AggregateScore*> sorted;
  for (const auto& a : agg) sorted.push_back(&a);
  std::sort(sorted.begin(), sorted.end(), [](auto* x, auto* y) { return x->subject_id < y->subject_id; });
  auto join = [](const std::vector<int>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? " " : "") + std::to_string(v[i]);
    return s;
  };
  std::ostringstream ss;
  if (f == ReportFormat::Markdown) {
    ss << "# Aggregate scores\n\n| Subject | Included | Excluded | Mean | Adjudicate |\n|---|---|---|---:|---|\n";
    for (const auto* a : sorted) {
      ss << "| " << a->subject_id << " | " << join(a->included_scores) << " | " << join(a->excluded_scores) << " | "
         << (a->needs_adjudication ? "-" : format_centi(a->mean)) << " | " << (a->needs_adjudication ? "yes" : "no")
         << " |\n";
    }
  } else {
    ss << "subject_id,included_scores,excluded_scores,mean,needs_adjudication\n";
    for (const auto* a : sorted) {
      ss << a->subject_id << "," << join(a->included_scores) << "," << join(a->excluded_scores) << ","
         << (a->needs_adjudication ? "" : format_centi(a->mean)) << "," << (a->needs_adjudication ? "true" : "false")
         << "\n";
    }
  }
  return ss.str();
}

}  // namespace arabiq::eval
