#include "cli.hpp"

#include "arabiq/core/error.hpp"
#include "arabiq/core/json.hpp"
#include "arabiq/eval/eval.hpp"
#include "arabiq/gateway/gateway.hpp"
#include "arabiq/lint/arabic_lint.hpp"
#include "arabiq/parser/quiz_parser.hpp"
#include "arabiq/pipeline/pipeline.hpp"
#include "arabiq/service/service.hpp"
#include "arabiq/store/manifest.hpp"
#include "arabiq/store/store.hpp"

#include <CLI11.hpp>

#include <csignal>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace arabiq::cli {

namespace fs = std::filesystem;

namespace {

struct Options {
  std::string store_dir = "store";

  std::string manifest;

  std::vector<std::string> filters;
  std::vector<std::string> vision;
  std::vector<std::string> quiz;
  std::string condition = "both";
  int n = pipeline::kDefaultQuestions;
  std::string provider_config;

  std::string lint_in = "store";
  std::string lexicon;

  std::string annotations;
  std::string model_a;
  std::string model_b;
  std::string bins = "0,2,4,6,8,10";
  std::string format = "md";
  std::string out_dir = "reports";

  int port = 0;
  std::vector<std::string> allow;
};

bool is_provider_error(Errc c) {
  switch (c) {
    case Errc::ProviderTimeout:
    case Errc::ProviderHttp:
    case Errc::EmptyResponse:
    case Errc::ImageFetchFailed:
    case Errc::MockFixtureMissing:
      return true;
    default:
      return false;
  }
}

store::Filter parse_filters(const std::vector<std::string>& filters) {
  store::Filter f;
  for (const auto& raw : filters) {
    const auto eq = raw.find('=');
    const std::string key = raw.substr(0, eq);
    const std::string value = eq == std::string::npos ? "" : raw.substr(eq + 1);
    if (key == "complexity") {
      f.complexity = parse_complexity(value);
      if (!f.complexity) throw Error(Errc::InvalidArgument, "unknown complexity '" + value + "'");
    } else if (key == "image") {
      f.image_id = value;
    } else {
      throw Error(Errc::InvalidArgument, "filter must be complexity=LEVEL or image=ID, got '" + raw + "'");
    }
  }
  return f;
}

std::vector<PromptCondition> parse_conditions(const std::string& s) {
  if (s == "both") return {PromptCondition::Prompted, PromptCondition::Bare};
  const auto c = parse_condition(s);
  if (!c) throw Error(Errc::InvalidArgument, "condition must be prompted, bare or both");
  return {*c};
}

std::vector<ProviderProfile> pick_profiles(const std::vector<ProviderProfile>& all,
                                           const std::vector<std::string>& ids) {
  std::vector<ProviderProfile> out;
  for (const auto& id : ids) out.push_back(gateway::find_profile(all, id));
  return out;
}

std::vector<double> parse_bins(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string part;
  while (std::getline(ss, part, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(part, &used));
      if (used != part.size()) throw std::invalid_argument(part);
    } catch (const std::exception&) {
      throw Error(Errc::BadBins, "bin edge '" + part + "' is not a number");
    }
  }
  return out;
}

int cmd_ingest(const Options& o, std::ostream& out, std::ostream& err) {
  store::Store s(o.store_dir);
  const auto m = store::BenchmarkManifest::load(o.manifest);
  const auto report = store::import_manifest(s, m);
  out << std::left << std::setw(10) << "category" << "images\n";
  for (const auto& [c, n] : report.per_category) out << std::setw(10) << to_string(c) << n << "\n";
  out << std::setw(10) << "total" << report.total() << "\n";
  out << "created " << report.created << ", already present " << report.already_present << ", failed "
      << report.failures.size() << "\n";
  out << report.summary() << "\n";
  for (const auto& f : report.failures) err << "row " << f.index << " (" << f.locator << "): " << f.reason << "\n";
  return kOk;
}

int cmd_gen(const Options& o, std::ostream& out, std::ostream& err) {
  const auto profiles = gateway::load_profiles(o.provider_config);
  pipeline::BatchRequest req;
  req.filter = parse_filters(o.filters);
  req.vision_profiles = pick_profiles(profiles, o.vision);
  req.quiz_profiles = pick_profiles(profiles, o.quiz);
  req.conditions = parse_conditions(o.condition);
  req.n_questions = o.n;
  if (o.n < 1) throw Error(Errc::InvalidArgument, "--n must be at least 1");

  store::Store s(o.store_dir);
  gateway::Gateway::Options go;
  go.load_image = pipeline::blob_loader(s);
  gateway::Gateway gw(go);
  pipeline::Pipeline p(s, gw);
  const auto stats = p.batch_generate(req);
  out << stats.summary();
  if (stats.description_failures + stats.quiz_set_failures > 0) {
    err << stats.description_failures + stats.quiz_set_failures << " item(s) failed; rerun to resume\n";
    return kProviderFailure;
  }
  return kOk;
}

void print_report(std::ostream& out, const std::string& subject, const LintReport& r) {
  out << subject << " " << (r.pass ? "PASS" : "FAIL");
  for (const auto& [label, cov] : r.diacritic_coverage) {
    out << " " << label << "=" << std::fixed << std::setprecision(2) << cov;
  }
  out << "\n";
  for (const auto& f : r.findings) {
    out << "  " << to_string(f.severity) << " " << to_string(f.code);
    if (f.option_label) out << " (" << *f.option_label << ")";
    if (!f.detail.empty()) out << ": " << f.detail;
    out << "\n";
  }
}

int cmd_lint(const Options& o, std::ostream& out, std::ostream&) {
  lint::LintConfig cfg;
  if (!o.lexicon.empty()) cfg.lexicon_path = o.lexicon;
  const lint::Linter linter(cfg);
  bool any_error = false;
  auto check = [&](const std::string& subject, const Quiz& q) {
    const LintReport r = linter.lint(q);
    for (const auto& f : r.findings) any_error |= f.severity == Severity::Error;
    print_report(out, subject, r);
  };
  if (o.lint_in == "store") {
    store::Store s(o.store_dir);
    for (const auto& q : s.list_quizzes()) check(q.id, q);
  } else {
    std::ifstream in(o.lint_in, std::ios::binary);
    if (!in) throw Error(Errc::InvalidArgument, "cannot read " + o.lint_in);
    std::ostringstream ss;
    ss << in.rdbuf();
    const auto parsed = parser::parse_quiz_block(ss.str());
    for (const auto& d : parsed.diagnostics) {
      out << "line " << d.line_no << " " << d.code << ": " << d.message << "\n";
    }
    for (const auto& q : parsed.quizzes) check("Q" + std::to_string(q.ordinal), q);
  }
  return any_error ? kLintErrors : kOk;
}

std::unique_ptr<store::Store> open_store_if_present(const std::string& dir) {
  if (!fs::exists(fs::path(dir) / "manifest.json")) return nullptr;
  return std::make_unique<store::Store>(dir);
}

int cmd_eval_import(const Options& o, std::ostream& out, std::ostream&) {
  const auto file = eval::load_annotations(o.annotations);
  store::Store s(o.store_dir);
  std::map<std::tuple<SubjectType, std::string, std::string>, AnnotationRecord> existing;
  for (const auto& r : s.list_annotations()) existing[{r.subject_type, r.subject_id, r.annotator_id}] = r;
  int imported = 0;
  int skipped = 0;
  for (const auto& r : file.records) {
    const auto key = std::make_tuple(r.subject_type, r.subject_id, r.annotator_id);
    if (const auto it = existing.find(key); it != existing.end()) {
      if (it->second != r) {
        throw Error(Errc::MalformedInput, "annotator " + r.annotator_id + " already scored " + r.subject_id +
                                              " differently");
      }
      ++skipped;
      continue;
    }
    s.put(r);
    existing[key] = r;
    ++imported;
  }
  out << "imported " << imported << ", already present " << skipped << "\n";
  return kOk;
}

int cmd_eval_report(const std::string& kind, const Options& o, std::ostream& out, std::ostream&) {
  if (o.format != "md" && o.format != "csv") throw Error(Errc::InvalidArgument, "--format is md or csv");
  const auto fmt = o.format == "csv" ? eval::ReportFormat::Csv : eval::ReportFormat::Markdown;

  std::vector<AnnotationRecord> records;
  eval::Catalog catalog;
  if (auto s = open_store_if_present(o.store_dir)) {
    catalog = pipeline::store_catalog(*s);
    if (o.annotations.empty()) records = s->list_annotations();
  }
  if (!o.annotations.empty()) {
    auto file = eval::load_annotations(o.annotations);
    records = std::move(file.records);
    for (auto& [id, info] : file.catalog) catalog[id] = std::move(info);
  }

  std::string body;
  if (kind == "aggregate") {
    body = eval::render(eval::aggregate_all(records), fmt);
  } else if (kind == "rates") {
    body = eval::render(eval::correct_answer_rates(records, catalog), fmt);
  } else if (kind == "compare") {
    body = eval::render(eval::compare_models(eval::aggregate_all(records), catalog, o.model_a, o.model_b), fmt);
  } else {
    body = eval::render(eval::distribution(eval::aggregate_all(records), catalog, parse_bins(o.bins)), fmt);
  }
  out << body;
  fs::create_directories(o.out_dir);
  const fs::path dest = fs::path(o.out_dir) / (kind + (fmt == eval::ReportFormat::Csv ? ".csv" : ".md"));
  std::ofstream f(dest, std::ios::binary | std::ios::trunc);
  f << body;
  if (!f) throw Error(Errc::StoreIo, "cannot write " + dest.string());
  return kOk;
}

service::Service* g_running = nullptr;

int cmd_serve(const Options& o, std::ostream& out, std::ostream& err) {
  int port = o.port;
  if (port == 0) {
    const char* env = std::getenv("ARABIQ_PORT");
    port = env ? std::atoi(env) : 8080;
  }
  std::vector<ProviderProfile> profiles;
  if (!o.provider_config.empty()) profiles = gateway::load_profiles(o.provider_config);
  store::Store s(o.store_dir);
  gateway::Gateway::Options go;
  go.load_image = pipeline::blob_loader(s);
  gateway::Gateway gw(go);
  pipeline::Pipeline p(s, gw);
  auto cfg = service::config_from_env(profiles);
  if (!o.allow.empty()) cfg.url_allowlist = o.allow;
  service::Service svc(s, p, cfg);
  if (!svc.bind("0.0.0.0", port)) {
    err << "cannot bind port " << port << "\n";
    return kUsage;
  }
  g_running = &svc;
  std::signal(SIGINT, [](int) {
    if (g_running) g_running->stop();
  });
  std::signal(SIGTERM, [](int) {
    if (g_running) g_running->stop();
  });
  out << "listening on port " << port << std::endl;
  svc.listen_after_bind();
  g_running = nullptr;
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Arabic vocabulary quizzes from images: ingest, generate, lint, evaluate, serve", "arabiq"};
  app.require_subcommand(1);
  Options o;
  auto store_opt = [&](CLI::App* sub) {
    sub->add_option("--store", o.store_dir, "Store directory")->capture_default_str();
  };

  auto* ingest = app.add_subcommand("ingest", "Import a benchmark manifest (CSV or JSONL) into the store");
  ingest->add_option("--manifest", o.manifest, "Manifest file: locator,complexity[,sha256]")->required();
  store_opt(ingest);

  auto* gen = app.add_subcommand("gen", "Generate descriptions and quiz sets over stored images (resumable)");
  gen->add_option("--filter", o.filters, "Image filter, repeatable: complexity=LEVEL or image=ID");
  gen->add_option("--vision", o.vision, "Vision profile id(s)")->required()->expected(1, -1);
  gen->add_option("--quiz", o.quiz, "Quiz profile id(s)")->required()->expected(1, -1);
  gen->add_option("--condition", o.condition, "prompted|bare|both")
      ->check(CLI::IsMember({"prompted", "bare", "both"}))
      ->capture_default_str();
  gen->add_option("--n", o.n, "Questions per quiz set")->capture_default_str();
  gen->add_option("--provider-config", o.provider_config, "Provider profiles JSON")->required();
  store_opt(gen);

  auto* lint_cmd = app.add_subcommand("lint", "Lint quizzes; exit 1 if any Error finding");
  lint_cmd->add_option("--in", o.lint_in, "'store' or a quiz text file")->capture_default_str();
  lint_cmd->add_option("--lexicon", o.lexicon, "Word list, one per line");
  store_opt(lint_cmd);

  auto* ev = app.add_subcommand("eval", "Human-evaluation reports");
  ev->require_subcommand(1);
  auto* ev_import = ev->add_subcommand("import", "Load annotation records into the store");
  ev_import->add_option("--annotations", o.annotations, "Annotations CSV or JSONL")->required();
  store_opt(ev_import);
  std::vector<std::pair<std::string, CLI::App*>> reports;
  for (const char* kind : {"aggregate", "rates", "compare", "dist"}) {
    const std::map<std::string, std::string> help = {
        {"aggregate", "Per-subject aggregate scores"},
        {"rates", "Correct-answer rates per category"},
        {"compare", "Model A vs model B mean scores per category"},
        {"dist", "Score distribution and low-score shares"}};
    auto* sub = ev->add_subcommand(kind, help.at(kind));
    sub->add_option("--annotations", o.annotations, "Read records from this file instead of the store");
    sub->add_option("--format", o.format, "md|csv")->capture_default_str();
    sub->add_option("--out-dir", o.out_dir, "Report directory")->capture_default_str();
    store_opt(sub);
    reports.emplace_back(kind, sub);
  }
  reports[2].second->add_option("--a", o.model_a, "Model A id")->required();
  reports[2].second->add_option("--b", o.model_b, "Model B id")->required();
  reports[3].second->add_option("--bins", o.bins, "Bin edges from 0 to 10")->capture_default_str();

  auto* serve = app.add_subcommand("serve", "Run the HTTP API");
  serve->add_option("--port", o.port, "Port (default: $ARABIQ_PORT or 8080)");
  serve->add_option("--provider-config", o.provider_config, "Provider profiles JSON");
  serve->add_option("--allow", o.allow, "Allowed image URL host, repeatable (default unsplash.com)");
  store_opt(serve);

  std::vector<std::string> argv(args.rbegin(), args.rend());
  try {
    app.parse(argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*ingest) return cmd_ingest(o, out, err);
    if (*gen) return cmd_gen(o, out, err);
    if (*lint_cmd) return cmd_lint(o, out, err);
    if (*ev_import) return cmd_eval_import(o, out, err);
    for (const auto& [kind, sub] : reports) {
      if (*sub) return cmd_eval_report(kind, o, out, err);
    }
    if (*serve) return cmd_serve(o, out, err);
  } catch (const Error& e) {
    err << "error: " << to_string(e.code()) << ": " << e.what() << "\n";
    return is_provider_error(e.code()) ? kProviderFailure : kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}

}  // namespace arabiq::cli
