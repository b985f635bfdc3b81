#include "arabiq/store/manifest.hpp"

#include "arabiq/core/error.hpp"
#include "arabiq/core/ids.hpp"
#include "arabiq/core/text.hpp"
#include "arabiq/core/time.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace arabiq::store {

namespace fs = std::filesystem;

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> cells;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      cells.push_back(text::trim(cur));
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  cells.push_back(text::trim(cur));
  return cells;
}

[[noreturn]] void bad_row(const fs::path& p, int line_no, const std::string& why) {
  throw Error(Errc::MalformedInput, p.string() + ":" + std::to_string(line_no) + ": " + why);
}

ManifestEntry make_entry(const fs::path& p, int line_no, const std::string& locator, const std::string& complexity,
                         const std::string& sha) {
  if (locator.empty()) bad_row(p, line_no, "empty locator");
  const auto c = parse_complexity(complexity);
  if (!c) bad_row(p, line_no, "unknown complexity '" + complexity + "'");
  ManifestEntry e{locator, *c, std::nullopt};
  if (!sha.empty()) {
    if (!is_sha256_hex(sha)) bad_row(p, line_no, "sha256 is not 64 lowercase hex");
    e.sha256 = sha;
  }
  return e;
}

}  // namespace

bool is_http_url(std::string_view s) noexcept {
  const auto rest = [&](std::string_view prefix) -> std::string_view {
    return s.substr(0, prefix.size()) == prefix ? s.substr(prefix.size()) : std::string_view{};
  };
  std::string_view host = rest("https://");
  if (host.empty()) host = rest("http://");
  if (host.empty() || host.front() == '/') return false;
  for (char c : s) {
    if (static_cast<unsigned char>(c) <= 0x20) return false;
  }
  return true;
}

BenchmarkManifest BenchmarkManifest::load(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::ConfigError, "cannot read manifest " + path.string());
  BenchmarkManifest m;
  m.base_dir = path.parent_path();
  const std::string ext = path.extension().string();
  std::string line;
  int line_no = 0;

  if (ext == ".jsonl" || ext == ".json") {
    while (std::getline(in, line)) {
      ++line_no;
      if (text::trim(line).empty()) continue;
      nlohmann::json j;
      try {
        j = nlohmann::json::parse(line);
      } catch (const std::exception& e) {
        bad_row(path, line_no, e.what());
      }
      const auto str = [&](const char* k) -> std::string {
        const auto it = j.find(k);
        return (it != j.end() && it->is_string()) ? it->get<std::string>() : std::string();
      };
      m.entries.push_back(make_entry(path, line_no, str("locator"), str("complexity"), str("sha256")));
    }
    return m;
  }

  if (!std::getline(in, line)) return m;
  ++line_no;
  const auto header = split_csv(line);
  if (header.size() < 2 || header[0] != "locator" || header[1] != "complexity" ||
      (header.size() == 3 && header[2] != "sha256") || header.size() > 3) {
    bad_row(path, line_no, "header must be locator,complexity[,sha256]");
  }
  while (std::getline(in, line)) {
    ++line_no;
    if (text::trim(line).empty()) continue;
    const auto cells = split_csv(line);
    if (cells.size() < 2 || cells.size() > header.size()) bad_row(path, line_no, "wrong number of columns");
    m.entries.push_back(make_entry(path, line_no, cells[0], cells[1], cells.size() > 2 ? cells[2] : ""));
  }
  return m;
}

int IngestReport::total() const {
  int t = 0;
  for (const auto& [c, n] : per_category) t += n;
  return t;
}

std::string IngestReport::summary() const {
  std::ostringstream ss;
  for (const auto& [c, n] : per_category) ss << to_string(c) << " " << n << " / ";
  ss << "total " << total();
  return ss.str();
}

IngestReport import_manifest(Store& store, const BenchmarkManifest& m) {
  IngestReport report;
  for (std::size_t i = 0; i < m.entries.size(); ++i) {
    const ManifestEntry& e = m.entries[i];
    try {
      ImageRecord img;
      img.id = new_ulid();
      img.complexity = e.complexity;
      img.created_at = now_utc();
      img.locator = e.locator;
      std::string bytes;
      if (is_http_url(e.locator)) {
        img.source = ImageSource::Url;
        img.sha256 = e.sha256.value_or(sha256_hex(std::string_view(e.locator)));
      } else {
        fs::path p(e.locator);
        if (p.is_relative()) p = m.base_dir / p;
        std::ifstream in(p, std::ios::binary);
        if (!in) throw Error(Errc::ImageFetchFailed, "cannot read " + p.string());
        std::ostringstream ss;
        ss << in.rdbuf();
        bytes = ss.str();
        img.source = ImageSource::Upload;
        img.sha256 = sha256_hex(std::string_view(bytes));
        if (e.sha256 && *e.sha256 != img.sha256) {
          throw Error(Errc::InvalidArgument, "sha256 mismatch: file hashes to " + img.sha256);
        }
      }
      if (const auto existing = store.find_image_by_sha(img.sha256)) {
        ++report.already_present;
        ++report.per_category[existing->complexity];
        continue;
      }
      if (img.source == ImageSource::Upload) store.put_blob(bytes);
      store.put(img);
      ++report.created;
      ++report.per_category[img.complexity];
    } catch (const std::exception& ex) {
      report.failures.push_back({i, e.locator, ex.what()});
    }
  }
  return report;
}

}  // namespace arabiq::store
