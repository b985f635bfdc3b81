#pragma once

#include "arabiq/core/types.hpp"
#include "arabiq/store/store.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace arabiq::store {

struct ManifestEntry {
  std::string locator;  // file path (relative to the manifest) or http(s) URL
  Complexity complexity = Complexity::Moderate;
  std::optional<std::string> sha256;
};

struct BenchmarkManifest {
  std::vector<ManifestEntry> entries;
  std::filesystem::path base_dir;  // relative file locators resolve here

  /// CSV with header "locator,complexity[,sha256]" or JSONL of the same
  /// fields; chosen by a ".jsonl"/".json" extension. Malformed rows throw
  /// Error(MalformedInput) with the line number.
  static BenchmarkManifest load(const std::filesystem::path& path);
};

struct IngestFailure {
  std::size_t index = 0;  // 0-based entry index
  std::string locator;
  std::string reason;
};

struct IngestReport {
  // Images from the manifest present in the store afterwards, by category.
  std::map<Complexity, int> per_category{{Complexity::Simple, 0}, {Complexity::Moderate, 0}, {Complexity::Complex, 0}};
  int created = 0;
  int already_present = 0;
  std::vector<IngestFailure> failures;

  [[nodiscard]] int total() const;
  /// "simple 87 / moderate 56 / complex 68 / total 211"
  [[nodiscard]] std::string summary() const;
};

/// Files are read, stored as blobs and recorded as Upload images; URLs are
/// recorded as Url images without fetching (sha256 of the URL string unless
/// the entry supplies one). Entries whose sha is already stored count as
/// already_present. Per-entry failures are collected, never thrown.
IngestReport import_manifest(Store& store, const BenchmarkManifest& m);

bool is_http_url(std::string_view s) noexcept;

}  // namespace arabiq::store
