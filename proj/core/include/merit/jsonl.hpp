#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "merit/corpus.hpp"
#include "merit/epds.hpp"
#include "merit/stat_features.hpp"
#include "merit/training_prep.hpp"

namespace merit::io {

/// First line of every JSONL artifact:
/// {"_manifest":{"tool":"merit","version":..,"kind":..,"config_hash":..,"seed":..,...}}
struct Manifest {
  std::string kind;
  std::string config_hash;
  std::uint64_t seed = 0;
  std::vector<std::pair<std::string, std::string>> text_fields;
  std::vector<std::pair<std::string, std::int64_t>> int_fields;
};

std::string tool_version();
std::string manifest_line(const Manifest& m);

/// Manifest values as strings (numbers rendered in decimal).
using ManifestFields = std::map<std::string, std::string>;

struct JsonlFile {
  std::optional<ManifestFields> manifest;
  std::vector<std::string> records;  // raw JSON lines, manifest excluded
};

/// Throws Io when the file cannot be opened.
JsonlFile read_jsonl(const std::filesystem::path& path);

/// Writes to a sibling temp file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

std::vector<std::string> read_text_lines(const std::filesystem::path& path);

// Record codecs. Parsing failures throw Error{Io}.
std::string to_json_line(const SentencePair& p);
SentencePair sentence_pair_from_json(std::string_view line);

std::string to_json_line(const AltRecord& r);

std::string feature_json_line(std::string_view id, const FeatureVector& fv, double s_base);

std::string to_json_line(const ScoredPair& s);
ScoredPair scored_pair_from_json(std::string_view line);

std::string to_json_line(const AuditEntry& a);

std::string to_json_line(const SftRecord& r, std::string_view target_text);

/// Builds a Corpus from JSONL records; the language comes from the records or,
/// for an empty file, from the manifest's "source_lang".
Corpus read_corpus(const std::filesystem::path& path);

std::vector<ScoredPair> read_scored(const std::filesystem::path& path);

}  // namespace merit::io
