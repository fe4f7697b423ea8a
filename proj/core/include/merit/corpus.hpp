#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "merit/language.hpp"

namespace merit {

struct SentencePair {
  std::string id;
  LanguageTag source_lang = LanguageTag::vi;
  std::string source_text;
  std::string target_text;  // Chinese
  std::string domain;       // may be empty

  friend bool operator==(const SentencePair&, const SentencePair&) = default;
};

/// An ordered collection of pairs sharing one source language, ids unique.
class Corpus {
 public:
  explicit Corpus(LanguageTag source_lang) : source_lang_(source_lang) {}

  /// Validates the invariants: non-empty unique ids, matching source language,
  /// source language not zh. Throws Error.
  Corpus(LanguageTag source_lang, std::vector<SentencePair> pairs);

  LanguageTag source_lang() const noexcept { return source_lang_; }
  const std::vector<SentencePair>& pairs() const noexcept { return pairs_; }
  std::size_t size() const noexcept { return pairs_.size(); }
  bool empty() const noexcept { return pairs_.empty(); }

 private:
  LanguageTag source_lang_;
  std::vector<SentencePair> pairs_;
};

struct ValidityConfig {
  double min_len_ratio = 0.3;
  std::size_t max_chars = 4096;
  bool require_nonempty = true;

  void validate() const;
};

/// One "id<TAB>text" record as read from an ALT-style TSV file.
struct AltRecord {
  std::string id;
  std::string text;

  friend bool operator==(const AltRecord&, const AltRecord&) = default;
};

/// Splits on the first TAB, trims the id, unescapes "\t" in the text and drops
/// a trailing CR. Throws MalformedLine or EmptyId.
AltRecord parse_alt_line(std::string_view line);

/// Inverse of parse_alt_line for canonical records.
std::string format_alt_line(const AltRecord& record);

std::vector<AltRecord> read_alt_file(const std::string& path);

struct IngestOptions {
  /// Apply NFC to both texts. Off by default: texts are kept as ingested.
  bool nfc = false;
};

struct AlignResult {
  Corpus corpus;
  std::size_t dropped_source_only = 0;
  std::size_t dropped_target_only = 0;

  std::size_t dropped() const noexcept {
    return dropped_source_only + dropped_target_only;
  }
};

/// Joins source and Chinese records sharing an id. Output is ordered by id.
/// Throws DuplicateId if an id repeats on either side.
AlignResult align_by_id(std::span<const AltRecord> source_records,
                        std::span<const AltRecord> zh_records, LanguageTag lang,
                        const IngestOptions& options = {});

/// Reason a pair fails the hard filter, or nullopt when it passes.
/// Reasons: "empty_text", "too_long", "length_ratio".
std::optional<std::string> validity_failure(const SentencePair& pair,
                                            const ValidityConfig& cfg);

inline bool validity_filter(const SentencePair& pair, const ValidityConfig& cfg) {
  return !validity_failure(pair, cfg).has_value();
}

}  // namespace merit
