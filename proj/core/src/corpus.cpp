#include "merit/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <unordered_set>

#include "merit/error.hpp"
#include "merit/stat_features.hpp"
#include "merit/unicode.hpp"

namespace merit {

namespace {

std::string_view trim(std::string_view s) {
  const auto is_ws = [](char c) {
    return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\v' ||
           c == '\f';
  };
  while (!s.empty() && is_ws(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_ws(s.back())) s.remove_suffix(1);
  return s;
}

std::map<std::string, std::string> index_records(
    std::span<const AltRecord> records, const char* side) {
  std::map<std::string, std::string> index;
  for (const auto& r : records) {
    if (!index.emplace(r.id, r.text).second) {
      throw Error(ErrorCode::DuplicateId,
                  "id '" + r.id + "' appears twice in " + side + " records");
    }
  }
  return index;
}

}  // namespace

Corpus::Corpus(LanguageTag source_lang, std::vector<SentencePair> pairs)
    : source_lang_(source_lang), pairs_(std::move(pairs)) {
  if (!is_source_language(source_lang_)) {
    throw Error(ErrorCode::InvalidLanguage, "zh cannot be a source language");
  }
  std::unordered_set<std::string_view> seen;
  seen.reserve(pairs_.size());
  for (const auto& p : pairs_) {
    if (p.id.empty()) throw Error(ErrorCode::EmptyId, "pair with empty id");
    if (p.source_lang != source_lang_) {
      throw Error(ErrorCode::InvalidLanguage,
                  "pair '" + p.id + "' has source language " +
                      std::string(to_code(p.source_lang)) + ", corpus is " +
                      std::string(to_code(source_lang_)));
    }
    if (!seen.insert(p.id).second) {
      throw Error(ErrorCode::DuplicateId, "id '" + p.id + "' repeated in corpus");
    }
  }
}

void ValidityConfig::validate() const {
  if (!(min_len_ratio > 0.0 && min_len_ratio <= 1.0)) {
    throw Error(ErrorCode::InvalidConfig, "min_len_ratio must be in (0,1]");
  }
  if (max_chars == 0) {
    throw Error(ErrorCode::InvalidConfig, "max_chars must be positive");
  }
}

AltRecord parse_alt_line(std::string_view line) {
  if (!line.empty() && line.back() == '\n') line.remove_suffix(1);
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  const auto tab = line.find('\t');
  if (tab == std::string_view::npos) {
    throw Error(ErrorCode::MalformedLine, "no TAB separator in '" +
                                              std::string(line.substr(0, 60)) +
                                              "'");
  }
  const auto id = trim(line.substr(0, tab));
  if (id.empty()) throw Error(ErrorCode::EmptyId, "record with empty id");
  const auto raw = line.substr(tab + 1);
  if (raw.find('\t') != std::string_view::npos) {
    throw Error(ErrorCode::MalformedLine,
                "unescaped TAB inside text of '" + std::string(id) + "'");
  }
  AltRecord record{std::string(id), {}};
  record.text.reserve(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    if (raw[i] == '\\' && i + 1 < raw.size() && raw[i + 1] == 't') {
      record.text.push_back('\t');
      ++i;
    } else {
      record.text.push_back(raw[i]);
    }
  }
  return record;
}

std::string format_alt_line(const AltRecord& record) {
  std::string line = record.id;
  line.push_back('\t');
  for (char c : record.text) {
    if (c == '\t') {
      line += "\\t";
    } else {
      line.push_back(c);
    }
  }
  return line;
}

std::vector<AltRecord> read_alt_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open '" + path + "'");
  std::vector<AltRecord> records;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    try {
      records.push_back(parse_alt_line(line));
    } catch (const Error& e) {
      throw Error(e.code(), path + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return records;
}

AlignResult align_by_id(std::span<const AltRecord> source_records,
                        std::span<const AltRecord> zh_records, LanguageTag lang,
                        const IngestOptions& options) {
  if (!is_source_language(lang)) {
    throw Error(ErrorCode::InvalidLanguage, "zh cannot be a source language");
  }
  const auto src = index_records(source_records, "source");
  const auto zh = index_records(zh_records, "zh");

  std::vector<SentencePair> pairs;
  std::size_t source_only = 0;
  for (const auto& [id, text] : src) {
    auto it = zh.find(id);
    if (it == zh.end()) {
      ++source_only;
      continue;
    }
    SentencePair p{id, lang, text, it->second, {}};
    if (options.nfc) {
      p.source_text = unicode::nfc(p.source_text);
      p.target_text = unicode::nfc(p.target_text);
    }
    pairs.push_back(std::move(p));
  }
  const std::size_t target_only = zh.size() - pairs.size();
  return AlignResult{Corpus(lang, std::move(pairs)), source_only, target_only};
}

std::optional<std::string> validity_failure(const SentencePair& pair,
                                            const ValidityConfig& cfg) {
  const auto nx = unicode::char_count(pair.source_text);
  const auto ny = unicode::char_count(pair.target_text);
  if (nx == 0 || ny == 0) {
    // An empty side has no defined length ratio, so it never passes even when
    // require_nonempty is off; only the reported reason differs.
    return std::string(cfg.require_nonempty ? "empty_text" : "length_ratio");
  }
  if (nx > cfg.max_chars || ny > cfg.max_chars) return std::string("too_long");
  if (length_ratio(pair.source_text, pair.target_text) < cfg.min_len_ratio) {
    return std::string("length_ratio");
  }
  return std::nullopt;
}

}  // namespace merit
