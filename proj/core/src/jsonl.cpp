#include "merit/jsonl.hpp"

#include <fstream>
#include <unistd.h>

#include "json.hpp"
#include "merit/error.hpp"

#ifndef MERIT_VERSION
#define MERIT_VERSION "0.0.0"
#endif

namespace merit::io {

using nlohmann::json;

namespace {

json parse_line(std::string_view line) {
  try {
    return json::parse(line);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Io, std::string("malformed JSON record: ") + e.what());
  }
}

template <typename F>
auto decode(std::string_view line, F&& f) {
  const json j = parse_line(line);
  try {
    return f(j);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Io, std::string("bad record field: ") + e.what());
  }
}

SentencePair pair_from(const json& j) {
  return SentencePair{j.at("id").get<std::string>(),
                      parse_language(j.at("source_lang").get<std::string>()),
                      j.at("source_text").get<std::string>(),
                      j.at("target_text").get<std::string>(),
                      j.value("domain", std::string())};
}

// Records keep their documented field order, so they go through ordered_json.
std::string dump_ordered(const nlohmann::ordered_json& j) { return j.dump(); }

}  // namespace

std::string tool_version() { return MERIT_VERSION; }

std::string manifest_line(const Manifest& m) {
  nlohmann::ordered_json inner;
  inner["tool"] = "merit";
  inner["version"] = tool_version();
  inner["kind"] = m.kind;
  inner["config_hash"] = m.config_hash;
  inner["seed"] = m.seed;
  for (const auto& [k, v] : m.text_fields) inner[k] = v;
  for (const auto& [k, v] : m.int_fields) inner[k] = v;
  nlohmann::ordered_json outer;
  outer["_manifest"] = inner;
  return outer.dump();
}

JsonlFile read_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open '" + path.string() + "'");
  JsonlFile file;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (first && line.rfind("{\"_manifest\"", 0) == 0) {
      const json j = parse_line(line);
      ManifestFields fields;
      for (const auto& [k, v] : j.at("_manifest").items()) {
        fields[k] = v.is_string() ? v.get<std::string>() : v.dump();
      }
      file.manifest = std::move(fields);
    } else {
      file.records.push_back(std::move(line));
    }
    first = false;
  }
  return file;
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) {
      throw Error(ErrorCode::Io, "cannot create '" + path.parent_path().string() +
                                     "': " + ec.message());
    }
  }
  auto tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::Io, "cannot write '" + tmp.string() + "'");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) {
      std::error_code ec;
      std::filesystem::remove(tmp, ec);
      throw Error(ErrorCode::Io, "short write to '" + tmp.string() + "'");
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw Error(ErrorCode::Io, "cannot rename onto '" + path.string() + "'");
  }
}

std::vector<std::string> read_text_lines(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open '" + path.string() + "'");
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(std::move(line));
  }
  return lines;
}

std::string to_json_line(const SentencePair& p) {
  nlohmann::ordered_json j;
  j["id"] = p.id;
  j["source_lang"] = to_code(p.source_lang);
  j["source_text"] = p.source_text;
  j["target_text"] = p.target_text;
  j["domain"] = p.domain;
  return dump_ordered(j);
}

SentencePair sentence_pair_from_json(std::string_view line) {
  return decode(line, pair_from);
}

std::string to_json_line(const AltRecord& r) {
  nlohmann::ordered_json j;
  j["id"] = r.id;
  j["text"] = r.text;
  return dump_ordered(j);
}

std::string feature_json_line(std::string_view id, const FeatureVector& fv, double s_base) {
  nlohmann::ordered_json j;
  j["id"] = id;
  j["r_len"] = fv.r_len;
  j["r_tok"] = fv.r_tok;
  j["d_punct"] = fv.d_punct;
  j["d_digit"] = fv.d_digit;
  j["d_uniq"] = fv.d_uniq;
  j["s_base"] = s_base;
  return dump_ordered(j);
}

std::string to_json_line(const ScoredPair& s) {
  nlohmann::ordered_json j;
  j["id"] = s.pair.id;
  j["source_lang"] = to_code(s.pair.source_lang);
  j["source_text"] = s.pair.source_text;
  j["target_text"] = s.pair.target_text;
  j["domain"] = s.pair.domain;
  j["s_base"] = s.s_base;
  j["s_ppl"] = s.s_ppl;
  j["s_ifd"] = s.s_ifd;
  j["s_final"] = s.s_final;
  return dump_ordered(j);
}

ScoredPair scored_pair_from_json(std::string_view line) {
  return decode(line, [](const json& j) {
    return ScoredPair{pair_from(j), j.at("s_base").get<double>(), j.at("s_ppl").get<double>(),
                      j.at("s_ifd").get<double>(), j.at("s_final").get<double>()};
  });
}

std::string to_json_line(const AuditEntry& a) {
  nlohmann::ordered_json j;
  j["id"] = a.id;
  if (a.dropped_reason) j["dropped_reason"] = *a.dropped_reason;
  if (a.rank) j["rank"] = *a.rank;
  if (a.s_base) j["s_base"] = *a.s_base;
  if (a.s_ppl) j["s_ppl"] = *a.s_ppl;
  if (a.s_ifd) j["s_ifd"] = *a.s_ifd;
  if (a.s_final) j["s_final"] = *a.s_final;
  return dump_ordered(j);
}

std::string to_json_line(const SftRecord& r, std::string_view target_text) {
  nlohmann::ordered_json j;
  j["lang"] = to_code(r.lang);
  j["input_tokens"] = r.input_tokens;
  std::string input_text;
  for (std::size_t i = 0; i < r.input_tokens.size(); ++i) {
    if (i) input_text.push_back(' ');
    input_text += r.input_tokens[i];
  }
  j["input_text"] = input_text;
  j["target_text"] = target_text;
  return dump_ordered(j);
}

Corpus read_corpus(const std::filesystem::path& path) {
  const auto file = read_jsonl(path);
  std::vector<SentencePair> pairs;
  pairs.reserve(file.records.size());
  for (const auto& line : file.records) pairs.push_back(sentence_pair_from_json(line));
  if (!pairs.empty()) {
    const auto lang = pairs.front().source_lang;
    return Corpus(lang, std::move(pairs));
  }
  if (file.manifest) {
    if (auto it = file.manifest->find("source_lang"); it != file.manifest->end()) {
      return Corpus(parse_language(it->second));
    }
  }
  throw Error(ErrorCode::EmptyCorpus, "'" + path.string() + "' holds no pairs");
}

std::vector<ScoredPair> read_scored(const std::filesystem::path& path) {
  const auto file = read_jsonl(path);
  std::vector<ScoredPair> out;
  out.reserve(file.records.size());
  for (const auto& line : file.records) out.push_back(scored_pair_from_json(line));
  return out;
}

}  // namespace merit::io
