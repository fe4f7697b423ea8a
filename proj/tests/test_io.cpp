#include <fstream>

#include "doctest.h"
#include "merit/error.hpp"
#include "merit/jsonl.hpp"
#include "oracles.hpp"

using namespace merit;

TEST_CASE("manifest line comes first and parses back") {
  auto dir = oracle::scratch_dir("io");
  io::Manifest m{"corpus", "abc123", 7, {{"source_lang", "vi"}}, {{"count", 3}}};
  const auto path = dir / "c.jsonl";
  const SentencePair p{"SNT.1", LanguageTag::vi, "xin chào \"bạn\"", "你好\t朋友", "news"};
  io::write_file_atomic(path, io::manifest_line(m) + "\n" + io::to_json_line(p) + "\n");

  const auto file = io::read_jsonl(path);
  REQUIRE(file.manifest.has_value());
  CHECK(file.manifest->at("tool") == "merit");
  CHECK(file.manifest->at("kind") == "corpus");
  CHECK(file.manifest->at("config_hash") == "abc123");
  CHECK(file.manifest->at("seed") == "7");
  CHECK(file.manifest->at("count") == "3");
  CHECK(file.manifest->at("version") == io::tool_version());
  REQUIRE(file.records.size() == 1);
  CHECK(io::sentence_pair_from_json(file.records[0]) == p);

  const auto corpus = io::read_corpus(path);
  CHECK(corpus.size() == 1);
  CHECK(corpus.pairs()[0] == p);
  std::filesystem::remove_all(dir);
}

TEST_CASE("empty corpus file keeps its language") {
  auto dir = oracle::scratch_dir("io_empty");
  io::Manifest m{"corpus", "h", 0, {{"source_lang", "lo"}}, {}};
  io::write_file_atomic(dir / "e.jsonl", io::manifest_line(m) + "\n");
  const auto c = io::read_corpus(dir / "e.jsonl");
  CHECK(c.empty());
  CHECK(c.source_lang() == LanguageTag::lo);
  std::filesystem::remove_all(dir);
}

TEST_CASE("scored pairs round-trip exactly") {
  ScoredPair s;
  s.pair = {"SNT.2", LanguageTag::my, "မင်္ဂလာပါ", "你好", ""};
  s.s_base = 0.1 + 0.2;
  s.s_ppl = 1.0 / 3.0;
  s.s_ifd = 0.987654321987654321;
  s.s_final = 0.3 * s.s_base + 0.3 * s.s_ppl + 0.4 * s.s_ifd;
  const auto back = io::scored_pair_from_json(io::to_json_line(s));
  CHECK(back.pair == s.pair);
  CHECK(back.s_base == s.s_base);
  CHECK(back.s_ppl == s.s_ppl);
  CHECK(back.s_ifd == s.s_ifd);
  CHECK(back.s_final == s.s_final);
}

TEST_CASE("malformed records are IO errors") {
  try {
    io::sentence_pair_from_json("{not json");
    FAIL("expected error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Io);
  }
  CHECK_THROWS_AS(io::sentence_pair_from_json(R"({"id":"a"})"), Error);
  CHECK_THROWS_AS(io::read_jsonl("/nonexistent/merit/file.jsonl"), Error);
}

TEST_CASE("atomic write replaces content and leaves no temp file") {
  auto dir = oracle::scratch_dir("io_atomic");
  io::write_file_atomic(dir / "f.txt", "first");
  io::write_file_atomic(dir / "f.txt", "second\n");
  CHECK(io::read_text_lines(dir / "f.txt") == std::vector<std::string>{"second"});
  std::size_t files = 0;
  for ([[maybe_unused]] const auto& e : std::filesystem::directory_iterator(dir)) ++files;
  CHECK(files == 1);
  CHECK_THROWS_AS(io::write_file_atomic(dir / "f.txt" / "nested.txt", "x"), Error);
  std::filesystem::remove_all(dir);
}

TEST_CASE("audit and SFT lines") {
  AuditEntry a{"SNT.3", std::string("length_ratio"), std::nullopt, {}, {}, {}, {}};
  const auto line = io::to_json_line(a);
  CHECK(line.find("\"dropped_reason\":\"length_ratio\"") != std::string::npos);

  SftRecord r{LanguageTag::vi, {"p", "⟨vi⟩", "x"}, {"你"}, 1};
  const auto sft = io::to_json_line(r, "你");
  CHECK(sft.find("\"lang\":\"vi\"") != std::string::npos);
  CHECK(sft.find("⟨vi⟩") != std::string::npos);
  CHECK(sft.find("\"target_text\":\"你\"") != std::string::npos);
}
