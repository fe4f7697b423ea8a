#include <sstream>

#include "cli.hpp"
#include "doctest.h"
#include "merit/jsonl.hpp"
#include "merit/synthetic.hpp"
#include "oracles.hpp"

using namespace merit;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code;
  std::string out, err;
};

Outcome run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

// Scored JSONL with n pairs and varied scores, written directly.
void fake_scored(const fs::path& p, std::size_t n) {
  synthetic::Rng rng(99);
  std::string content = io::manifest_line({"scored", "h", 0, {{"source_lang", "vi"}}, {}}) + "\n";
  for (std::size_t i = 0; i < n; ++i) {
    ScoredPair s;
    s.pair = {"SNT." + std::to_string(i), LanguageTag::vi, "x", "y", ""};
    s.s_base = rng.unit();
    s.s_ppl = rng.unit();
    s.s_ifd = rng.unit();
    s.s_final = 0.3 * s.s_base + 0.3 * s.s_ppl + 0.4 * s.s_ifd;
    content += io::to_json_line(s) + "\n";
  }
  io::write_file_atomic(p, content);
}

}  // namespace

TEST_CASE("usage errors exit 2 with usage text") {
  const auto r = run({"frobnicate"});
  CHECK(r.code == 2);
  CHECK(r.err.find("Usage") != std::string::npos);
  CHECK(run({}).code == 2);
  CHECK(run({"select", "--in", "x.jsonl", "--out", "y.jsonl"}).code == 2);
  CHECK(run({"eval", "--hyp", "a"}).code == 2);
}

TEST_CASE("help exits 0") {
  const auto r = run({"--help"});
  CHECK(r.code == 0);
  CHECK(r.out.find("select") != std::string::npos);
}

TEST_CASE("data errors exit 1") {
  auto dir = oracle::scratch_dir("cli_err");
  const auto r = run({"split", "--in", (dir / "missing.jsonl").string(), "--out-dir",
                      (dir / "out").string(), "--train", "8", "--dev", "1", "--test", "1"});
  CHECK(r.code == 1);
  CHECK(r.err.find("error") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("select keeps exactly k records") {
  auto dir = oracle::scratch_dir("cli_select");
  fake_scored(dir / "scored.jsonl", 10000);
  const auto r = run({"select", "--in", (dir / "scored.jsonl").string(), "--k", "9126", "--out",
                      (dir / "clean.jsonl").string(), "--audit", (dir / "audit.jsonl").string()});
  CHECK(r.code == 0);
  const auto clean = io::read_jsonl(dir / "clean.jsonl");
  CHECK(clean.records.size() == 9126);
  CHECK(io::read_jsonl(dir / "audit.jsonl").manifest->at("selected_count") == "9126");

  const auto t = run({"select", "--in", (dir / "scored.jsonl").string(), "--threshold", "0.5",
                      "--out", (dir / "t.jsonl").string()});
  CHECK(t.code == 0);
  const auto kept = io::read_jsonl(dir / "t.jsonl").records.size();
  CHECK(kept > 0);
  CHECK(kept < 10000);

  const auto strict = run({"select", "--in", (dir / "scored.jsonl").string(), "--k", "20000",
                           "--strict", "--out", (dir / "s.jsonl").string()});
  CHECK(strict.code == 1);
  fs::remove_all(dir);
}

TEST_CASE("stage-by-stage run on synthetic data") {
  auto dir = oracle::scratch_dir("cli_stages");
  const auto d = [&](const char* f) { return (dir / f).string(); };
  REQUIRE(run({"synth", "--out-dir", d("data"), "--pairs", "80", "--seed", "5"}).code == 0);
  CHECK(run({"ingest", "--in", d("data/vi.tsv"), "--out", d("vi.alt.jsonl")}).code == 0);
  CHECK(run({"align", "--src", d("data/vi.tsv"), "--zh", d("data/vi.zh.tsv"), "--lang", "vi",
             "--domains", d("data/vi.domains.tsv"), "--out", d("corpus.jsonl")})
            .code == 0);
  CHECK(run({"features", "--in", d("corpus.jsonl"), "--out", d("features.jsonl")}).code == 0);
  CHECK(run({"score", "--in", d("corpus.jsonl"), "--out", d("scored.jsonl")}).code == 0);
  CHECK(run({"select", "--in", d("scored.jsonl"), "--k", "40", "--out", d("clean.jsonl"),
             "--audit", d("audit.jsonl")})
            .code == 0);
  CHECK(run({"split", "--in", d("clean.jsonl"), "--out-dir", d("split"), "--train", "30",
             "--dev", "5", "--test", "5", "--seed", "1"})
            .code == 0);
  CHECK(io::read_jsonl(dir / "split" / "dev.jsonl").records.size() == 5);
  CHECK(run({"ltp", "--in", d("split/train.jsonl"), "--out", d("sft.jsonl")}).code == 0);
  CHECK(run({"sar", "--in", d("data/evals.jsonl"), "--out", d("rewards.jsonl")}).code == 0);
  const auto ev = run({"eval", "--hyp", d("data/vi.hyp.txt"), "--ref", d("data/vi.ref.txt"),
                       "--lang", "vi", "--out", d("metrics.json")});
  CHECK(ev.code == 0);
  CHECK(ev.out.find("bleu_chrf") != std::string::npos);
  const auto rep = run({"report", "--audit", d("audit.jsonl"), "--metrics", d("metrics.json")});
  CHECK(rep.code == 0);
  CHECK(rep.out.find("total") != std::string::npos);
  CHECK(run({"eval", "--hyp", d("data/vi.hyp.txt"), "--ref", d("data/vi.ref.txt"),
             "--sentence", "--metric", "bleu"})
            .code == 0);
  CHECK(run({"report", "--run-dir", d("split")}).code == 1);
  fs::remove_all(dir);
}
