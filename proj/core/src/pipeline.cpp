#include "merit/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <map>
#include <sstream>

#include "json.hpp"
#include "merit/error.hpp"
#include "merit/hash.hpp"
#include "merit/jsonl.hpp"
#include "merit/unicode.hpp"

namespace merit {

using nlohmann::json;
using nlohmann::ordered_json;
namespace fs = std::filesystem;

namespace {

std::string join_lines(const std::vector<std::string>& lines) {
  std::string out;
  for (const auto& l : lines) {
    out += l;
    out.push_back('\n');
  }
  return out;
}

io::Manifest manifest(std::string kind, const StageContext& ctx) {
  io::Manifest m;
  m.kind = std::move(kind);
  m.config_hash = ctx.config_hash;
  m.seed = ctx.seed;
  return m;
}

json read_json_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open '" + path.string() + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Io, "'" + path.string() + "': " + e.what());
  }
}

SplitSpec split_from_json(const json& j, std::uint64_t seed) {
  SplitSpec s;
  s.n_train = j.value("train", s.n_train);
  s.n_dev = j.value("dev", s.n_dev);
  s.n_test = j.value("test", s.n_test);
  s.seed = seed;
  return s;
}

ordered_json split_to_json(const SplitSpec& s) {
  return ordered_json{{"train", s.n_train}, {"dev", s.n_dev}, {"test", s.n_test}};
}

std::string_view smoothing_name(metrics::BleuSmoothing s) {
  return s == metrics::BleuSmoothing::AddOne ? "add-one" : "none";
}

std::string_view granularity_name(metrics::Granularity g) {
  return g == metrics::Granularity::Word ? "word" : "char";
}

}  // namespace

void PipelineConfig::validate() const {
  epds.validate();
  sar.validate();
  if (fallback_order == 0 || !(fallback_smoothing > 0.0)) {
    throw Error(ErrorCode::InvalidConfig, "fallback model needs order >= 1 and smoothing > 0");
  }
  for (const auto& job : languages) {
    if (!is_source_language(job.lang)) {
      throw Error(ErrorCode::InvalidConfig, "zh cannot be a source language");
    }
  }
}

PipelineConfig load_pipeline_config(const fs::path& path) {
  const json j = read_json_file(path);
  const fs::path base = path.has_parent_path() ? path.parent_path() : fs::path(".");
  auto resolve = [&](const std::string& p) {
    const fs::path fp(p);
    return fp.is_absolute() ? fp : base / fp;
  };

  PipelineConfig cfg;
  try {
    cfg.seed = j.value("seed", std::uint64_t{0});
    if (j.contains("split")) cfg.split = split_from_json(j.at("split"), cfg.seed);
    cfg.split.seed = cfg.seed;

    for (const auto& lj : j.value("languages", json::array())) {
      LanguageJob job;
      job.lang = parse_language(lj.at("lang").get<std::string>());
      job.source_tsv = resolve(lj.at("source").get<std::string>());
      job.target_tsv = resolve(lj.at("target").get<std::string>());
      if (lj.contains("domains")) job.domains_tsv = resolve(lj.at("domains").get<std::string>());
      job.k = lj.at("k").get<std::size_t>();
      if (lj.contains("split")) job.split = split_from_json(lj.at("split"), cfg.seed);
      if (lj.contains("hypotheses")) job.hypotheses = resolve(lj.at("hypotheses").get<std::string>());
      if (lj.contains("references")) job.references = resolve(lj.at("references").get<std::string>());
      cfg.languages.push_back(std::move(job));
    }

    if (auto it = j.find("ingest"); it != j.end()) cfg.ingest.nfc = it->value("nfc", false);

    if (auto it = j.find("validity"); it != j.end()) {
      auto& v = cfg.epds.validity;
      v.min_len_ratio = it->value("min_len_ratio", v.min_len_ratio);
      v.max_chars = it->value("max_chars", v.max_chars);
      v.require_nonempty = it->value("require_nonempty", v.require_nonempty);
    }
    if (auto it = j.find("base"); it != j.end() && it->contains("weights")) {
      const auto w = it->at("weights").get<std::vector<double>>();
      if (w.size() != 5) throw Error(ErrorCode::InvalidWeights, "base.weights needs 5 values");
      std::copy(w.begin(), w.end(), cfg.epds.base.weights.begin());
    }
    if (auto it = j.find("scorer"); it != j.end()) {
      auto& s = cfg.epds.scorer;
      s.sigma = it->value("sigma", s.sigma);
      s.tau = it->value("tau", s.tau);
      if (it->contains("endpoint") && !it->at("endpoint").is_null()) {
        s.endpoint = it->at("endpoint").get<std::string>();
      }
      s.timeout = std::chrono::milliseconds(it->value("timeout_ms", s.timeout.count()));
      s.max_in_flight = it->value("max_in_flight", s.max_in_flight);
      s.batch_size = it->value("batch_size", s.batch_size);
      cfg.fallback_order = it->value("fallback_order", cfg.fallback_order);
      cfg.fallback_smoothing = it->value("fallback_smoothing", cfg.fallback_smoothing);
    }
    if (auto it = j.find("weights"); it != j.end()) {
      if (it->value("unweighted", false)) {
        cfg.epds.weights = ComposeWeights::unweighted();
      } else {
        auto& w = cfg.epds.weights;
        w.alpha = it->value("alpha", w.alpha);
        w.beta = it->value("beta", w.beta);
        w.gamma = it->value("gamma", w.gamma);
      }
    }
    if (auto it = j.find("prompt"); it != j.end()) {
      const auto naming = it->value("naming", std::string("iso")) == "english"
                              ? LanguageNaming::EnglishName
                              : LanguageNaming::IsoCode;
      if (it->contains("template_file")) {
        cfg.epds.prompt =
            PromptTemplate::load(resolve(it->at("template_file").get<std::string>()), naming);
      } else {
        cfg.epds.prompt = PromptTemplate(
            it->value("template", std::string(PromptTemplate::kDefault)), naming);
      }
    }
    cfg.epds.strict = j.value("strict", false);

    if (auto it = j.find("sar"); it != j.end()) {
      auto& s = cfg.sar;
      s.pattern = it->value("pattern", s.pattern);
      s.mode = it->value("mode", std::string("cued")) == "permissive" ? ExtractionMode::Permissive
                                                                        : ExtractionMode::Cued;
      s.score_min = it->value("score_min", s.score_min);
      s.score_max = it->value("score_max", s.score_max);
      s.tolerance = it->value("tolerance", s.tolerance);
      s.reward_exact = it->value("reward_exact", s.reward_exact);
      s.reward_partial = it->value("reward_partial", s.reward_partial);
      if (it->contains("input")) cfg.sar_input = resolve(it->at("input").get<std::string>());
    }
    if (auto it = j.find("metrics"); it != j.end()) {
      auto& m = cfg.metrics;
      m.smoothing = it->value("smoothing", std::string("add-one")) == "none"
                        ? metrics::BleuSmoothing::None
                        : metrics::BleuSmoothing::AddOne;
      m.granularity = it->value("granularity", std::string("word")) == "char"
                          ? metrics::Granularity::Character
                          : metrics::Granularity::Word;
      m.chrf_order = it->value("chrf_order", m.chrf_order);
      m.chrf_beta = it->value("chrf_beta", m.chrf_beta);
      m.rouge_beta = it->value("rouge_beta", m.rouge_beta);
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidConfig, "'" + path.string() + "': " + e.what());
  }
  cfg.validate();
  return cfg;
}

std::string config_to_json(const PipelineConfig& cfg) {
  ordered_json j;
  j["seed"] = cfg.seed;
  j["languages"] = ordered_json::array();
  for (const auto& job : cfg.languages) {
    ordered_json lj;
    lj["lang"] = to_code(job.lang);
    lj["source"] = job.source_tsv.generic_string();
    lj["target"] = job.target_tsv.generic_string();
    if (job.domains_tsv) lj["domains"] = job.domains_tsv->generic_string();
    lj["k"] = job.k;
    if (job.split) lj["split"] = split_to_json(*job.split);
    if (job.hypotheses) lj["hypotheses"] = job.hypotheses->generic_string();
    if (job.references) lj["references"] = job.references->generic_string();
    j["languages"].push_back(lj);
  }
  j["ingest"] = {{"nfc", cfg.ingest.nfc}};
  const auto& v = cfg.epds.validity;
  j["validity"] = {{"min_len_ratio", v.min_len_ratio},
                   {"max_chars", v.max_chars},
                   {"require_nonempty", v.require_nonempty}};
  j["base"] = {{"weights", cfg.epds.base.weights}};
  const auto& s = cfg.epds.scorer;
  j["scorer"] = {{"sigma", s.sigma},
                 {"tau", s.tau},
                 {"endpoint", s.endpoint ? ordered_json(*s.endpoint) : ordered_json(nullptr)},
                 {"timeout_ms", s.timeout.count()},
                 {"max_in_flight", s.max_in_flight},
                 {"batch_size", s.batch_size},
                 {"fallback_order", cfg.fallback_order},
                 {"fallback_smoothing", cfg.fallback_smoothing}};
  const auto& w = cfg.epds.weights;
  j["weights"] = {{"alpha", w.alpha}, {"beta", w.beta}, {"gamma", w.gamma}};
  j["prompt"] = {{"template", cfg.epds.prompt.text()},
                 {"naming", cfg.epds.prompt.naming() == LanguageNaming::IsoCode ? "iso" : "english"}};
  j["strict"] = cfg.epds.strict;
  j["split"] = split_to_json(cfg.split);
  j["sar"] = {{"pattern", cfg.sar.pattern},
              {"mode", cfg.sar.mode == ExtractionMode::Cued ? "cued" : "permissive"},
              {"score_min", cfg.sar.score_min},
              {"score_max", cfg.sar.score_max},
              {"tolerance", cfg.sar.tolerance},
              {"reward_exact", cfg.sar.reward_exact},
              {"reward_partial", cfg.sar.reward_partial}};
  if (cfg.sar_input) j["sar"]["input"] = cfg.sar_input->generic_string();
  const auto& m = cfg.metrics;
  j["metrics"] = {{"smoothing", smoothing_name(m.smoothing)},
                  {"granularity", granularity_name(m.granularity)},
                  {"chrf_order", m.chrf_order},
                  {"chrf_beta", m.chrf_beta},
                  {"rouge_beta", m.rouge_beta}};
  return j.dump(2);
}

std::string config_hash(const PipelineConfig& cfg) {
  return to_hex(fnv1a64(config_to_json(cfg)));
}

std::vector<std::string> fallback_training_texts(const Corpus& corpus,
                                                 const PromptTemplate& prompt) {
  std::vector<std::string> texts;
  if (corpus.empty()) return texts;
  const auto instruction = prompt.render(corpus.source_lang());
  texts.reserve(corpus.size() * 2);
  for (const auto& p : corpus.pairs()) {
    texts.push_back(instruction + p.source_text + p.target_text);
    texts.push_back(p.target_text);
  }
  return texts;
}

std::unique_ptr<LogprobScorer> make_scorer(const PipelineConfig& cfg, const Corpus& corpus) {
  if (auto endpoint = resolve_endpoint(cfg.epds.scorer)) {
    return std::make_unique<RemoteScorer>(*endpoint, cfg.epds.scorer);
  }
  auto texts = fallback_training_texts(corpus, cfg.epds.prompt);
  if (texts.empty()) texts.emplace_back();
  auto model = std::make_shared<const CharNgramModel>(
      train_char_ngram(texts, cfg.fallback_order, cfg.fallback_smoothing));
  return std::make_unique<CharNgramScorer>(std::move(model));
}

// ---------------------------------------------------------------------------

void write_corpus(const fs::path& out, const Corpus& corpus, std::string_view kind,
                  const StageContext& ctx) {
  auto m = manifest(std::string(kind), ctx);
  m.text_fields.emplace_back("source_lang", std::string(to_code(corpus.source_lang())));
  m.int_fields.emplace_back("records", static_cast<std::int64_t>(corpus.size()));
  std::vector<std::string> lines{io::manifest_line(m)};
  for (const auto& p : corpus.pairs()) lines.push_back(io::to_json_line(p));
  io::write_file_atomic(out, join_lines(lines));
}

AlignResult stage_align(const fs::path& source_tsv, const fs::path& target_tsv,
                        const std::optional<fs::path>& domains_tsv, LanguageTag lang,
                        const IngestOptions& options, const fs::path& out,
                        const StageContext& ctx) {
  const auto src = read_alt_file(source_tsv.string());
  const auto zh = read_alt_file(target_tsv.string());
  auto result = align_by_id(src, zh, lang, options);
  if (domains_tsv) {
    std::map<std::string, std::string> domain_of;
    for (auto& r : read_alt_file(domains_tsv->string())) domain_of[r.id] = std::move(r.text);
    std::vector<SentencePair> pairs = result.corpus.pairs();
    for (auto& p : pairs) {
      if (auto it = domain_of.find(p.id); it != domain_of.end()) p.domain = it->second;
    }
    result.corpus = Corpus(lang, std::move(pairs));
  }
  auto m = manifest("corpus", ctx);
  m.text_fields.emplace_back("source_lang", std::string(to_code(lang)));
  m.int_fields.emplace_back("records", static_cast<std::int64_t>(result.corpus.size()));
  m.int_fields.emplace_back("dropped_source_only",
                            static_cast<std::int64_t>(result.dropped_source_only));
  m.int_fields.emplace_back("dropped_target_only",
                            static_cast<std::int64_t>(result.dropped_target_only));
  std::vector<std::string> lines{io::manifest_line(m)};
  for (const auto& p : result.corpus.pairs()) lines.push_back(io::to_json_line(p));
  io::write_file_atomic(out, join_lines(lines));
  return result;
}

void stage_features(const Corpus& corpus, const EpdsConfig& cfg, const fs::path& out,
                    const StageContext& ctx) {
  cfg.base.validate();
  std::vector<std::string> lines{io::manifest_line(manifest("features", ctx))};
  for (const auto& p : corpus.pairs()) {
    if (!validity_filter(p, cfg.validity)) continue;
    FeatureVector fv;
    try {
      fv = extract_features(p.source_text, p.target_text);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::EmptyText) throw;
      continue;
    }
    lines.push_back(io::feature_json_line(p.id, fv, base_score(fv, cfg.base)));
  }
  io::write_file_atomic(out, join_lines(lines));
}

ScoringOutcome stage_score(const Corpus& corpus, const EpdsConfig& cfg,
                           const LogprobScorer& scorer, const fs::path& out,
                           const StageContext& ctx) {
  auto outcome = score_corpus(corpus, cfg, scorer);
  auto m = manifest("scored", ctx);
  m.text_fields.emplace_back("source_lang", std::string(to_code(corpus.source_lang())));
  m.int_fields.emplace_back("scored", static_cast<std::int64_t>(outcome.scored.size()));
  m.int_fields.emplace_back("dropped", static_cast<std::int64_t>(outcome.dropped.size()));
  std::vector<std::string> lines{io::manifest_line(m)};
  for (const auto& s : outcome.scored) lines.push_back(io::to_json_line(s));
  for (const auto& d : outcome.dropped) {
    ordered_json j;
    j["id"] = d.id;
    j["dropped_reason"] = d.reason;
    lines.push_back(j.dump());
  }
  io::write_file_atomic(out, join_lines(lines));
  return outcome;
}

ScoringOutcome read_scoring_outcome(const fs::path& path, LanguageTag* lang) {
  const auto file = io::read_jsonl(path);
  ScoringOutcome outcome;
  std::optional<LanguageTag> seen;
  if (file.manifest) {
    if (auto it = file.manifest->find("source_lang"); it != file.manifest->end()) {
      seen = parse_language(it->second);
    }
  }
  for (const auto& line : file.records) {
    if (line.find("\"dropped_reason\"") != std::string::npos &&
        line.find("\"s_final\"") == std::string::npos) {
      const json j = json::parse(line);
      outcome.dropped.push_back({j.at("id").get<std::string>(),
                                 j.at("dropped_reason").get<std::string>()});
      continue;
    }
    auto s = io::scored_pair_from_json(line);
    if (!seen) seen = s.pair.source_lang;
    outcome.scored.push_back(std::move(s));
  }
  if (!seen) throw Error(ErrorCode::EmptyCorpus, "'" + path.string() + "' has no language");
  if (lang) *lang = *seen;
  return outcome;
}

EpdsResult stage_select(const ScoringOutcome& outcome, LanguageTag lang,
                        const SelectOptions& options, const fs::path& out,
                        const std::optional<fs::path>& audit_out, const StageContext& ctx) {
  std::size_t k = options.k.value_or(outcome.scored.size());
  if (options.threshold) {
    k = static_cast<std::size_t>(std::count_if(
        outcome.scored.begin(), outcome.scored.end(),
        [t = *options.threshold](const ScoredPair& s) { return s.s_final >= t; }));
    if (options.k) k = std::min(k, *options.k);
  }
  auto result = select_from_scored(lang, outcome, k, options.strict);
  if (result.shortfall) {
    std::fprintf(stderr, "warning: only %zu valid pairs for k=%zu (%s)\n", result.valid_count,
                 k, std::string(to_code(lang)).c_str());
  }
  const auto input_count = outcome.scored.size() + outcome.dropped.size();

  auto m = manifest("selected", ctx);
  m.text_fields.emplace_back("source_lang", std::string(to_code(lang)));
  m.int_fields.emplace_back("records", static_cast<std::int64_t>(result.clean.size()));
  std::vector<std::string> lines{io::manifest_line(m)};
  for (const auto& p : result.clean.pairs()) lines.push_back(io::to_json_line(p));
  io::write_file_atomic(out, join_lines(lines));

  if (audit_out) {
    auto am = manifest("select_audit", ctx);
    am.text_fields.emplace_back("source_lang", std::string(to_code(lang)));
    am.int_fields.emplace_back("k", static_cast<std::int64_t>(k));
    am.int_fields.emplace_back("input_count", static_cast<std::int64_t>(input_count));
    am.int_fields.emplace_back("valid_count", static_cast<std::int64_t>(result.valid_count));
    am.int_fields.emplace_back("selected_count", static_cast<std::int64_t>(result.clean.size()));
    am.int_fields.emplace_back("shortfall", result.shortfall ? 1 : 0);
    std::vector<std::string> alines{io::manifest_line(am)};
    for (const auto& a : result.audit) alines.push_back(io::to_json_line(a));
    io::write_file_atomic(*audit_out, join_lines(alines));
  }
  return result;
}

SplitResult stage_split(const Corpus& corpus, const SplitSpec& spec, const fs::path& out_dir,
                        const StageContext& ctx) {
  auto result = split(corpus, spec);

  std::string content;
  for (const auto& p : corpus.pairs()) content += io::to_json_line(p) + "\n";
  const auto content_hash = to_hex(fnv1a64(content));

  ordered_json report;
  for (auto name : {SplitName::Train, SplitName::Dev, SplitName::Test}) {
    const auto& pairs = result.get(name);
    auto m = manifest(std::string(to_string(name)), ctx);
    m.seed = spec.seed;
    m.text_fields.emplace_back("source_lang", std::string(to_code(corpus.source_lang())));
    m.text_fields.emplace_back("input_hash", content_hash);
    m.int_fields.emplace_back("records", static_cast<std::int64_t>(pairs.size()));
    std::vector<std::string> lines{io::manifest_line(m)};
    for (const auto& p : pairs) lines.push_back(io::to_json_line(p));
    io::write_file_atomic(out_dir / (std::string(to_string(name)) + ".jsonl"), join_lines(lines));

    ordered_json per_domain;
    for (const auto& [domain, q] : result.quota_report[static_cast<std::size_t>(name)]) {
      per_domain[domain] = {{"allocated", q.allocated},
                            {"sampled", q.sampled},
                            {"compensated", q.compensated}};
    }
    report[std::string(to_string(name))] = per_domain;
  }
  io::write_file_atomic(out_dir / "quota_report.json", report.dump(2) + "\n");

  ordered_json man;
  man["tool"] = "merit";
  man["version"] = io::tool_version();
  man["config_hash"] = ctx.config_hash;
  man["seed"] = spec.seed;
  man["input_hash"] = content_hash;
  man["input_records"] = corpus.size();
  man["sizes"] = split_to_json(spec);
  io::write_file_atomic(out_dir / "manifest.json", man.dump(2) + "\n");
  return result;
}

std::vector<RewardRecord> stage_sar(const fs::path& in, const SarConfig& cfg,
                                    const fs::path& out, const StageContext& ctx) {
  const ScoreExtractor extractor(cfg);
  const auto file = io::read_jsonl(in);
  std::vector<RewardRecord> records;
  records.reserve(file.records.size());
  for (const auto& line : file.records) {
    json j;
    try {
      j = json::parse(line);
      RewardRecord r;
      r.id = j.at("id").get<std::string>();
      r.expert = j.at("expert_score").get<int>();
      r.extracted = extractor.conservative(j.at("eval_log").get<std::string>());
      r.reward = sar_reward(r.extracted, r.expert, cfg);
      r.group_id = j.value("group_id", std::string());
      records.push_back(std::move(r));
    } catch (const json::exception& e) {
      throw Error(ErrorCode::Io, "'" + in.string() + "': " + e.what());
    }
  }

  std::map<std::string, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (!records[i].group_id.empty()) groups[records[i].group_id].push_back(i);
  }
  for (const auto& [gid, idx] : groups) {
    if (idx.size() < 2) continue;
    std::vector<double> rewards;
    for (auto i : idx) rewards.push_back(records[i].reward);
    const auto adv = group_normalize(rewards);
    for (std::size_t t = 0; t < idx.size(); ++t) records[idx[t]].advantage = adv[t];
  }

  std::vector<std::string> lines{io::manifest_line(manifest("rewards", ctx))};
  for (const auto& r : records) {
    ordered_json j;
    j["id"] = r.id;
    j["extracted"] = r.extracted;
    j["expert"] = r.expert;
    j["reward"] = r.reward;
    if (r.advantage) j["advantage"] = *r.advantage;
    j["group_id"] = r.group_id;
    lines.push_back(j.dump());
  }
  io::write_file_atomic(out, join_lines(lines));
  return records;
}

void write_eval_records(const fs::path& out, const std::vector<synthetic::EvalRecord>& records) {
  std::string content;
  for (const auto& r : records) {
    ordered_json j;
    j["id"] = r.id;
    j["eval_log"] = r.eval_log;
    j["expert_score"] = r.expert_score;
    j["group_id"] = r.group_id;
    content += j.dump() + "\n";
  }
  io::write_file_atomic(out, content);
}

void stage_ltp(const Corpus& corpus, const PromptTemplate& prompt, const fs::path& out,
               const StageContext& ctx) {
  const auto vocab = Vocabulary::with_language_tokens();
  std::vector<std::string> lines{io::manifest_line(manifest("sft", ctx))};
  for (const auto& p : corpus.pairs()) {
    if (unicode::tokenize(p.source_text).empty()) continue;
    lines.push_back(io::to_json_line(make_sft_record(p, prompt, vocab), p.target_text));
  }
  io::write_file_atomic(out, join_lines(lines));
}

metrics::MetricReport stage_eval(const fs::path& hyps, const fs::path& refs,
                                 const metrics::MetricOptions& options,
                                 std::optional<LanguageTag> lang, const fs::path& out,
                                 const StageContext& ctx) {
  const auto h = io::read_text_lines(hyps);
  const auto r = io::read_text_lines(refs);
  const auto rep = metrics::evaluate_corpus(h, r, options);
  ordered_json j;
  ordered_json m;
  m["tool"] = "merit";
  m["version"] = io::tool_version();
  m["kind"] = "metrics";
  m["config_hash"] = ctx.config_hash;
  m["seed"] = ctx.seed;
  j["_manifest"] = m;
  if (lang) j["lang"] = to_code(*lang);
  j["segments"] = rep.segments;
  j["corpus_level"] = rep.corpus_level;
  j["smoothing"] = smoothing_name(options.smoothing);
  j["granularity"] = granularity_name(options.granularity);
  j["bleu4"] = rep.bleu4;
  j["chrf"] = rep.chrf;
  j["rouge_l"] = rep.rouge_l;
  j["bleu_chrf"] = rep.bleu_chrf;
  io::write_file_atomic(out, j.dump(2) + "\n");
  return rep;
}

// ---------------------------------------------------------------------------

double reduction_percent(std::size_t original, std::size_t retained) {
  if (original == 0) return 0.0;
  return 100.0 * (1.0 - static_cast<double>(retained) / static_cast<double>(original));
}

Report build_report(const std::vector<fs::path>& audits, const std::vector<fs::path>& metric_files) {
  if (audits.empty()) throw Error(ErrorCode::MissingArtifact, "no selection audits to report on");
  Report rep;
  std::size_t total_in = 0, total_out = 0;
  for (const auto& path : audits) {
    if (!fs::exists(path)) throw Error(ErrorCode::MissingArtifact, "missing '" + path.string() + "'");
    const auto file = io::read_jsonl(path);
    if (!file.manifest) {
      throw Error(ErrorCode::MissingArtifact, "'" + path.string() + "' has no manifest");
    }
    const auto& m = *file.manifest;
    auto get = [&](const char* key) -> std::string {
      auto it = m.find(key);
      if (it == m.end()) {
        throw Error(ErrorCode::MissingArtifact,
                    "'" + path.string() + "' manifest lacks '" + key + "'");
      }
      return it->second;
    };
    RetentionRow row;
    row.label = get("source_lang");
    row.original = std::stoull(get("input_count"));
    row.retained = std::stoull(get("selected_count"));
    row.reduction_pct = reduction_percent(row.original, row.retained);
    total_in += row.original;
    total_out += row.retained;
    rep.retention.push_back(std::move(row));
  }
  rep.retention.push_back({"total", total_in, total_out, reduction_percent(total_in, total_out)});

  for (const auto& path : metric_files) {
    if (!fs::exists(path)) throw Error(ErrorCode::MissingArtifact, "missing '" + path.string() + "'");
    const json j = read_json_file(path);
    MetricRow row;
    row.label = j.value("lang", path.parent_path().filename().string());
    row.bleu4 = j.at("bleu4").get<double>();
    row.chrf = j.at("chrf").get<double>();
    row.rouge_l = j.at("rouge_l").get<double>();
    row.bleu_chrf = metrics::bleu_chrf(row.bleu4, row.chrf);
    rep.metrics.push_back(std::move(row));
  }
  return rep;
}

Report report_run_dir(const fs::path& run_dir) {
  if (!fs::is_directory(run_dir)) {
    throw Error(ErrorCode::MissingArtifact, "'" + run_dir.string() + "' is not a directory");
  }
  std::vector<fs::path> audits, metric_files;
  std::vector<fs::path> subdirs;
  for (const auto& entry : fs::directory_iterator(run_dir)) {
    if (entry.is_directory()) subdirs.push_back(entry.path());
  }
  std::sort(subdirs.begin(), subdirs.end());
  for (const auto& d : subdirs) {
    if (fs::exists(d / "select.audit.jsonl")) audits.push_back(d / "select.audit.jsonl");
    if (fs::exists(d / "metrics.json")) metric_files.push_back(d / "metrics.json");
  }
  return build_report(audits, metric_files);
}

std::string report_to_json(const Report& r) {
  ordered_json j;
  j["retention"] = ordered_json::array();
  for (const auto& row : r.retention) {
    j["retention"].push_back({{"lang", row.label},
                              {"original", row.original},
                              {"retained", row.retained},
                              {"reduction_pct", std::round(row.reduction_pct * 10.0) / 10.0}});
  }
  j["metrics"] = ordered_json::array();
  for (const auto& row : r.metrics) {
    j["metrics"].push_back({{"lang", row.label},
                            {"bleu4", row.bleu4},
                            {"chrf", row.chrf},
                            {"rouge_l", row.rouge_l},
                            {"bleu_chrf", row.bleu_chrf}});
  }
  return j.dump(2) + "\n";
}

std::string report_to_text(const Report& r) {
  std::ostringstream out;
  char buf[160];
  out << "Training size after selection\n";
  std::snprintf(buf, sizeof buf, "%-8s %10s %10s %10s\n", "lang", "original", "retained",
                "reduction");
  out << buf;
  for (const auto& row : r.retention) {
    std::snprintf(buf, sizeof buf, "%-8s %10zu %10zu %9.1f%%\n", row.label.c_str(), row.original,
                  row.retained, row.reduction_pct);
    out << buf;
  }
  if (!r.metrics.empty()) {
    out << "\nEvaluation\n";
    std::snprintf(buf, sizeof buf, "%-8s %8s %8s %8s %10s\n", "lang", "BLEU-4", "chrF",
                  "ROUGE-L", "BLEU-chrF");
    out << buf;
    for (const auto& row : r.metrics) {
      std::snprintf(buf, sizeof buf, "%-8s %8.2f %8.2f %8.2f %10.2f\n", row.label.c_str(),
                    row.bleu4, row.chrf, row.rouge_l, row.bleu_chrf);
      out << buf;
    }
  }
  return out.str();
}

Report run_pipeline(const PipelineConfig& cfg, const fs::path& out_dir) {
  cfg.validate();
  const StageContext ctx{config_hash(cfg), cfg.seed};
  fs::create_directories(out_dir);
  io::write_file_atomic(out_dir / "config.json", config_to_json(cfg) + "\n");

  for (const auto& job : cfg.languages) {
    const fs::path dir = out_dir / std::string(to_code(job.lang));
    const auto aligned = stage_align(job.source_tsv, job.target_tsv, job.domains_tsv, job.lang,
                                     cfg.ingest, dir / "corpus.jsonl", ctx);
    const auto& corpus = aligned.corpus;
    stage_features(corpus, cfg.epds, dir / "features.jsonl", ctx);
    const auto scorer = make_scorer(cfg, corpus);
    const auto outcome = stage_score(corpus, cfg.epds, *scorer, dir / "scored.jsonl", ctx);
    const auto selected =
        stage_select(outcome, job.lang, SelectOptions{job.k, std::nullopt, cfg.epds.strict},
                     dir / "clean.jsonl", dir / "select.audit.jsonl", ctx);
    const auto spec = job.split.value_or(cfg.split);
    const auto splits = stage_split(selected.clean, spec, dir / "split", ctx);
    stage_ltp(Corpus(job.lang, splits.train), cfg.epds.prompt, dir / "sft_train.jsonl", ctx);
    if (job.hypotheses && job.references) {
      stage_eval(*job.hypotheses, *job.references, cfg.metrics, job.lang, dir / "metrics.json",
                 ctx);
    }
  }
  if (cfg.sar_input) stage_sar(*cfg.sar_input, cfg.sar, out_dir / "rewards.jsonl", ctx);

  const auto report = report_run_dir(out_dir);
  io::write_file_atomic(out_dir / "report.json", report_to_json(report));
  io::write_file_atomic(out_dir / "report.txt", report_to_text(report));
  return report;
}

}  // namespace merit
