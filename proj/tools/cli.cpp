#include "cli.hpp"

#include <algorithm>
#include <filesystem>
#include <iomanip>
#include <optional>
#include <ostream>

#include "CLI11.hpp"
#include "json.hpp"
#include "merit/error.hpp"
#include "merit/hash.hpp"
#include "merit/jsonl.hpp"
#include "merit/pipeline.hpp"
#include "merit/synthetic.hpp"

namespace merit::cli {

namespace fs = std::filesystem;

namespace {

struct Options {
  std::string config_path;

  // shared io
  std::string in, out, out_dir, audit;

  // align
  std::string src, zh, domains, lang;
  bool nfc = false;

  // score
  std::string endpoint;
  std::optional<double> sigma, tau;

  // select
  std::optional<std::size_t> k;
  std::optional<double> threshold;
  bool strict = false;

  // split
  std::optional<std::size_t> n_train, n_dev, n_test;
  std::optional<std::uint64_t> seed;

  // sar
  bool permissive = false;
  std::string pattern;
  std::optional<int> tolerance;

  // ltp
  std::string template_path, naming = "iso";

  // eval
  std::string hyp, ref, metric = "all", smoothing, granularity;
  bool sentence = false;

  // report
  std::string run_dir, text_out;
  std::vector<std::string> audits, metric_files;

  // synth
  std::size_t pairs_per_language = 200;
};

PipelineConfig base_config(const Options& o) {
  return o.config_path.empty() ? PipelineConfig{} : load_pipeline_config(o.config_path);
}

StageContext context(const PipelineConfig& cfg) {
  return StageContext{config_hash(cfg), cfg.seed};
}

void apply_metric_flags(const Options& o, metrics::MetricOptions& m) {
  if (o.smoothing == "none") m.smoothing = metrics::BleuSmoothing::None;
  if (o.smoothing == "add-one") m.smoothing = metrics::BleuSmoothing::AddOne;
  if (o.granularity == "char") m.granularity = metrics::Granularity::Character;
  if (o.granularity == "word") m.granularity = metrics::Granularity::Word;
}

int cmd_ingest(const Options& o, std::ostream& out) {
  const auto records = read_alt_file(o.in);
  std::string content;
  for (const auto& r : records) content += io::to_json_line(r) + "\n";
  io::write_file_atomic(o.out, content);
  out << records.size() << " records\n";
  return 0;
}

int cmd_align(const Options& o, std::ostream& out) {
  auto cfg = base_config(o);
  cfg.ingest.nfc = cfg.ingest.nfc || o.nfc;
  std::optional<fs::path> domains;
  if (!o.domains.empty()) domains = o.domains;
  const auto res = stage_align(o.src, o.zh, domains, parse_language(o.lang), cfg.ingest, o.out,
                               context(cfg));
  out << res.corpus.size() << " pairs aligned, " << res.dropped_source_only
      << " source-only and " << res.dropped_target_only << " zh-only ids dropped\n";
  return 0;
}

int cmd_features(const Options& o, std::ostream& out) {
  const auto cfg = base_config(o);
  const auto corpus = io::read_corpus(o.in);
  stage_features(corpus, cfg.epds, o.out, context(cfg));
  out << "features written for " << corpus.size() << " pairs\n";
  return 0;
}

int cmd_score(const Options& o, std::ostream& out) {
  auto cfg = base_config(o);
  if (!o.endpoint.empty()) cfg.epds.scorer.endpoint = o.endpoint;
  if (o.sigma) cfg.epds.scorer.sigma = *o.sigma;
  if (o.tau) cfg.epds.scorer.tau = *o.tau;
  cfg.validate();
  const auto corpus = io::read_corpus(o.in);
  const auto scorer = make_scorer(cfg, corpus);
  const auto outcome = stage_score(corpus, cfg.epds, *scorer, o.out, context(cfg));
  out << outcome.scored.size() << " scored, " << outcome.dropped.size() << " dropped\n";
  return 0;
}

int cmd_select(const Options& o, std::ostream& out) {
  const auto cfg = base_config(o);
  LanguageTag lang{};
  const auto outcome = read_scoring_outcome(o.in, &lang);
  std::optional<fs::path> audit;
  if (!o.audit.empty()) audit = o.audit;
  const auto res = stage_select(outcome, lang, SelectOptions{o.k, o.threshold,
                                                             o.strict || cfg.epds.strict},
                                o.out, audit, context(cfg));
  out << res.clean.size() << " of " << outcome.scored.size() + outcome.dropped.size()
      << " pairs selected\n";
  return 0;
}

int cmd_split(const Options& o, std::ostream& out) {
  auto cfg = base_config(o);
  if (o.seed) cfg.seed = *o.seed;
  SplitSpec spec = cfg.split;
  spec.seed = cfg.seed;
  if (o.n_train) spec.n_train = *o.n_train;
  if (o.n_dev) spec.n_dev = *o.n_dev;
  if (o.n_test) spec.n_test = *o.n_test;
  const auto corpus = io::read_corpus(o.in);
  const auto res = stage_split(corpus, spec, o.out_dir, context(cfg));
  out << "train " << res.train.size() << ", dev " << res.dev.size() << ", test "
      << res.test.size() << "\n";
  return 0;
}

int cmd_sar(const Options& o, std::ostream& out) {
  auto cfg = base_config(o);
  if (o.permissive) cfg.sar.mode = ExtractionMode::Permissive;
  if (!o.pattern.empty()) cfg.sar.pattern = o.pattern;
  if (o.tolerance) cfg.sar.tolerance = *o.tolerance;
  const auto records = stage_sar(o.in, cfg.sar, o.out, context(cfg));
  double total = 0.0;
  for (const auto& r : records) total += r.reward;
  out << records.size() << " rewards, mean "
      << (records.empty() ? 0.0 : total / static_cast<double>(records.size())) << "\n";
  return 0;
}

int cmd_ltp(const Options& o, std::ostream& out) {
  auto cfg = base_config(o);
  const auto naming = o.naming == "english" ? LanguageNaming::EnglishName : LanguageNaming::IsoCode;
  if (!o.template_path.empty()) {
    cfg.epds.prompt = PromptTemplate::load(o.template_path, naming);
  } else if (naming != cfg.epds.prompt.naming()) {
    cfg.epds.prompt = PromptTemplate(cfg.epds.prompt.text(), naming);
  }
  const auto corpus = io::read_corpus(o.in);
  stage_ltp(corpus, cfg.epds.prompt, o.out, context(cfg));
  out << "LTP records written for " << corpus.size() << " pairs\n";
  return 0;
}

int cmd_eval(const Options& o, std::ostream& out) {
  auto cfg = base_config(o);
  apply_metric_flags(o, cfg.metrics);
  std::optional<LanguageTag> lang;
  if (!o.lang.empty()) lang = parse_language(o.lang);

  nlohmann::ordered_json j;
  if (o.sentence) {
    const auto hyps = io::read_text_lines(o.hyp);
    const auto refs = io::read_text_lines(o.ref);
    if (hyps.size() != refs.size()) {
      throw Error(ErrorCode::LengthMismatch, "hypothesis and reference line counts differ");
    }
    j = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < hyps.size(); ++i) {
      const auto r = metrics::evaluate_sentence(hyps[i], refs[i], cfg.metrics);
      j.push_back({{"segment", i}, {"bleu4", r.bleu4}, {"chrf", r.chrf},
                   {"rouge_l", r.rouge_l}, {"bleu_chrf", r.bleu_chrf}});
    }
    if (!o.out.empty()) io::write_file_atomic(o.out, j.dump(2) + "\n");
    else out << j.dump(2) << "\n";
    return 0;
  }

  const fs::path target = o.out.empty() ? fs::path() : fs::path(o.out);
  metrics::MetricReport rep;
  if (!target.empty()) {
    rep = stage_eval(o.hyp, o.ref, cfg.metrics, lang, target, context(cfg));
  } else {
    rep = metrics::evaluate_corpus(io::read_text_lines(o.hyp), io::read_text_lines(o.ref),
                                   cfg.metrics);
  }
  const bool all = o.metric == "all";
  if (all || o.metric == "bleu") j["bleu4"] = rep.bleu4;
  if (all || o.metric == "chrf") j["chrf"] = rep.chrf;
  if (all || o.metric == "rouge") j["rouge_l"] = rep.rouge_l;
  if (all || o.metric == "bleu-chrf") j["bleu_chrf"] = rep.bleu_chrf;
  out << j.dump(2) << "\n";
  return 0;
}

int cmd_report(const Options& o, std::ostream& out) {
  Report rep;
  if (!o.run_dir.empty()) {
    rep = report_run_dir(o.run_dir);
  } else {
    std::vector<fs::path> audits(o.audits.begin(), o.audits.end());
    std::vector<fs::path> metric_files(o.metric_files.begin(), o.metric_files.end());
    rep = build_report(audits, metric_files);
  }
  if (!o.out.empty()) io::write_file_atomic(o.out, report_to_json(rep));
  const auto text = report_to_text(rep);
  if (!o.text_out.empty()) io::write_file_atomic(o.text_out, text);
  out << text;
  return 0;
}

int cmd_pipeline(const Options& o, std::ostream& out) {
  auto cfg = load_pipeline_config(o.config_path);
  if (o.seed) {
    cfg.seed = *o.seed;
    cfg.split.seed = *o.seed;
    for (auto& job : cfg.languages) {
      if (job.split) job.split->seed = *o.seed;
    }
  }
  const auto rep = run_pipeline(cfg, o.out_dir);
  out << report_to_text(rep);
  return 0;
}

int cmd_synth(const Options& o, std::ostream& out) {
  const fs::path dir = o.out_dir;
  const std::uint64_t seed = o.seed.value_or(7);
  nlohmann::ordered_json cfg;
  cfg["seed"] = seed;
  cfg["languages"] = nlohmann::ordered_json::array();
  std::uint64_t lang_seed = seed;
  for (auto lang : kSourceLanguages) {
    const std::string code(to_code(lang));
    synthetic::Options so;
    so.pairs = o.pairs_per_language;
    so.lang = lang;
    so.seed = ++lang_seed;
    const auto files = synthetic::make_alt_files(so);
    auto dump = [&](const std::vector<AltRecord>& recs, const std::string& name) {
      std::string content;
      for (const auto& r : recs) content += format_alt_line(r) + "\n";
      io::write_file_atomic(dir / name, content);
    };
    dump(files.source, code + ".tsv");
    dump(files.target, code + ".zh.tsv");
    dump(files.domains, code + ".domains.tsv");

    std::string hyps, refs;
    for (std::size_t i = 0; i < files.target.size() && i < 50; ++i) {
      if (files.target[i].text.empty()) continue;
      refs += files.target[i].text + "\n";
      hyps += synthetic::perturb(files.target[i].text, so.seed * 1000 + i) + "\n";
    }
    io::write_file_atomic(dir / (code + ".hyp.txt"), hyps);
    io::write_file_atomic(dir / (code + ".ref.txt"), refs);

    const std::size_t k = o.pairs_per_language * 3 / 5;
    nlohmann::ordered_json lj;
    lj["lang"] = code;
    lj["source"] = code + ".tsv";
    lj["target"] = code + ".zh.tsv";
    lj["domains"] = code + ".domains.tsv";
    lj["k"] = k;
    lj["split"] = {{"train", k * 8 / 10}, {"dev", k / 10}, {"test", k / 10}};
    lj["hypotheses"] = code + ".hyp.txt";
    lj["references"] = code + ".ref.txt";
    cfg["languages"].push_back(lj);
  }
  write_eval_records(dir / "evals.jsonl", synthetic::make_eval_records(200, seed));
  cfg["sar"] = {{"input", "evals.jsonl"}};
  io::write_file_atomic(dir / "pipeline.json", cfg.dump(2) + "\n");
  out << "synthetic corpus written to " << dir.string() << "\n";
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"merit: parallel-corpus curation and MT evaluation toolkit", "merit"};
  app.require_subcommand(1, 1);
  Options o;

  auto add_config = [&](CLI::App* sc) {
    sc->add_option("--config", o.config_path, "Pipeline config (JSON)")->check(CLI::ExistingFile);
  };

  auto* ingest = app.add_subcommand("ingest", "Validate an ALT TSV file and convert it to JSONL");
  ingest->add_option("--in", o.in, "id<TAB>text file")->required();
  ingest->add_option("--out", o.out, "Output JSONL")->required();

  auto* align = app.add_subcommand("align", "Join source and Chinese TSVs on shared ids");
  align->add_option("--src", o.src, "Source-language TSV")->required();
  align->add_option("--zh", o.zh, "Chinese TSV")->required();
  align->add_option("--lang", o.lang, "Source language code")->required();
  align->add_option("--domains", o.domains, "id<TAB>domain TSV");
  align->add_flag("--nfc", o.nfc, "Apply NFC normalization to both sides");
  align->add_option("--out", o.out, "Corpus JSONL")->required();
  add_config(align);

  auto* features = app.add_subcommand("features", "Dump statistical features and S_base");
  features->add_option("--in", o.in, "Corpus JSONL")->required();
  features->add_option("--out", o.out, "Feature JSONL")->required();
  add_config(features);

  auto* score = app.add_subcommand("score", "Filter and score pairs (S_base, S_PPL, S_IFD, S_final)");
  score->add_option("--in", o.in, "Corpus JSONL")->required();
  score->add_option("--out", o.out, "Scored JSONL")->required();
  score->add_option("--endpoint", o.endpoint, "Logprob service URL (else MERIT_SCORER_URL or fallback model)");
  score->add_option("--sigma", o.sigma, "S_PPL scaling factor");
  score->add_option("--tau", o.tau, "S_IFD normalization threshold");
  add_config(score);

  auto* select = app.add_subcommand("select", "Keep the top-k (or above-threshold) scored pairs");
  select->add_option("--in", o.in, "Scored JSONL")->required();
  select->add_option("--out", o.out, "Selected corpus JSONL")->required();
  auto* k_opt = select->add_option("--k", o.k, "Number of pairs to keep");
  auto* t_opt = select->add_option("--threshold", o.threshold, "Keep pairs with s_final >= threshold");
  select->add_option("--audit", o.audit, "Audit JSONL");
  select->add_flag("--strict", o.strict, "Fail when fewer than k pairs are valid");
  add_config(select);

  auto* split = app.add_subcommand("split", "Exact-size, domain-preserving train/dev/test split");
  split->add_option("--in", o.in, "Corpus JSONL")->required();
  split->add_option("--out-dir", o.out_dir, "Output directory")->required();
  split->add_option("--train", o.n_train, "Train size");
  split->add_option("--dev", o.n_dev, "Dev size");
  split->add_option("--test", o.n_test, "Test size");
  split->add_option("--seed", o.seed, "Sampling seed");
  add_config(split);

  auto* sar = app.add_subcommand("sar", "Semantic Alignment Reward for QE-agent logs");
  sar->add_option("--in", o.in, "JSONL {id, eval_log, expert_score[, group_id]}")->required();
  sar->add_option("--out", o.out, "Reward JSONL")->required();
  sar->add_flag("--permissive", o.permissive, "Accept any standalone integer");
  sar->add_option("--pattern", o.pattern, "Custom score regex (group 1 is the score)");
  sar->add_option("--tolerance", o.tolerance, "Partial-reward band");
  add_config(sar);

  auto* ltp = app.add_subcommand("ltp", "Build language-token-prefixed SFT records");
  ltp->add_option("--in", o.in, "Corpus JSONL")->required();
  ltp->add_option("--out", o.out, "SFT JSONL")->required();
  ltp->add_option("--template", o.template_path, "Prompt template file")->check(CLI::ExistingFile);
  ltp->add_option("--naming", o.naming, "Language name in prompt")
      ->check(CLI::IsMember({"iso", "english"}));
  add_config(ltp);

  auto* eval = app.add_subcommand("eval", "BLEU-4, chrF, ROUGE-L and BLEU-chrF");
  eval->add_option("--hyp", o.hyp, "Hypotheses, one per line")->required();
  eval->add_option("--ref", o.ref, "References, one per line")->required();
  eval->add_option("--metric", o.metric, "Metric to print")
      ->check(CLI::IsMember({"all", "bleu", "chrf", "rouge", "bleu-chrf"}));
  eval->add_option("--smoothing", o.smoothing, "BLEU smoothing")
      ->check(CLI::IsMember({"add-one", "none"}));
  eval->add_option("--granularity", o.granularity, "Tokenization")
      ->check(CLI::IsMember({"word", "char"}));
  eval->add_option("--lang", o.lang, "Language label for the report");
  eval->add_flag("--sentence", o.sentence, "Per-segment scores instead of corpus level");
  eval->add_option("--out", o.out, "MetricReport JSON");
  add_config(eval);

  auto* report = app.add_subcommand("report", "Retention and metric tables for a run");
  auto* rd = report->add_option("--run-dir", o.run_dir, "Pipeline output directory");
  report->add_option("--audit", o.audits, "Selection audit JSONL (repeatable)")->excludes(rd);
  report->add_option("--metrics", o.metric_files, "Metric JSON (repeatable)")->excludes(rd);
  report->add_option("--out", o.out, "Report JSON");
  report->add_option("--text", o.text_out, "Report text table");

  auto* pipeline = app.add_subcommand("pipeline", "Run every stage from a config file");
  pipeline->add_option("--config", o.config_path, "Pipeline config (JSON)")
      ->required()
      ->check(CLI::ExistingFile);
  pipeline->add_option("--out-dir", o.out_dir, "Run directory")->required();
  pipeline->add_option("--seed", o.seed, "Override the config seed");

  auto* synth = app.add_subcommand("synth", "Write a synthetic ALT-style corpus and config");
  synth->add_option("--out-dir", o.out_dir, "Output directory")->required();
  synth->add_option("--pairs", o.pairs_per_language, "Pairs per language");
  synth->add_option("--seed", o.seed, "Generator seed");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
    if (select->parsed() && k_opt->count() == 0 && t_opt->count() == 0) {
      throw CLI::ValidationError("select", "one of --k or --threshold is required");
    }
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return 2;
  }

  try {
    if (ingest->parsed()) return cmd_ingest(o, out);
    if (align->parsed()) return cmd_align(o, out);
    if (features->parsed()) return cmd_features(o, out);
    if (score->parsed()) return cmd_score(o, out);
    if (select->parsed()) return cmd_select(o, out);
    if (split->parsed()) return cmd_split(o, out);
    if (sar->parsed()) return cmd_sar(o, out);
    if (ltp->parsed()) return cmd_ltp(o, out);
    if (eval->parsed()) return cmd_eval(o, out);
    if (report->parsed()) return cmd_report(o, out);
    if (pipeline->parsed()) return cmd_pipeline(o, out);
    if (synth->parsed()) return cmd_synth(o, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  err << app.help();
  return 2;
}

}  // namespace merit::cli
