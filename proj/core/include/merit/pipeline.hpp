#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "merit/corpus.hpp"
#include "merit/div_splitter.hpp"
#include "merit/epds.hpp"
#include "merit/lm_scoring.hpp"
#include "merit/metrics.hpp"
#include "merit/sar.hpp"
#include "merit/synthetic.hpp"

namespace merit {

/// Input files and selection size for one source language.
struct LanguageJob {
  LanguageTag lang = LanguageTag::vi;
  std::filesystem::path source_tsv;
  std::filesystem::path target_tsv;
  std::optional<std::filesystem::path> domains_tsv;
  std::size_t k = 0;
  std::optional<SplitSpec> split;  // overrides PipelineConfig::split
  std::optional<std::filesystem::path> hypotheses;  // line-aligned with references
  std::optional<std::filesystem::path> references;
};

struct PipelineConfig {
  std::vector<LanguageJob> languages;
  IngestOptions ingest;
  EpdsConfig epds;
  std::size_t fallback_order = 4;
  double fallback_smoothing = 0.1;
  SplitSpec split;
  SarConfig sar;
  std::optional<std::filesystem::path> sar_input;
  metrics::MetricOptions metrics;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Loads the declarative JSON config. Relative paths resolve against the
/// config file's directory. Throws Io or InvalidConfig.
PipelineConfig load_pipeline_config(const std::filesystem::path& path);

/// Canonical JSON rendering of the effective configuration.
std::string config_to_json(const PipelineConfig& cfg);

/// fnv1a64 of config_to_json, in hex.
std::string config_hash(const PipelineConfig& cfg);

/// The remote scorer when an endpoint is configured (or MERIT_SCORER_URL is
/// set), otherwise the character n-gram fallback trained on `corpus`.
std::unique_ptr<LogprobScorer> make_scorer(const PipelineConfig& cfg, const Corpus& corpus);

/// Texts the fallback model is trained on: instruction+source+target and the
/// bare target of every pair.
std::vector<std::string> fallback_training_texts(const Corpus& corpus,
                                                 const PromptTemplate& prompt);

// ---------------------------------------------------------------------------
// Stages. Each writes its artifacts atomically, manifest line first.

struct StageContext {
  std::string config_hash = "none";
  std::uint64_t seed = 0;
};

AlignResult stage_align(const std::filesystem::path& source_tsv,
                        const std::filesystem::path& target_tsv,
                        const std::optional<std::filesystem::path>& domains_tsv,
                        LanguageTag lang, const IngestOptions& options,
                        const std::filesystem::path& out, const StageContext& ctx);

void write_corpus(const std::filesystem::path& out, const Corpus& corpus,
                  std::string_view kind, const StageContext& ctx);

void stage_features(const Corpus& corpus, const EpdsConfig& cfg,
                    const std::filesystem::path& out, const StageContext& ctx);

ScoringOutcome stage_score(const Corpus& corpus, const EpdsConfig& cfg,
                           const LogprobScorer& scorer, const std::filesystem::path& out,
                           const StageContext& ctx);

/// Reads a scored file written by stage_score (dropped pairs included).
ScoringOutcome read_scoring_outcome(const std::filesystem::path& path, LanguageTag* lang);

struct SelectOptions {
  std::optional<std::size_t> k;
  std::optional<double> threshold;  // keep s_final >= threshold instead of top-k
  bool strict = false;
};

EpdsResult stage_select(const ScoringOutcome& outcome, LanguageTag lang,
                        const SelectOptions& options, const std::filesystem::path& out,
                        const std::optional<std::filesystem::path>& audit_out,
                        const StageContext& ctx);

/// Writes train/dev/test JSONL, quota_report.json and manifest.json.
SplitResult stage_split(const Corpus& corpus, const SplitSpec& spec,
                        const std::filesystem::path& out_dir, const StageContext& ctx);

struct RewardRecord {
  std::string id;
  int extracted = kNoScore;
  int expert = 0;
  double reward = 0.0;
  std::optional<double> advantage;
  std::string group_id;
};

/// Input JSONL {id, eval_log, expert_score[, group_id]}. Advantages are
/// computed per group_id for groups of two or more.
std::vector<RewardRecord> stage_sar(const std::filesystem::path& in, const SarConfig& cfg,
                                    const std::filesystem::path& out,
                                    const StageContext& ctx);

void write_eval_records(const std::filesystem::path& out,
                        const std::vector<synthetic::EvalRecord>& records);

void stage_ltp(const Corpus& corpus, const PromptTemplate& prompt,
               const std::filesystem::path& out, const StageContext& ctx);

metrics::MetricReport stage_eval(const std::filesystem::path& hyps,
                                 const std::filesystem::path& refs,
                                 const metrics::MetricOptions& options,
                                 std::optional<LanguageTag> lang,
                                 const std::filesystem::path& out, const StageContext& ctx);

// ---------------------------------------------------------------------------
// Reporting

struct RetentionRow {
  std::string label;  // language code or "total"
  std::size_t original = 0;
  std::size_t retained = 0;
  double reduction_pct = 0.0;
};

struct MetricRow {
  std::string label;
  double bleu4 = 0.0;
  double chrf = 0.0;
  double rouge_l = 0.0;
  double bleu_chrf = 0.0;
};

struct Report {
  std::vector<RetentionRow> retention;  // per language, then total
  std::vector<MetricRow> metrics;
};

/// 100 * (1 - retained / original).
double reduction_percent(std::size_t original, std::size_t retained);

/// Builds the report from select audits and metric files. Throws
/// MissingArtifact when there are no audits.
Report build_report(const std::vector<std::filesystem::path>& audits,
                    const std::vector<std::filesystem::path>& metric_files);

/// Finds "<lang>/select.audit.jsonl" and "<lang>/metrics.json" under a run
/// directory and builds the report.
Report report_run_dir(const std::filesystem::path& run_dir);

std::string report_to_json(const Report& r);
std::string report_to_text(const Report& r);

/// Runs every stage for every language under out_dir and writes the report.
Report run_pipeline(const PipelineConfig& cfg, const std::filesystem::path& out_dir);

}  // namespace merit
