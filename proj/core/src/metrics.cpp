#include "merit/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_map>

#include "merit/error.hpp"
#include "merit/unicode.hpp"

namespace merit::metrics {

namespace {

using NgramCounts = std::unordered_map<std::string, std::size_t>;

NgramCounts word_ngrams(const std::vector<std::string>& tokens, std::size_t n) {
  NgramCounts counts;
  if (tokens.size() < n) return counts;
  for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
    std::string key = tokens[i];
    for (std::size_t j = 1; j < n; ++j) {
      key.push_back('\x1f');
      key += tokens[i + j];
    }
    ++counts[key];
  }
  return counts;
}

std::unordered_map<std::u32string, std::size_t> char_ngrams(const std::u32string& s,
                                                            std::size_t n) {
  std::unordered_map<std::u32string, std::size_t> counts;
  if (s.size() < n) return counts;
  for (std::size_t i = 0; i + n <= s.size(); ++i) ++counts[s.substr(i, n)];
  return counts;
}

std::u32string strip_spaces(std::string_view text) {
  auto cps = unicode::decode(text);
  std::erase_if(cps, unicode::is_space);
  return cps;
}

void check_score(double v) {
  if (!(v >= 0.0 && v <= 100.0)) {
    throw Error(ErrorCode::OutOfRange, "metric score " + std::to_string(v) +
                                           " outside [0,100]");
  }
}

}  // namespace

TokenSequence tokenize_target(std::string_view text, Granularity granularity) {
  TokenSequence seq{{}, granularity};
  if (granularity == Granularity::Word) {
    seq.tokens = unicode::tokenize(text);
  } else {
    for (char32_t cp : unicode::decode(text)) {
      if (!unicode::is_space(cp)) seq.tokens.push_back(unicode::encode(cp));
    }
  }
  return seq;
}

BleuStats& BleuStats::operator+=(const BleuStats& o) {
  for (std::size_t i = 0; i < 4; ++i) {
    matches[i] += o.matches[i];
    totals[i] += o.totals[i];
  }
  hyp_len += o.hyp_len;
  ref_len += o.ref_len;
  return *this;
}

BleuStats bleu_stats(const TokenSequence& hyp, const TokenSequence& ref) {
  BleuStats s;
  s.hyp_len = hyp.size();
  s.ref_len = ref.size();
  for (std::size_t n = 1; n <= 4; ++n) {
    const auto h = word_ngrams(hyp.tokens, n);
    const auto r = word_ngrams(ref.tokens, n);
    for (const auto& [gram, count] : h) {
      s.totals[n - 1] += count;
      if (auto it = r.find(gram); it != r.end()) {
        s.matches[n - 1] += std::min(count, it->second);
      }
    }
  }
  return s;
}

double bleu_from_stats(const BleuStats& stats, BleuSmoothing smoothing) {
  if (stats.hyp_len == 0) return 0.0;
  double log_sum = 0.0;
  std::size_t orders = 0;
  for (std::size_t i = 0; i < 4; ++i) {
    if (stats.totals[i] == 0) continue;
    double m = static_cast<double>(stats.matches[i]);
    double t = static_cast<double>(stats.totals[i]);
    if (stats.matches[i] == 0) {
      if (smoothing == BleuSmoothing::None || i == 0) return 0.0;
      m += 1.0;
      t += 1.0;
    }
    log_sum += std::log(m / t);
    ++orders;
  }
  const double h = static_cast<double>(stats.hyp_len);
  const double r = static_cast<double>(stats.ref_len);
  const double log_bp = h < r ? 1.0 - r / h : 0.0;
  return 100.0 * std::exp(log_bp + log_sum / static_cast<double>(orders));
}

double bleu4(const TokenSequence& hyp, const TokenSequence& ref, BleuSmoothing smoothing) {
  if (hyp.empty() || ref.empty()) throw Error(ErrorCode::EmptyInput, "BLEU of an empty sequence");
  return bleu_from_stats(bleu_stats(hyp, ref), smoothing);
}

ChrfStats& ChrfStats::operator+=(const ChrfStats& o) {
  if (o.matches.size() != matches.size()) {
    throw Error(ErrorCode::LengthMismatch, "chrF statistics of different orders");
  }
  for (std::size_t i = 0; i < matches.size(); ++i) {
    matches[i] += o.matches[i];
    hyp_totals[i] += o.hyp_totals[i];
    ref_totals[i] += o.ref_totals[i];
  }
  return *this;
}

ChrfStats chrf_stats(std::string_view hyp, std::string_view ref, std::size_t max_order) {
  ChrfStats s(max_order);
  const auto h = strip_spaces(hyp);
  const auto r = strip_spaces(ref);
  for (std::size_t n = 1; n <= max_order; ++n) {
    const auto hn = char_ngrams(h, n);
    const auto rn = char_ngrams(r, n);
    s.hyp_totals[n - 1] = h.size() >= n ? h.size() - n + 1 : 0;
    s.ref_totals[n - 1] = r.size() >= n ? r.size() - n + 1 : 0;
    for (const auto& [gram, count] : hn) {
      if (auto it = rn.find(gram); it != rn.end()) {
        s.matches[n - 1] += std::min(count, it->second);
      }
    }
  }
  return s;
}

double chrf_from_stats(const ChrfStats& stats, double beta) {
  const double b2 = beta * beta;
  double sum = 0.0;
  std::size_t orders = 0;
  for (std::size_t i = 0; i < stats.matches.size(); ++i) {
    if (stats.hyp_totals[i] == 0 || stats.ref_totals[i] == 0) continue;
    ++orders;
    const double m = static_cast<double>(stats.matches[i]);
    const double p = m / static_cast<double>(stats.hyp_totals[i]);
    const double r = m / static_cast<double>(stats.ref_totals[i]);
    if (p + r > 0.0) sum += (1.0 + b2) * p * r / (b2 * p + r);
  }
  return orders == 0 ? 0.0 : 100.0 * sum / static_cast<double>(orders);
}

double chrf(std::string_view hyp, std::string_view ref, std::size_t max_order, double beta) {
  if (hyp.empty() || ref.empty()) throw Error(ErrorCode::EmptyInput, "chrF of an empty string");
  return chrf_from_stats(chrf_stats(hyp, ref, max_order), beta);
}

std::size_t lcs_length(std::span<const std::string> a, std::span<const std::string> b) {
  std::vector<std::size_t> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

double rouge_l(const TokenSequence& hyp, const TokenSequence& ref, double beta) {
  if (hyp.empty() || ref.empty()) throw Error(ErrorCode::EmptyInput, "ROUGE-L of an empty sequence");
  const auto lcs = static_cast<double>(lcs_length(hyp.tokens, ref.tokens));
  if (lcs == 0.0) return 0.0;
  const double p = lcs / static_cast<double>(hyp.size());
  const double r = lcs / static_cast<double>(ref.size());
  const double b2 = beta * beta;
  return 100.0 * (1.0 + b2) * p * r / (r + b2 * p);
}

double bleu_chrf(double bleu4, double chrf) {
  check_score(bleu4);
  check_score(chrf);
  return (bleu4 + chrf) / 2.0;
}

Combination parse_combination(std::string_view name) {
  if (name == "equal") return Combination::Equal;
  if (name == "geometric") return Combination::Geometric;
  if (name == "w46") return Combination::W46;
  if (name == "w64") return Combination::W64;
  throw Error(ErrorCode::InvalidConfig, "unknown combination '" + std::string(name) + "'");
}

std::string_view to_string(Combination c) noexcept {
  switch (c) {
    case Combination::Equal: return "equal";
    case Combination::Geometric: return "geometric";
    case Combination::W46: return "w46";
    case Combination::W64: return "w64";
  }
  return "";
}

double combine(double bleu4, double chrf, Combination method) {
  check_score(bleu4);
  check_score(chrf);
  switch (method) {
    case Combination::Equal: return bleu_chrf(bleu4, chrf);
    case Combination::Geometric: return std::sqrt(bleu4 * chrf);
    case Combination::W46: return 0.4 * bleu4 + 0.6 * chrf;
    case Combination::W64: return 0.6 * bleu4 + 0.4 * chrf;
  }
  return 0.0;
}

std::vector<double> average_ranks(std::span<const double> xs) {
  std::vector<std::size_t> idx(xs.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](auto a, auto b) { return xs[a] < xs[b]; });
  std::vector<double> ranks(xs.size());
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j + 1 < idx.size() && xs[idx[j + 1]] == xs[idx[i]]) ++j;
    const double mid = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[idx[k]] = mid;
    i = j + 1;
  }
  return ranks;
}

double spearman(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) throw Error(ErrorCode::LengthMismatch, "spearman inputs differ in length");
  if (xs.size() < 2) throw Error(ErrorCode::DegenerateInput, "spearman needs at least 2 points");
  const auto rx = average_ranks(xs);
  const auto ry = average_ranks(ys);
  const double n = static_cast<double>(rx.size());
  const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
  const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) {
    throw Error(ErrorCode::DegenerateInput, "spearman input has zero rank variance");
  }
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

MetricReport evaluate_corpus(std::span<const std::string> hyps,
                             std::span<const std::string> refs,
                             const MetricOptions& options) {
  if (hyps.size() != refs.size()) {
    throw Error(ErrorCode::LengthMismatch, std::to_string(hyps.size()) + " hypotheses vs " +
                                               std::to_string(refs.size()) + " references");
  }
  if (hyps.empty()) throw Error(ErrorCode::EmptyInput, "no segments to evaluate");
  BleuStats bleu;
  ChrfStats chr(options.chrf_order);
  double rouge_sum = 0.0;
  for (std::size_t i = 0; i < hyps.size(); ++i) {
    const auto h = tokenize_target(hyps[i], options.granularity);
    const auto r = tokenize_target(refs[i], options.granularity);
    bleu += bleu_stats(h, r);
    chr += chrf_stats(hyps[i], refs[i], options.chrf_order);
    if (!h.empty() && !r.empty()) rouge_sum += rouge_l(h, r, options.rouge_beta);
  }
  MetricReport rep;
  rep.bleu4 = bleu_from_stats(bleu, options.smoothing);
  rep.chrf = chrf_from_stats(chr, options.chrf_beta);
  rep.rouge_l = rouge_sum / static_cast<double>(hyps.size());
  rep.bleu_chrf = bleu_chrf(rep.bleu4, rep.chrf);
  rep.corpus_level = true;
  rep.segments = hyps.size();
  return rep;
}

MetricReport evaluate_sentence(std::string_view hyp, std::string_view ref,
                               const MetricOptions& options) {
  const auto h = tokenize_target(hyp, options.granularity);
  const auto r = tokenize_target(ref, options.granularity);
  MetricReport rep;
  rep.bleu4 = bleu4(h, r, options.smoothing);
  rep.chrf = chrf(hyp, ref, options.chrf_order, options.chrf_beta);
  rep.rouge_l = rouge_l(h, r, options.rouge_beta);
  rep.bleu_chrf = bleu_chrf(rep.bleu4, rep.chrf);
  rep.corpus_level = false;
  rep.segments = 1;
  return rep;
}

}  // namespace merit::metrics
