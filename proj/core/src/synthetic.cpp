#include "merit/synthetic.hpp"

#include <algorithm>
#include <array>

#include "merit/hash.hpp"
#include "merit/unicode.hpp"

namespace merit::synthetic {

std::uint64_t Rng::next() noexcept {
  const std::uint64_t x = state_;
  state_ += 0x9e3779b97f4a7c15ULL;
  return splitmix64(x);
}

std::uint64_t Rng::below(std::uint64_t n) noexcept {
  if (n <= 1) return 0;
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
  std::uint64_t x;
  do {
    x = next();
  } while (x >= limit);
  return x % n;
}

double Rng::unit() noexcept {
  return static_cast<double>(next() >> 11) * 0x1.0p-53;
}

namespace {

constexpr std::array<std::string_view, 24> kSyllables = {
    "ba", "ti", "ng", "ka", "lo", "ma", "se", "ru", "da", "pi", "ho", "ne",
    "va", "ch", "um", "ri", "sa", "to", "le", "mi", "an", "gu", "ya", "po"};

// Each source syllable maps to one Han character, so targets are a
// deterministic function of sources.
constexpr std::array<std::u32string_view, 24> kHan = {
    U"的", U"国", U"人", U"年", U"大", U"在", U"中", U"政", U"府", U"新", U"闻", U"旅",
    U"游", U"健", U"康", U"经", U"济", U"发", U"展", U"城", U"市", U"学", U"生", U"会"};

constexpr std::array<std::u32string_view, 3> kHanPunct = {U"，", U"。", U"、"};

struct Sentence {
  std::string source;
  std::string target;
};

Sentence make_sentence(Rng& rng) {
  const std::size_t words = 3 + rng.below(10);
  Sentence s;
  std::u32string zh;
  for (std::size_t w = 0; w < words; ++w) {
    if (w) s.source.push_back(' ');
    const std::size_t sylls = 1 + rng.below(3);
    for (std::size_t k = 0; k < sylls; ++k) {
      const auto idx = rng.below(kSyllables.size());
      s.source += kSyllables[idx];
      zh += kHan[idx];
    }
    if (rng.below(12) == 0) {
      const auto num = std::to_string(1 + rng.below(2024));
      s.source += " " + num;
      zh += unicode::decode(num);
    }
    if (w + 1 < words && rng.below(6) == 0) {
      s.source.push_back(',');
      zh += kHanPunct[0];
    }
  }
  s.source.push_back('.');
  zh += kHanPunct[1];
  s.target = unicode::encode(zh);
  return s;
}

/// Deliberately bad variants of a good pair.
Sentence corrupt(Sentence s, Rng& rng) {
  switch (rng.below(4)) {
    case 0: {  // truncated target
      auto zh = unicode::decode(s.target);
      zh.resize(std::max<std::size_t>(1, zh.size() / 5));
      s.target = unicode::encode(zh);
      break;
    }
    case 1:  // misaligned target from another sentence
      s.target = make_sentence(rng).target;
      break;
    case 2:  // numeric junk in the source
      s.source += " 1234567890 0987654321 55555";
      break;
    default:  // empty target
      s.target.clear();
      break;
  }
  return s;
}

}  // namespace

std::vector<SentencePair> make_pairs(const Options& opts) {
  Rng rng(opts.seed);
  std::vector<SentencePair> pairs;
  pairs.reserve(opts.pairs);
  for (std::size_t i = 0; i < opts.pairs; ++i) {
    Sentence s = make_sentence(rng);
    if (rng.unit() < opts.noise_rate) s = corrupt(std::move(s), rng);
    const auto& domain = opts.domains.empty()
                             ? std::string()
                             : opts.domains[rng.below(opts.domains.size())];
    pairs.push_back({"SNT." + std::to_string(opts.seed) + "." + std::to_string(i),
                     opts.lang, std::move(s.source), std::move(s.target), domain});
  }
  return pairs;
}

AltFiles make_alt_files(const Options& opts) {
  AltFiles files;
  for (const auto& p : make_pairs(opts)) {
    files.source.push_back({p.id, p.source_text});
    files.target.push_back({p.id, p.target_text});
    files.domains.push_back({p.id, p.domain});
  }
  // One orphan on each side, as in real ALT exports.
  files.source.push_back({"SNT.orphan.src", "ba ti ng."});
  files.target.push_back({"SNT.orphan.zh", "的国人。"});
  return files;
}

std::vector<EvalRecord> make_eval_records(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<EvalRecord> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const int expert = static_cast<int>(rng.below(101));
    std::string log;
    switch (rng.below(5)) {
      case 0:
        log = "Fluent and adequate. Score: " + std::to_string(expert);
        break;
      case 1: {
        const int near = std::max(0, expert - static_cast<int>(rng.below(11)));
        log = "Minor terminology issues. Score: " + std::to_string(near);
        break;
      }
      case 2: {
        const int first = static_cast<int>(rng.below(101));
        log = "Initial Score: " + std::to_string(first) + ". After review, score = " +
              std::to_string(expert);
        break;
      }
      case 3:
        log = "The translation drops the second clause; meaning is partly lost.";
        break;
      default:
        log = "Score: " + std::to_string(static_cast<int>(rng.below(101)));
        break;
    }
    out.push_back({"EVAL." + std::to_string(i), std::move(log), expert,
                   "G" + std::to_string(i / 4)});
  }
  return out;
}

std::string perturb(const std::string& reference, std::uint64_t seed) {
  Rng rng(seed);
  auto cps = unicode::decode(reference);
  std::u32string out;
  for (std::size_t i = 0; i < cps.size(); ++i) {
    const auto roll = rng.below(10);
    if (roll == 0) continue;  // deletion
    if (roll == 1 && i + 1 < cps.size()) {
      out.push_back(cps[i + 1]);
      out.push_back(cps[i]);
      ++i;
      continue;
    }
    out.push_back(cps[i]);
  }
  if (out.empty()) out = cps;
  return unicode::encode(out);
}

}  // namespace merit::synthetic
