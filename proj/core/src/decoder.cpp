#include "lugasr/decoder.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>

#include "lugasr/text_util.hpp"
#include "lugasr/utf8.hpp"

namespace lugasr {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
const double kLn10 = std::log(10.0);

double log_add(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  double hi = std::max(a, b), lo = std::min(a, b);
  return hi + std::log1p(std::exp(lo - hi));
}

struct Hyp {
  double p_blank = kNegInf;     // prefix posterior, paths ending in blank
  double p_nonblank = kNegInf;  // paths ending in the last prefix symbol
  double lm_ln = 0.0;           // sum of ln P(w | ctx) over completed words
  int words = 0;
  double boost = 0.0;
  std::vector<std::string> history;  // <s> plus completed words

  double acoustic() const { return log_add(p_blank, p_nonblank); }
};

double hyp_score(const Hyp& h, const DecoderConfig& cfg, bool with_lm) {
  double s = h.acoustic() + h.boost;
  if (with_lm) s += cfg.lm_alpha * h.lm_ln + cfg.lm_beta * h.words;
  return s;
}

std::string trailing_word(const std::string& prefix) {
  size_t sp = prefix.rfind(' ');
  return sp == std::string::npos ? prefix : prefix.substr(sp + 1);
}

}  // namespace

std::string greedy_decode(const Eigen::MatrixXd& logprobs,
                          const Alphabet& alphabet) {
  const int blank = alphabet.blank_index();
  std::string out;
  int prev = blank;
  for (Eigen::Index t = 0; t < logprobs.rows(); ++t) {
    int best = 0;
    for (Eigen::Index k = 1; k < logprobs.cols(); ++k)
      if (logprobs(t, k) > logprobs(t, best)) best = static_cast<int>(k);
    if (best != blank && best != prev) utf8::append(out, alphabet.symbol(best));
    prev = best;
  }
  return out;
}

std::vector<ScoredTranscript> beam_decode(const Eigen::MatrixXd& logprobs,
                                          const Alphabet& alphabet,
                                          const NGramModel* lm,
                                          const DecoderConfig& cfg) {
  if (cfg.beam_width < 1) throw Error("beam_width must be >= 1");
  if (logprobs.cols() != alphabet.num_classes())
    throw Error("logprob columns do not match alphabet classes");
  const int blank = alphabet.blank_index();
  const bool with_lm = lm != nullptr;

  auto boost_of = [&](const std::string& word) {
    auto it = cfg.hotwords.find(word);
    return it == cfg.hotwords.end() ? 0.0 : it->second;
  };

  std::unordered_map<std::string, Hyp> beam;
  {
    Hyp root;
    root.p_blank = 0.0;
    root.history.push_back(kSentenceStart);
    beam.emplace("", std::move(root));
  }

  // aux fields are functions of the prefix text alone, so a merged prefix
  // inherits them from whichever parent created it first
  auto extended_aux = [&](const std::string& parent_prefix, const Hyp& parent,
                          char32_t symbol) {
    Hyp ext;
    ext.lm_ln = parent.lm_ln;
    ext.words = parent.words;
    ext.boost = parent.boost;
    ext.history = parent.history;
    if (symbol == U' ') {
      std::string w = trailing_word(parent_prefix);
      if (!w.empty()) {
        if (with_lm) ext.lm_ln += kLn10 * lm->logprob(w, parent.history);
        ext.words += 1;
        ext.boost += boost_of(w);
        ext.history.push_back(w);
      }
    }
    return ext;
  };

  for (Eigen::Index t = 0; t < logprobs.rows(); ++t) {
    std::unordered_map<std::string, Hyp> next;
    next.reserve(beam.size() * 2);
    auto slot = [&](const std::string& prefix, auto&& make_aux) -> Hyp& {
      auto it = next.find(prefix);
      if (it == next.end()) it = next.emplace(prefix, make_aux()).first;
      return it->second;
    };

    for (const auto& [prefix, hyp] : beam) {
      const double p_total = hyp.acoustic();
      std::string last;
      if (!prefix.empty()) {
        auto cps = utf8::decode(prefix);
        utf8::append(last, cps.back().value);
      }

      if (logprobs(t, blank) >= cfg.prune_logp) {
        Hyp& h = slot(prefix, [&] {
          Hyp copy = hyp;
          copy.p_blank = kNegInf;
          copy.p_nonblank = kNegInf;
          return copy;
        });
        h.p_blank = log_add(h.p_blank, p_total + logprobs(t, blank));
      }

      for (int k = 0; k < blank; ++k) {
        const double p_sym = logprobs(t, k);
        if (p_sym < cfg.prune_logp) continue;
        const char32_t symbol = alphabet.symbol(k);
        std::string sym_utf8;
        utf8::append(sym_utf8, symbol);

        if (!prefix.empty() && sym_utf8 == last) {
          // repeat without blank collapses into the same prefix
          Hyp& same = slot(prefix, [&] {
            Hyp copy = hyp;
            copy.p_blank = kNegInf;
            copy.p_nonblank = kNegInf;
            return copy;
          });
          same.p_nonblank = log_add(same.p_nonblank, hyp.p_nonblank + p_sym);
          // a blank in between separates two real occurrences
          if (hyp.p_blank != kNegInf) {
            Hyp& ext = slot(prefix + sym_utf8,
                            [&] { return extended_aux(prefix, hyp, symbol); });
            ext.p_nonblank = log_add(ext.p_nonblank, hyp.p_blank + p_sym);
          }
        } else {
          Hyp& ext = slot(prefix + sym_utf8,
                          [&] { return extended_aux(prefix, hyp, symbol); });
          ext.p_nonblank = log_add(ext.p_nonblank, p_total + p_sym);
        }
      }
    }

    // keep the top beam_width prefixes; ties break lexicographically
    std::vector<std::pair<std::string, Hyp>> ranked(
        std::make_move_iterator(next.begin()), std::make_move_iterator(next.end()));
    std::sort(ranked.begin(), ranked.end(), [&](const auto& a, const auto& b) {
      double sa = hyp_score(a.second, cfg, with_lm);
      double sb = hyp_score(b.second, cfg, with_lm);
      if (sa != sb) return sa > sb;
      return a.first < b.first;
    });
    if (ranked.size() > static_cast<size_t>(cfg.beam_width))
      ranked.resize(static_cast<size_t>(cfg.beam_width));
    beam.clear();
    for (auto& [prefix, hyp] : ranked) beam.emplace(std::move(prefix), std::move(hyp));
  }

  // finalize: score the trailing word (no hotword boost) and the
  // sentence-end transition
  std::vector<ScoredTranscript> result;
  result.reserve(beam.size());
  for (const auto& [prefix, hyp] : beam) {
    double score = hyp_score(hyp, cfg, with_lm);
    if (with_lm) {
      std::string w = trailing_word(prefix);
      std::vector<std::string> ctx = hyp.history;
      if (!w.empty()) {
        score += cfg.lm_alpha * kLn10 * lm->logprob(w, ctx) + cfg.lm_beta;
        ctx.push_back(w);
      }
      score += cfg.lm_alpha * kLn10 * lm->logprob(kSentenceEnd, ctx);
    }
    result.push_back({prefix, score});
  }
  std::sort(result.begin(), result.end(), [](const auto& a, const auto& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.text < b.text;
  });
  return result;
}

std::string decode_with_hotwords(const Eigen::MatrixXd& logprobs,
                                 const Alphabet& alphabet, const NGramModel* lm,
                                 const DecoderConfig& base_cfg,
                                 const std::map<std::string, double>& hotwords) {
  DecoderConfig cfg = base_cfg;
  cfg.hotwords = hotwords;
  auto beam = beam_decode(logprobs, alphabet, lm, cfg);
  return beam.empty() ? std::string() : beam.front().text;
}

std::vector<SweepRow> boost_sweep(const std::vector<Eigen::MatrixXd>& utterances,
                                  const Alphabet& alphabet,
                                  const std::string& keyword,
                                  const std::vector<double>& grid,
                                  const NGramModel* lm,
                                  const DecoderConfig& cfg) {
  if (grid.empty()) throw Error("boost grid must not be empty");
  std::vector<SweepRow> rows;
  rows.reserve(utterances.size() * grid.size());
  for (size_t u = 0; u < utterances.size(); ++u) {
    for (double boost : grid) {
      SweepRow row;
      row.utterance = u;
      row.boost = boost;
      row.transcript = decode_with_hotwords(utterances[u], alphabet, lm, cfg,
                                            {{keyword, boost}});
      row.contains_keyword = contains_whole_word(row.transcript, keyword);
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

}  // namespace lugasr
