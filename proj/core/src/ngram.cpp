#include "lugasr/ngram.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace lugasr {

namespace {

std::vector<std::string> tokenize(const std::string& line) {
  std::vector<std::string> words;
  std::istringstream in(line);
  std::string w;
  while (in >> w) words.push_back(w);
  return words;
}

std::string join(const std::vector<std::string>& words, size_t begin,
                 size_t count) {
  std::string out;
  for (size_t i = begin; i < begin + count; ++i) {
    if (i > begin) out.push_back(' ');
    out += words[i];
  }
  return out;
}

std::string drop_first_word(const std::string& gram) {
  size_t sp = gram.find(' ');
  return sp == std::string::npos ? std::string() : gram.substr(sp + 1);
}

std::string drop_last_word(const std::string& gram) {
  size_t sp = gram.rfind(' ');
  return sp == std::string::npos ? std::string() : gram.substr(0, sp);
}

bool starts_with_marker(const std::string& gram) {
  return gram.rfind(kSentenceStart, 0) == 0 &&
         (gram.size() == 3 || gram[3] == ' ');
}

bool has_prefix_word(const std::string& gram, const std::string& ctx) {
  return gram.size() > ctx.size() + 1 &&
         gram.compare(0, ctx.size(), ctx) == 0 && gram[ctx.size()] == ' ';
}

// stored log values are rounded to 7 decimals so the ARPA text form is the
// exact value
double quantize(double log10_value) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.7f", log10_value);
  return std::strtod(buf, nullptr);
}

// Backoff-chain evaluation over partially or fully built tables. The
// n-gram must already be mapped into the stored vocabulary.
double query_tables(const std::vector<NGramModel::Table>& tables,
                    const std::vector<std::string>& ngram) {
  const size_t n = ngram.size();
  const auto& tab = tables[n - 1];
  auto it = tab.find(join(ngram, 0, n));
  if (it != tab.end()) return it->second.logp;
  if (n == 1) return kLogZero10;  // unreachable once <unk> is stored

  double bow = 0.0;
  auto ctx_it = tables[n - 2].find(join(ngram, 0, n - 1));
  if (ctx_it != tables[n - 2].end() && ctx_it->second.has_bow)
    bow = ctx_it->second.bow;
  std::vector<std::string> shorter(ngram.begin() + 1, ngram.end());
  return bow + query_tables(tables, shorter);
}

struct Discounts {
  double d1 = 0.75, d2 = 0.75, d3 = 0.75;

  double of(uint64_t count) const {
    if (count == 0) return 0.0;
    if (count == 1) return d1;
    if (count == 2) return d2;
    return d3;
  }
};

// Chen-Goodman discounts from the count-of-counts; the fixed 0.75 fallback
// covers corpora whose count-of-counts are degenerate.
Discounts estimate_discounts(
    const std::unordered_map<std::string, uint64_t>& counts,
    const std::string& skip_key) {
  uint64_t n[5] = {0, 0, 0, 0, 0};
  for (const auto& [gram, c] : counts) {
    if (gram == skip_key) continue;
    if (c >= 1 && c <= 4) ++n[c];
  }
  Discounts d;
  if (n[1] == 0 || n[2] == 0 || n[3] == 0 || n[4] == 0) return d;
  const double y = static_cast<double>(n[1]) / (n[1] + 2.0 * n[2]);
  const double d1 = 1.0 - 2.0 * y * n[2] / n[1];
  const double d2 = 2.0 - 3.0 * y * n[3] / n[2];
  const double d3 = 3.0 - 4.0 * y * n[4] / n[3];
  if (d1 <= 0 || d1 > 1 || d2 <= 0 || d2 > 2 || d3 <= 0 || d3 > 3) return d;
  return {d1, d2, d3};
}

}  // namespace

NGramModel::NGramModel(int order, std::vector<Table> tables)
    : order_(order), tables_(std::move(tables)) {
  if (order < 1) throw Error("n-gram order must be >= 1");
  if (tables_.size() != static_cast<size_t>(order))
    throw Error("n-gram table count does not match order");
}

double NGramModel::logprob_ids(const std::vector<std::string>& ngram) const {
  return query_tables(tables_, ngram);
}

double NGramModel::logprob(const std::string& word,
                           const std::vector<std::string>& context) const {
  const auto& unigrams = tables_[0];
  auto known = [&](const std::string& w) {
    return unigrams.count(w) ? w : std::string(kUnknown);
  };
  std::vector<std::string> ngram;
  const size_t ctx_len =
      std::min(context.size(), static_cast<size_t>(order_ - 1));
  for (size_t i = context.size() - ctx_len; i < context.size(); ++i)
    ngram.push_back(known(context[i]));
  ngram.push_back(known(word));
  return logprob_ids(ngram);
}

std::vector<std::string> NGramModel::prediction_vocabulary() const {
  std::vector<std::string> words;
  for (const auto& [w, entry] : tables_[0])
    if (w != kSentenceStart) words.push_back(w);
  return words;
}

std::pair<NGramModel, TextCorpusStats> build_lm(
    const std::vector<std::string>& sentences, int order,
    const Smoothing& smoothing) {
  if (order < 1) throw Error("n-gram order must be >= 1");

  TextCorpusStats stats;
  std::set<std::string> types;
  std::vector<std::vector<std::string>> corpus;
  for (const auto& line : sentences) {
    auto words = tokenize(line);
    if (words.empty()) continue;
    stats.sentences += 1;
    stats.word_tokens += words.size();
    for (const auto& w : words) {
      if (w == kSentenceStart || w == kSentenceEnd || w == kUnknown)
        throw Error("corpus contains a reserved token: " + w);
      types.insert(w);
    }
    corpus.push_back(std::move(words));
  }
  if (corpus.empty()) throw EmptyCorpus();
  stats.word_types = types.size();

  // raw counts over padded sentences
  std::vector<std::unordered_map<std::string, uint64_t>> raw(order);
  for (const auto& words : corpus) {
    std::vector<std::string> padded;
    padded.reserve(words.size() + 2);
    padded.push_back(kSentenceStart);
    padded.insert(padded.end(), words.begin(), words.end());
    padded.push_back(kSentenceEnd);
    for (int n = 1; n <= order; ++n)
      for (size_t i = 0; i + n <= padded.size(); ++i)
        raw[n - 1][join(padded, i, n)] += 1;
  }

  // prediction vocabulary: every event the model can emit (no <s>)
  std::vector<std::string> vocab(types.begin(), types.end());
  vocab.push_back(kSentenceEnd);
  vocab.push_back(kUnknown);
  const double v_pred = static_cast<double>(vocab.size());

  const bool kneser_ney = smoothing.kind == Smoothing::Kind::kKneserNey;

  // effective counts: raw at the highest order; continuation counts below,
  // except grams starting with <s>, which nothing can precede
  std::vector<std::unordered_map<std::string, uint64_t>> eff(order);
  eff[order - 1] = raw[order - 1];
  for (int n = order - 1; n >= 1; --n) {
    if (!kneser_ney) {
      eff[n - 1] = raw[n - 1];
      continue;
    }
    auto& dst = eff[n - 1];
    for (const auto& [gram, c] : raw[n - 1])
      if (starts_with_marker(gram)) dst[gram] = c;
    for (const auto& [gram, c] : raw[n]) {
      std::string suffix = drop_first_word(gram);
      if (!starts_with_marker(suffix)) dst[suffix] += 1;
    }
  }

  std::vector<NGramModel::Table> tables(order);

  // unigrams, interpolated with the uniform distribution over the
  // prediction vocabulary so <unk> receives mass
  {
    Discounts disc = kneser_ney
                         ? estimate_discounts(eff[0], kSentenceStart)
                         : Discounts{};
    double total = 0.0;
    double reserved = 0.0;
    for (const auto& w : vocab) {
      auto it = eff[0].find(w);
      if (it == eff[0].end()) continue;
      total += static_cast<double>(it->second);
      reserved += disc.of(it->second);
    }
    if (total <= 0.0) throw DegenerateCounts("no counted events in corpus");
    const double gamma = reserved / total;

    for (const auto& w : vocab) {
      auto it = eff[0].find(w);
      const uint64_t c = it == eff[0].end() ? 0 : it->second;
      double p;
      if (kneser_ney) {
        p = (static_cast<double>(c) - disc.of(c)) / total + gamma / v_pred;
      } else {
        p = (static_cast<double>(c) + smoothing.k) /
            (total + smoothing.k * v_pred);
      }
      NGramModel::Entry e;
      e.logp = p > 0.0 ? quantize(std::log10(p)) : kLogZero10;
      tables[0][w] = e;
    }
    NGramModel::Entry start;
    start.logp = kLogZero10;  // <s> is context only, never predicted
    tables[0][kSentenceStart] = start;
  }

  for (int n = 2; n <= order; ++n) {
    Discounts disc =
        kneser_ney ? estimate_discounts(eff[n - 1], "") : Discounts{};

    std::unordered_map<std::string, double> ctx_total;
    std::unordered_map<std::string, double> ctx_reserved;
    for (const auto& [gram, c] : eff[n - 1]) {
      std::string ctx = drop_last_word(gram);
      ctx_total[ctx] += static_cast<double>(c);
      ctx_reserved[ctx] += disc.of(c);
    }

    for (const auto& [gram, c] : eff[n - 1]) {
      const std::string ctx = drop_last_word(gram);
      const double total = ctx_total[ctx];
      double p;
      if (kneser_ney) {
        const double gamma = ctx_reserved[ctx] / total;
        const double p_low =
            std::pow(10.0, query_tables(tables, tokenize(drop_first_word(gram))));
        p = (static_cast<double>(c) - disc.of(c)) / total + gamma * p_low;
      } else {
        p = (static_cast<double>(c) + smoothing.k) /
            (total + smoothing.k * v_pred);
      }
      NGramModel::Entry e;
      e.logp = p > 0.0 ? quantize(std::log10(p)) : kLogZero10;
      tables[n - 1][gram] = e;
    }

    // backoff weights for the contexts of this order's grams, from the
    // leftover-mass identity: bow = (1 - sum stored p) / (1 - sum lower p);
    // this is what makes every context distribution sum to one
    std::unordered_set<std::string> contexts;
    for (const auto& [gram, entry] : tables[n - 1])
      contexts.insert(drop_last_word(gram));
    for (const auto& ctx : contexts) {
      auto ctx_it = tables[n - 2].find(ctx);
      if (ctx_it == tables[n - 2].end()) continue;
      double stored_mass = 0.0;
      double lower_mass = 0.0;
      for (auto jt = tables[n - 1].lower_bound(ctx + ' ');
           jt != tables[n - 1].end() && has_prefix_word(jt->first, ctx); ++jt) {
        stored_mass += std::pow(10.0, jt->second.logp);
        lower_mass += std::pow(
            10.0, query_tables(tables, tokenize(drop_first_word(jt->first))));
      }
      ctx_it->second.has_bow = true;
      const double num = 1.0 - stored_mass;
      const double den = 1.0 - lower_mass;
      if (den <= 1e-12) {
        ctx_it->second.bow = 0.0;  // lower order already covers everything
      } else if (num <= 0.0) {
        ctx_it->second.bow = kLogZero10;  // no leftover mass (MLE contexts)
      } else {
        ctx_it->second.bow = quantize(std::log10(num / den));
      }
    }
  }

  return {NGramModel(order, std::move(tables)), stats};
}

}  // namespace lugasr
