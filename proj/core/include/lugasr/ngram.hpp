#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "lugasr/errors.hpp"

namespace lugasr {

class EmptyCorpus : public Error {
 public:
  EmptyCorpus() : Error("language model corpus has no sentences") {}
};

class DegenerateCounts : public Error {
 public:
  explicit DegenerateCounts(const std::string& what)
      : Error(what + "; Kneser-Ney is impossible here, use add_k smoothing") {}
};

struct TextCorpusStats {
  uint64_t sentences = 0;
  uint64_t word_tokens = 0;
  uint64_t word_types = 0;
};

inline constexpr const char* kSentenceStart = "<s>";
inline constexpr const char* kSentenceEnd = "</s>";
inline constexpr const char* kUnknown = "<unk>";

// ARPA "log10 of zero" marker used for <s> as a predicted word and for
// zero-probability MLE entries.
inline constexpr double kLogZero10 = -99.0;

struct Smoothing {
  enum class Kind { kKneserNey, kAddK };
  Kind kind = Kind::kKneserNey;
  double k = 0.0;

  static Smoothing kneser_ney() { return {Kind::kKneserNey, 0.0}; }
  static Smoothing add_k(double k) { return {Kind::kAddK, k}; }
};

// Backoff n-gram model over words, log10 throughout (the ARPA convention);
// the decoder converts to natural log at the fusion boundary. Immutable
// after construction; concurrent queries are safe.
class NGramModel {
 public:
  struct Entry {
    double logp = 0.0;     // log10 P(w | context)
    double bow = 0.0;      // log10 backoff weight
    bool has_bow = false;  // true iff this gram backs off to a longer match

    bool operator==(const Entry&) const = default;
  };
  // joined with single spaces, e.g. "omuntu omulungi"
  using Table = std::map<std::string, Entry>;

  NGramModel(int order, std::vector<Table> tables);

  int order() const { return order_; }
  const Table& table(int order) const { return tables_.at(order - 1); }

  // Full backoff chain query. OOV words (in the word or the context) map
  // to <unk>; context is truncated to the last order-1 words.
  double logprob(const std::string& word,
                 const std::vector<std::string>& context) const;

  // Every word the model can predict: unigrams except <s>.
  std::vector<std::string> prediction_vocabulary() const;

  bool operator==(const NGramModel&) const = default;

 private:
  double logprob_ids(const std::vector<std::string>& ngram) const;

  int order_;
  std::vector<Table> tables_;
};

// Counts n-grams over [<s>, words..., </s>] per sentence and estimates an
// interpolated modified Kneser-Ney model by default (three count-of-counts
// discounts per order, falling back to a fixed 0.75 discount when the
// count-of-counts are degenerate). add_k smoothing has closed-form expected
// values for tiny corpora: P(w|ctx) = (c + k) / (C(ctx) + k*V) with
// V = word types + </s> + <unk>. Backoff weights are computed from the
// leftover-mass identity, so every context distribution sums to one over
// the prediction vocabulary. Stored log values are rounded to 7 decimals,
// making ARPA round-trips bit-exact.
std::pair<NGramModel, TextCorpusStats> build_lm(
    const std::vector<std::string>& sentences, int order,
    const Smoothing& smoothing = Smoothing::kneser_ney());

}  // namespace lugasr
