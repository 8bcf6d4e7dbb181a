#pragma once

#include <Eigen/Core>
#include <map>
#include <string>
#include <vector>

#include "lugasr/alphabet.hpp"
#include "lugasr/ngram.hpp"

namespace lugasr {

struct DecoderConfig {
  int beam_width = 64;
  double lm_alpha = 0.93;  // weight on the LM log-probability
  double lm_beta = 1.18;   // word-insertion bonus, applied with the LM
  std::map<std::string, double> hotwords;  // word -> additive boost (natural log)
  double prune_logp = -13.8;  // frame symbols below this are not expanded
};

// Per-frame argmax, collapse adjacent repeats, delete blanks. Ties go to
// the lowest symbol index.
std::string greedy_decode(const Eigen::MatrixXd& logprobs,
                          const Alphabet& alphabet);

struct ScoredTranscript {
  std::string text;
  double score = 0.0;

  bool operator==(const ScoredTranscript&) const = default;
};

// CTC prefix beam search. Alignment paths that collapse to the same prefix
// merge by log-sum-exp. When a space completes a word w, the hypothesis
// score gains alpha * ln P_lm(w | context) + beta, plus boost(w) for
// hotwords; at the end of the utterance a trailing word is scored by the
// LM (with the sentence-end transition) but receives no hotword boost.
// Without an LM the score is the acoustic log-probability plus hotword
// boosts: alpha and beta do not apply. Returns the beam sorted by
// descending score; ties break lexicographically.
std::vector<ScoredTranscript> beam_decode(const Eigen::MatrixXd& logprobs,
                                          const Alphabet& alphabet,
                                          const NGramModel* lm,
                                          const DecoderConfig& cfg);

// beam_decode with the hotword table replaced; returns the top transcript.
std::string decode_with_hotwords(const Eigen::MatrixXd& logprobs,
                                 const Alphabet& alphabet, const NGramModel* lm,
                                 const DecoderConfig& base_cfg,
                                 const std::map<std::string, double>& hotwords);

inline const std::vector<double> kDefaultBoostGrid = {-1000.0, -600.0, -200.0,
                                                      0.0,     200.0,  600.0,
                                                      1000.0};

struct SweepRow {
  size_t utterance = 0;
  double boost = 0.0;
  std::string transcript;
  bool contains_keyword = false;
};

// One decode per (utterance, boost); keyword presence is a whole-word match.
std::vector<SweepRow> boost_sweep(const std::vector<Eigen::MatrixXd>& utterances,
                                  const Alphabet& alphabet,
                                  const std::string& keyword,
                                  const std::vector<double>& grid,
                                  const NGramModel* lm,
                                  const DecoderConfig& cfg);

}  // namespace lugasr
