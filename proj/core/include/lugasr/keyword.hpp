#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace lugasr {

struct ConfusionCounts {
  uint64_t tp = 0;
  uint64_t fp = 0;
  uint64_t fn = 0;
  uint64_t tn = 0;

  ConfusionCounts& operator+=(const ConfusionCounts& o) {
    tp += o.tp;
    fp += o.fp;
    fn += o.fn;
    tn += o.tn;
    return *this;
  }
  bool operator==(const ConfusionCounts&) const = default;
};

// Whole-word keyword detection against transcripts. expected=true clips
// contribute TP/FN, expected=false clips FP/TN.
ConfusionCounts keyword_confusion(
    const std::vector<std::pair<std::string, bool>>& decodes,
    const std::string& keyword);

struct Prf {
  double precision = 1.0;
  double recall = 1.0;
  double fscore = 1.0;
};

// Micro-averaged metrics with degenerate-denominator conventions:
// precision and recall are 1.0 when their denominator is zero; the F-score
// is 0.0 when precision + recall is zero.
Prf prf(const ConfusionCounts& counts);

// Published result tables usually print values truncated to two decimals;
// the comparison truncates the computed value the same way and allows
// 0.005 slack.
bool prf_matches_reference(const Prf& computed, const Prf& reference);

struct KeywordEvalReport {
  std::map<std::string, ConfusionCounts> per_keyword;
  ConfusionCounts aggregate;
  Prf metrics;  // micro, from the aggregate counts
  std::optional<Prf> reference;  // externally reported triple, if any
  bool matches_reference = true;
};

KeywordEvalReport make_keyword_report(
    const std::map<std::string, ConfusionCounts>& per_keyword,
    std::optional<Prf> reference = std::nullopt);

}  // namespace lugasr
