#pragma once

#include <map>
#include <string>
#include <vector>

#include "lugasr/errors.hpp"

namespace lugasr {

class EmptySet : public Error {
 public:
  EmptySet() : Error("evaluation set is empty") {}
};

struct AlignmentResult {
  size_t substitutions = 0;
  size_t insertions = 0;
  size_t deletions = 0;
  size_t ref_len = 0;

  // (S+I+D)/ref_len; 1.0 for an empty reference with non-empty hypothesis,
  // 0.0 when both are empty.
  double wer() const;
  size_t errors() const { return substitutions + insertions + deletions; }
  bool operator==(const AlignmentResult&) const = default;
};

enum class AlignOp { kMatch, kSubstitution, kInsertion, kDeletion };

struct AlignedPair {
  AlignOp op;
  std::string ref_word;  // empty for insertions
  std::string hyp_word;  // empty for deletions
};

// Levenshtein over word tokens with unit costs. Backtrace ties prefer
// substitution over insertion over deletion.
AlignmentResult word_align(const std::string& ref, const std::string& hyp);
std::vector<AlignedPair> word_align_ops(const std::string& ref,
                                        const std::string& hyp);

// Pooled WER: sum of errors over sum of reference lengths (not the mean of
// per-utterance rates).
double corpus_wer(const std::vector<std::pair<std::string, std::string>>& pairs);

struct EvalPair {
  std::string ref;
  std::string hyp;
  std::string group;      // empty = unknown
  double duration_s = 0;  // optional, reported per group when present
};

struct GroupWerRow {
  double wer = 0.0;
  size_t utterances = 0;
  size_t ref_words = 0;
  size_t errors = 0;
  double duration_s = 0.0;
};

struct GroupWerReport {
  std::map<std::string, GroupWerRow> groups;  // unknown-label pairs excluded
  GroupWerRow overall;                        // every pair
};

GroupWerReport group_wer(const std::vector<EvalPair>& pairs);

// Three-line REF/HYP/ops block for linguist review.
std::string format_aligned_diff(const std::string& ref, const std::string& hyp);

}  // namespace lugasr
