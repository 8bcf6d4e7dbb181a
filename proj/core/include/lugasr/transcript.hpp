#pragma once

#include <string>
#include <vector>

#include "lugasr/alphabet.hpp"

namespace lugasr {

enum class LintCode { kDigit, kPunctuation, kTag, kEncoding };

const char* lint_code_name(LintCode code);

struct LintFinding {
  LintCode code;
  size_t byte_offset;
  size_t byte_length;
  std::string text;  // offending span, verbatim

  bool operator==(const LintFinding&) const = default;
};

// Guideline checks over raw transcriber output. Lint never fails; an empty
// result means the text is guideline-clean. Content inside a bracketed tag
// is reported once as the TAG finding, not re-scanned.
std::vector<LintFinding> lint_transcript(const std::string& raw);

// Canonicalizes raw transcriber output into alphabet-valid text:
// lowercased; single-word bracketed tags ([um], [laughter], ...) dropped;
// diacritics folded to their base letter (canonical decomposition followed
// by combining-mark removal, e.g. "ö" -> "o"); "ŋŋ" -> "ng" and a lone "ŋ"
// -> "ng"; smart quotes folded to the plain apostrophe; dashes and slashes
// treated as word separators; remaining punctuation dropped; whitespace
// collapsed and trimmed. Characters that survive every rule and are not in
// the alphabet (digits in particular) raise UnmappableCharacter with the
// byte offset in the raw input. Idempotent on its own output.
std::string normalize_transcript(const std::string& raw, const Alphabet& alphabet);

}  // namespace lugasr
