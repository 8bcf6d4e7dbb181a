#include "lugasr/transcript.hpp"

#include <cctype>

#include "lugasr/utf8.hpp"

namespace lugasr {

namespace {

constexpr char32_t kEng = 0x014B;       // ŋ
constexpr char32_t kEngUpper = 0x014A;  // Ŋ

// Base letter for codepoints whose canonical decomposition is an ASCII
// letter plus combining marks (Latin-1 Supplement and Latin Extended-A).
// Returns 0 when there is no such decomposition.
char fold_to_base(char32_t cp) {
  struct Range {
    char32_t lo, hi;
    char base;
  };
  static constexpr Range kRanges[] = {
      {0x00C0, 0x00C5, 'a'}, {0x00C7, 0x00C7, 'c'}, {0x00C8, 0x00CB, 'e'},
      {0x00CC, 0x00CF, 'i'}, {0x00D1, 0x00D1, 'n'}, {0x00D2, 0x00D6, 'o'},
      {0x00D9, 0x00DC, 'u'}, {0x00DD, 0x00DD, 'y'}, {0x00E0, 0x00E5, 'a'},
      {0x00E7, 0x00E7, 'c'}, {0x00E8, 0x00EB, 'e'}, {0x00EC, 0x00EF, 'i'},
      {0x00F1, 0x00F1, 'n'}, {0x00F2, 0x00F6, 'o'}, {0x00F9, 0x00FC, 'u'},
      {0x00FD, 0x00FD, 'y'}, {0x00FF, 0x00FF, 'y'}, {0x0100, 0x0105, 'a'},
      {0x0106, 0x010D, 'c'}, {0x010E, 0x010F, 'd'}, {0x0112, 0x011B, 'e'},
      {0x011C, 0x0123, 'g'}, {0x0124, 0x0125, 'h'}, {0x0128, 0x012F, 'i'},
      {0x0130, 0x0130, 'i'}, {0x0134, 0x0135, 'j'}, {0x0136, 0x0137, 'k'},
      {0x0139, 0x013E, 'l'}, {0x0143, 0x0148, 'n'}, {0x014C, 0x0151, 'o'},
      {0x0154, 0x0159, 'r'}, {0x015A, 0x0161, 's'}, {0x0162, 0x0165, 't'},
      {0x0168, 0x0173, 'u'}, {0x0174, 0x0175, 'w'}, {0x0176, 0x0178, 'y'},
      {0x0179, 0x017E, 'z'},
  };
  for (const auto& r : kRanges) {
    if (cp >= r.lo && cp <= r.hi) return r.base;
  }
  return 0;
}

bool is_combining_mark(char32_t cp) { return cp >= 0x0300 && cp <= 0x036F; }

bool is_space_like(char32_t cp) {
  return cp == U' ' || cp == U'\t' || cp == U'\n' || cp == U'\r' ||
         cp == 0x00A0 || cp == 0x2028 || cp == 0x2029;
}

bool is_word_separator_punct(char32_t cp) {
  return cp == U'-' || cp == U'/' || cp == 0x2010 || cp == 0x2011 ||
         cp == 0x2013 || cp == 0x2014;
}

bool is_droppable_punct(char32_t cp) {
  if (cp < 0x80) {
    return std::ispunct(static_cast<unsigned char>(cp)) && cp != U'\'' &&
           !is_word_separator_punct(cp);
  }
  switch (cp) {
    case 0x201C: case 0x201D: case 0x00AB: case 0x00BB:  // quotes
    case 0x2026:                                         // ellipsis
    case 0x00A1: case 0x00BF:                            // inverted marks
    case 0x00B7:                                         // middle dot
      return true;
    default:
      return false;
  }
}

// A tag is '[' + one non-empty run without spaces or brackets + ']'.
// Returns the codepoint index one past the tag, or `i` if not a tag.
size_t match_tag(const std::vector<utf8::Codepoint>& cps, size_t i) {
  if (cps[i].value != U'[') return i;
  size_t j = i + 1;
  bool any = false;
  while (j < cps.size() && cps[j].valid && cps[j].value != U']' &&
         cps[j].value != U'[' && !is_space_like(cps[j].value)) {
    any = true;
    ++j;
  }
  if (any && j < cps.size() && cps[j].value == U']') return j + 1;
  return i;
}

}  // namespace

const char* lint_code_name(LintCode code) {
  switch (code) {
    case LintCode::kDigit: return "DIGIT";
    case LintCode::kPunctuation: return "PUNCTUATION";
    case LintCode::kTag: return "TAG";
    case LintCode::kEncoding: return "ENCODING";
  }
  return "?";
}

std::vector<LintFinding> lint_transcript(const std::string& raw) {
  std::vector<LintFinding> findings;
  auto cps = utf8::decode(raw);
  auto span_len = [&](size_t first, size_t last_excl) {
    size_t end = last_excl < cps.size() ? cps[last_excl].byte_offset : raw.size();
    return end - cps[first].byte_offset;
  };
  auto add = [&](LintCode code, size_t first, size_t last_excl) {
    size_t off = cps[first].byte_offset;
    size_t len = span_len(first, last_excl);
    findings.push_back({code, off, len, raw.substr(off, len)});
  };

  for (size_t i = 0; i < cps.size();) {
    const auto& cp = cps[i];
    if (!cp.valid || cp.value == utf8::kReplacement) {
      add(LintCode::kEncoding, i, i + 1);
      ++i;
      continue;
    }
    size_t after_tag = match_tag(cps, i);
    if (after_tag != i) {
      add(LintCode::kTag, i, after_tag);
      i = after_tag;
      continue;
    }
    char32_t c = cp.value;
    if (c >= U'0' && c <= U'9') {
      add(LintCode::kDigit, i, i + 1);
    } else if (c < 0x80 && std::ispunct(static_cast<unsigned char>(c)) &&
               c != U'\'') {
      add(LintCode::kPunctuation, i, i + 1);
    } else if (c == 0x2018 || c == 0x2019 || c == 0x201C || c == 0x201D) {
      add(LintCode::kPunctuation, i, i + 1);
    } else if (c < 0x20) {
      if (c != U'\n' && c != U'\r' && c != U'\t')
        add(LintCode::kEncoding, i, i + 1);
    } else if (c >= 0x80 && c != kEng && c != kEngUpper && !is_space_like(c)) {
      // non-ASCII letters signal encoding cleanup; ŋ is regular orthography
      add(LintCode::kEncoding, i, i + 1);
    }
    ++i;
  }
  return findings;
}

std::string normalize_transcript(const std::string& raw, const Alphabet& alphabet) {
  auto cps = utf8::decode(raw);

  // First pass: tag removal, case folding, diacritic folding. Keeps the raw
  // byte offset of every surviving character for error reporting.
  struct Folded {
    char32_t cp;
    size_t byte_offset;
  };
  std::vector<Folded> folded;
  folded.reserve(cps.size());
  for (size_t i = 0; i < cps.size();) {
    const auto& c = cps[i];
    if (!c.valid) throw UnmappableCharacter(utf8::kReplacement, c.byte_offset);
    size_t after_tag = match_tag(cps, i);
    if (after_tag != i) {
      folded.push_back({U' ', c.byte_offset});
      i = after_tag;
      continue;
    }
    char32_t cp = c.value;
    if (cp < 0x80) {
      cp = static_cast<char32_t>(std::tolower(static_cast<unsigned char>(cp)));
    } else if (cp == kEngUpper) {
      cp = kEng;
    } else if (cp == 0x2018 || cp == 0x2019) {
      cp = U'\'';
    } else if (char base = fold_to_base(cp); base != 0) {
      cp = static_cast<char32_t>(base);
    }
    if (is_combining_mark(cp)) {
      ++i;
      continue;
    }
    if (is_space_like(cp) || is_word_separator_punct(cp)) {
      folded.push_back({U' ', c.byte_offset});
      ++i;
      continue;
    }
    if (is_droppable_punct(cp)) {
      ++i;
      continue;
    }
    folded.push_back({cp, c.byte_offset});
    ++i;
  }

  // Second pass: ŋ runs ("ŋŋ" and a lone "ŋ" both become "ng"), alphabet
  // validation, whitespace collapsing.
  std::string out;
  bool pending_space = false;
  auto emit = [&](char32_t cp, size_t off) {
    if (!alphabet.index_of(cp)) throw UnmappableCharacter(cp, off);
    if (pending_space && !out.empty()) {
      if (!alphabet.index_of(U' ')) throw UnmappableCharacter(U' ', off);
      out.push_back(' ');
    }
    pending_space = false;
    utf8::append(out, cp);
  };
  for (size_t i = 0; i < folded.size(); ++i) {
    char32_t cp = folded[i].cp;
    if (cp == U' ') {
      pending_space = true;
      continue;
    }
    if (cp == kEng) {
      if (i + 1 < folded.size() && folded[i + 1].cp == kEng) ++i;
      emit(U'n', folded[i].byte_offset);
      emit(U'g', folded[i].byte_offset);
      continue;
    }
    emit(cp, folded[i].byte_offset);
  }
  return out;
}

}  // namespace lugasr
