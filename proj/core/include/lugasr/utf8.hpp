#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace lugasr::utf8 {

constexpr char32_t kReplacement = 0xFFFD;

struct Codepoint {
  char32_t value;
  size_t byte_offset;  // offset of the first byte in the source string
  bool valid;          // false if the byte sequence was malformed
};

// Decodes a UTF-8 string. Malformed sequences yield one kReplacement
// codepoint per offending byte with valid=false; decoding never throws.
std::vector<Codepoint> decode(const std::string& s);

void append(std::string& out, char32_t cp);
std::string encode(const std::vector<char32_t>& cps);

// Strips a UTF-8 BOM and transcodes UTF-16 (LE/BE, detected by BOM) to
// UTF-8. Text without a BOM is returned unchanged.
std::string normalize_text_encoding(const std::string& raw);

}  // namespace lugasr::utf8
