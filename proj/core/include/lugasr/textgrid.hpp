#pragma once

#include <string>
#include <vector>

#include "lugasr/errors.hpp"

namespace lugasr {

class MalformedTextGrid : public Error {
 public:
  MalformedTextGrid(size_t line, const std::string& reason)
      : Error("malformed TextGrid at line " + std::to_string(line) + ": " + reason),
        line(line),
        reason(reason) {}
  size_t line;
  std::string reason;
};

struct TextGridInterval {
  double xmin = 0.0;
  double xmax = 0.0;
  std::string text;

  bool operator==(const TextGridInterval&) const = default;
};

struct TextGridTier {
  std::string name;
  std::vector<TextGridInterval> intervals;

  bool operator==(const TextGridTier&) const = default;
};

// Parses Praat TextGrid text in either "long" or "short" form (content must
// already be decoded to UTF-8; see utf8::normalize_text_encoding). Interval
// tiers are returned in file order; point tiers are skipped, with a note
// appended to `warnings` when given.
std::vector<TextGridTier> parse_textgrid(const std::string& content,
                                         std::vector<std::string>* warnings = nullptr);

// Long-form serializer, the inverse of parse_textgrid for interval tiers.
std::string write_textgrid_long(const std::vector<TextGridTier>& tiers);

}  // namespace lugasr
