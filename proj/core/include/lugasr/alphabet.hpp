#pragma once

#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "lugasr/errors.hpp"

namespace lugasr {

// A character survived every folding rule and is still not a member of the
// alphabet (digits included: numbers must be written out as words, so a
// digit means dirty data rather than something to expand).
class UnmappableCharacter : public Error {
 public:
  UnmappableCharacter(char32_t cp, size_t byte_offset);
  char32_t codepoint;
  size_t byte_offset;
};

// Ordered output symbol set of the acoustic model. The CTC blank is not a
// symbol; by convention it takes the index right after the last symbol.
class Alphabet {
 public:
  // 26 ASCII lowercase letters, space, apostrophe (28 symbols, blank = 28).
  static Alphabet english();

  explicit Alphabet(std::vector<char32_t> symbols);
  explicit Alphabet(const std::string& symbols_utf8);

  size_t size() const { return symbols_.size(); }
  int blank_index() const { return static_cast<int>(symbols_.size()); }
  int num_classes() const { return static_cast<int>(symbols_.size()) + 1; }

  std::optional<int> index_of(char32_t cp) const;
  char32_t symbol(int index) const { return symbols_.at(index); }
  const std::vector<char32_t>& symbols() const { return symbols_; }

  bool valid_text(const std::string& utf8) const;

  // Symbol-index encoding of alphabet-valid text; throws UnmappableCharacter.
  std::vector<int> encode(const std::string& utf8) const;
  std::string decode(const std::vector<int>& indices) const;

  std::string to_utf8() const;

  bool operator==(const Alphabet& other) const {
    return symbols_ == other.symbols_;
  }

 private:
  std::vector<char32_t> symbols_;
  std::unordered_map<char32_t, int> index_;
};

}  // namespace lugasr
