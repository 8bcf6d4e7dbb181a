#include "lugasr/alphabet.hpp"

#include "lugasr/utf8.hpp"

namespace lugasr {

namespace {
std::string describe(char32_t cp, size_t off) {
  std::string repr;
  utf8::append(repr, cp);
  return "unmappable character '" + repr + "' (U+" + [cp] {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04X", static_cast<unsigned>(cp));
    return std::string(buf);
  }() + ") at byte offset " + std::to_string(off);
}
}  // namespace

UnmappableCharacter::UnmappableCharacter(char32_t cp, size_t off)
    : Error(describe(cp, off)), codepoint(cp), byte_offset(off) {}

Alphabet Alphabet::english() {
  std::vector<char32_t> syms;
  for (char32_t c = U'a'; c <= U'z'; ++c) syms.push_back(c);
  syms.push_back(U' ');
  syms.push_back(U'\'');
  return Alphabet(std::move(syms));
}

Alphabet::Alphabet(std::vector<char32_t> symbols) : symbols_(std::move(symbols)) {
  if (symbols_.empty()) throw Error("alphabet must not be empty");
  for (size_t i = 0; i < symbols_.size(); ++i) {
    auto [it, inserted] = index_.emplace(symbols_[i], static_cast<int>(i));
    if (!inserted) {
      std::string repr;
      utf8::append(repr, symbols_[i]);
      throw Error("duplicate alphabet symbol '" + repr + "'");
    }
  }
}

Alphabet::Alphabet(const std::string& symbols_utf8)
    : Alphabet([&] {
        std::vector<char32_t> syms;
        for (const auto& cp : utf8::decode(symbols_utf8)) {
          if (!cp.valid) throw Error("alphabet string is not valid UTF-8");
          syms.push_back(cp.value);
        }
        return syms;
      }()) {}

std::optional<int> Alphabet::index_of(char32_t cp) const {
  auto it = index_.find(cp);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

bool Alphabet::valid_text(const std::string& utf8_text) const {
  for (const auto& cp : utf8::decode(utf8_text)) {
    if (!cp.valid || !index_.count(cp.value)) return false;
  }
  return true;
}

std::vector<int> Alphabet::encode(const std::string& utf8_text) const {
  std::vector<int> out;
  for (const auto& cp : utf8::decode(utf8_text)) {
    auto idx = cp.valid ? index_of(cp.value) : std::nullopt;
    if (!idx) throw UnmappableCharacter(cp.value, cp.byte_offset);
    out.push_back(*idx);
  }
  return out;
}

std::string Alphabet::decode(const std::vector<int>& indices) const {
  std::string out;
  for (int idx : indices) utf8::append(out, symbol(idx));
  return out;
}

std::string Alphabet::to_utf8() const {
  std::string out;
  for (char32_t cp : symbols_) utf8::append(out, cp);
  return out;
}

}  // namespace lugasr
