#include "lugasr/text_util.hpp"

#include <sstream>

namespace lugasr {

std::vector<std::string> split_words(const std::string& text) {
  std::vector<std::string> words;
  std::istringstream in(text);
  std::string w;
  while (in >> w) words.push_back(w);
  return words;
}

bool contains_whole_word(const std::string& text, const std::string& word) {
  for (const auto& w : split_words(text))
    if (w == word) return true;
  return false;
}

}  // namespace lugasr
