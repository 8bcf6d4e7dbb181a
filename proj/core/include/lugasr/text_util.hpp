#pragma once

#include <string>
#include <vector>

namespace lugasr {

std::vector<std::string> split_words(const std::string& text);

// Space-delimited whole-word match (substring matches do not count).
bool contains_whole_word(const std::string& text, const std::string& word);

}  // namespace lugasr
