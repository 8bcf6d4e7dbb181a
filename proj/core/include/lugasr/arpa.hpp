#pragma once

#include <string>

#include "lugasr/ngram.hpp"

namespace lugasr {

class ArpaSyntaxError : public Error {
 public:
  ArpaSyntaxError(size_t line, const std::string& reason)
      : Error("ARPA syntax error at line " + std::to_string(line) + ": " + reason),
        line(line) {}
  size_t line;
};

class CountMismatch : public Error {
 public:
  CountMismatch(int order, size_t declared, size_t actual)
      : Error("ARPA count mismatch for " + std::to_string(order) +
              "-grams: header declares " + std::to_string(declared) +
              ", found " + std::to_string(actual)) {}
};

// Standard ARPA text form: \data\ counts, per-order sections with
// "log10p<TAB>ngram[<TAB>log10bow]" rows, \end\. Because the model stores
// log values quantized to 7 decimals, write -> read -> write is
// byte-identical and read(write(m)) == m.
std::string format_arpa(const NGramModel& model);
NGramModel parse_arpa(const std::string& text);

void write_arpa(const NGramModel& model, const std::string& path);
NGramModel read_arpa(const std::string& path);

}  // namespace lugasr
