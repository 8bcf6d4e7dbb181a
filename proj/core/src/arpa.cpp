#include "lugasr/arpa.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace lugasr {

namespace {

std::string fmt7(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.7f", v);
  return buf;
}

size_t count_words(const std::string& gram) {
  size_t n = 1;
  for (char c : gram)
    if (c == ' ') ++n;
  return n;
}

}  // namespace

std::string format_arpa(const NGramModel& model) {
  std::ostringstream os;
  os << "\\data\\\n";
  for (int n = 1; n <= model.order(); ++n)
    os << "ngram " << n << "=" << model.table(n).size() << "\n";
  for (int n = 1; n <= model.order(); ++n) {
    os << "\n\\" << n << "-grams:\n";
    for (const auto& [gram, e] : model.table(n)) {
      os << fmt7(e.logp) << '\t' << gram;
      if (e.has_bow) os << '\t' << fmt7(e.bow);
      os << "\n";
    }
  }
  os << "\n\\end\\\n";
  return os.str();
}

NGramModel parse_arpa(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  size_t line_no = 0;
  auto next_line = [&](std::string& out) {
    if (!std::getline(in, out)) return false;
    ++line_no;
    if (!out.empty() && out.back() == '\r') out.pop_back();
    return true;
  };

  // header
  bool found_data = false;
  while (next_line(line)) {
    if (line == "\\data\\") {
      found_data = true;
      break;
    }
    if (!line.empty())
      throw ArpaSyntaxError(line_no, "expected \\data\\ header");
  }
  if (!found_data) throw ArpaSyntaxError(line_no, "missing \\data\\ header");

  std::vector<size_t> declared;
  while (next_line(line)) {
    if (line.empty()) break;
    int order = 0;
    long long count = -1;
    if (std::sscanf(line.c_str(), "ngram %d=%lld", &order, &count) != 2 ||
        order != static_cast<int>(declared.size()) + 1 || count < 0)
      throw ArpaSyntaxError(line_no, "bad ngram count line: '" + line + "'");
    declared.push_back(static_cast<size_t>(count));
  }
  if (declared.empty())
    throw ArpaSyntaxError(line_no, "no ngram counts declared");
  const int order = static_cast<int>(declared.size());

  std::vector<NGramModel::Table> tables(order);
  int current = 0;  // order of the section being read, 0 = none
  bool ended = false;
  while (next_line(line)) {
    if (line.empty()) continue;
    if (line == "\\end\\") {
      ended = true;
      break;
    }
    if (line[0] == '\\') {
      int n = 0;
      if (std::sscanf(line.c_str(), "\\%d-grams:", &n) != 1 || n < 1 ||
          n > order)
        throw ArpaSyntaxError(line_no, "bad section header: '" + line + "'");
      current = n;
      continue;
    }
    if (current == 0)
      throw ArpaSyntaxError(line_no, "entry outside any n-gram section");

    // log10p <ws> w1 .. wn [<ws> log10bow]
    std::istringstream fields(line);
    std::vector<std::string> tokens;
    std::string tok;
    while (fields >> tok) tokens.push_back(tok);
    const size_t n_words = static_cast<size_t>(current);
    if (tokens.size() != n_words + 1 && tokens.size() != n_words + 2)
      throw ArpaSyntaxError(line_no, "wrong field count for a " +
                                         std::to_string(current) + "-gram");
    NGramModel::Entry e;
    char* end = nullptr;
    e.logp = std::strtod(tokens[0].c_str(), &end);
    if (end == tokens[0].c_str() || *end != '\0')
      throw ArpaSyntaxError(line_no, "bad log probability '" + tokens[0] + "'");
    std::string gram;
    for (size_t i = 0; i < n_words; ++i) {
      if (i) gram.push_back(' ');
      gram += tokens[1 + i];
    }
    if (tokens.size() == n_words + 2) {
      e.bow = std::strtod(tokens.back().c_str(), &end);
      if (end == tokens.back().c_str() || *end != '\0')
        throw ArpaSyntaxError(line_no, "bad backoff weight '" + tokens.back() + "'");
      e.has_bow = true;
    }
    if (count_words(gram) != n_words)
      throw ArpaSyntaxError(line_no, "gram/order mismatch");
    tables[current - 1][gram] = e;
  }
  if (!ended) throw ArpaSyntaxError(line_no, "missing \\end\\");

  for (int n = 1; n <= order; ++n)
    if (tables[n - 1].size() != declared[n - 1])
      throw CountMismatch(n, declared[n - 1], tables[n - 1].size());

  return NGramModel(order, std::move(tables));
}

void write_arpa(const NGramModel& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write ARPA file: " + path);
  out << format_arpa(model);
}

NGramModel read_arpa(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open ARPA file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_arpa(buf.str());
}

}  // namespace lugasr
