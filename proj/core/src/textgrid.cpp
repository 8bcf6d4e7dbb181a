#include "lugasr/textgrid.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <sstream>

namespace lugasr {

namespace {

struct Token {
  enum Kind { kNumber, kString, kExists, kAbsent } kind;
  double num = 0.0;
  std::string str;
  size_t line = 0;
};

// Reduces both TextGrid layouts to one token stream: numbers, quoted
// strings and the <exists>/<absent> flags. Long-form key prefixes and
// structural "item [k]:" headers carry no data and are dropped.
class Tokenizer {
 public:
  explicit Tokenizer(const std::string& content) : text_(content) {}

  std::vector<Token> run() {
    std::vector<Token> tokens;
    while (pos_ < text_.size()) {
      std::string line = next_line();
      size_t at = line_no_;
      std::string t = trim(line);
      if (t.empty()) continue;
      if (t[0] == '"') {
        tokens.push_back(read_string(t.substr(1), at));
        continue;
      }
      size_t quote = t.find('"');
      size_t eq = t.find('=');
      if (eq != std::string::npos && (quote == std::string::npos || eq < quote)) {
        std::string value = trim(t.substr(eq + 1));
        if (value.empty()) throw MalformedTextGrid(at, "empty value after '='");
        if (value[0] == '"') {
          tokens.push_back(read_string(value.substr(1), at));
        } else {
          tokens.push_back(read_bare(value, at));
        }
        continue;
      }
      if (t.find("<exists>") != std::string::npos) {
        tokens.push_back({Token::kExists, 0, "", at});
        continue;
      }
      if (t.find("<absent>") != std::string::npos) {
        tokens.push_back({Token::kAbsent, 0, "", at});
        continue;
      }
      if (t.back() == ':') continue;  // "item [1]:" and friends
      tokens.push_back(read_bare(t, at));
    }
    return tokens;
  }

 private:
  std::string next_line() {
    size_t end = text_.find('\n', pos_);
    std::string line = text_.substr(pos_, end == std::string::npos
                                               ? std::string::npos
                                               : end - pos_);
    pos_ = end == std::string::npos ? text_.size() : end + 1;
    ++line_no_;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return line;
  }

  static std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return "";
    size_t e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
  }

  // `rest` starts just after an opening quote; "" is an escaped quote and
  // strings may span lines.
  Token read_string(std::string rest, size_t at) {
    std::string out;
    while (true) {
      size_t i = 0;
      bool closed = false;
      for (; i < rest.size(); ++i) {
        if (rest[i] == '"') {
          if (i + 1 < rest.size() && rest[i + 1] == '"') {
            out.push_back('"');
            ++i;
          } else {
            closed = true;
            break;
          }
        } else {
          out.push_back(rest[i]);
        }
      }
      if (closed) return {Token::kString, 0, out, at};
      if (pos_ >= text_.size())
        throw MalformedTextGrid(at, "unterminated string");
      out.push_back('\n');
      rest = next_line();
    }
  }

  static Token read_bare(const std::string& value, size_t at) {
    // take the leading numeric field; trailing words ("tiers? <exists>"
    // style annotations) were handled by the caller
    char* end = nullptr;
    double num = std::strtod(value.c_str(), &end);
    if (end == value.c_str())
      throw MalformedTextGrid(at, "expected a number, got '" + value + "'");
    return {Token::kNumber, num, "", at};
  }

  const std::string& text_;
  size_t pos_ = 0;
  size_t line_no_ = 0;
};

class TokenReader {
 public:
  explicit TokenReader(std::vector<Token> tokens) : tokens_(std::move(tokens)) {}

  const Token& next(const char* what) {
    if (i_ >= tokens_.size())
      throw MalformedTextGrid(last_line(), std::string("unexpected end of file, expected ") + what);
    return tokens_[i_++];
  }

  double number(const char* what) {
    const Token& t = next(what);
    if (t.kind != Token::kNumber)
      throw MalformedTextGrid(t.line, std::string("expected ") + what);
    return t.num;
  }

  std::string string(const char* what) {
    const Token& t = next(what);
    if (t.kind != Token::kString)
      throw MalformedTextGrid(t.line, std::string("expected ") + what);
    return t.str;
  }

  bool exists_flag() {
    const Token& t = next("<exists> flag");
    if (t.kind == Token::kExists) return true;
    if (t.kind == Token::kAbsent) return false;
    throw MalformedTextGrid(t.line, "expected <exists> or <absent>");
  }

  bool done() const { return i_ >= tokens_.size(); }
  size_t last_line() const {
    return tokens_.empty() ? 0 : tokens_[std::min(i_, tokens_.size() - 1)].line;
  }

 private:
  std::vector<Token> tokens_;
  size_t i_ = 0;
};

int checked_count(double value, size_t line, const char* what) {
  if (value < 0 || value != static_cast<double>(static_cast<long>(value)))
    throw MalformedTextGrid(line, std::string("invalid ") + what);
  return static_cast<int>(value);
}

}  // namespace

std::vector<TextGridTier> parse_textgrid(const std::string& content,
                                         std::vector<std::string>* warnings) {
  TokenReader r(Tokenizer(content).run());

  if (r.done()) throw MalformedTextGrid(0, "missing header");
  std::string file_type = r.string("file type header");
  std::string object_class = r.string("object class header");
  if (file_type != "ooTextFile" || object_class != "TextGrid")
    throw MalformedTextGrid(1, "missing header: not an ooTextFile TextGrid");

  r.number("grid xmin");
  r.number("grid xmax");
  if (!r.exists_flag()) return {};
  size_t size_line = r.last_line();
  int declared = checked_count(r.number("tier count"), size_line, "tier count");

  std::vector<TextGridTier> tiers;
  for (int k = 0; k < declared; ++k) {
    std::string tier_class = r.string("tier class");
    std::string name = r.string("tier name");
    r.number("tier xmin");
    r.number("tier xmax");
    size_t count_line = r.last_line();
    int n = checked_count(r.number("interval count"), count_line, "interval count");

    if (tier_class == "IntervalTier") {
      TextGridTier tier;
      tier.name = name;
      double prev_xmax = -1e300;
      for (int i = 0; i < n; ++i) {
        TextGridInterval iv;
        iv.xmin = r.number("interval xmin");
        size_t line = r.last_line();
        iv.xmax = r.number("interval xmax");
        iv.text = r.string("interval text");
        if (iv.xmax < iv.xmin)
          throw MalformedTextGrid(line, "interval xmax < xmin");
        if (iv.xmin < prev_xmax)
          throw MalformedTextGrid(line, "intervals overlap or are unsorted");
        prev_xmax = iv.xmax;
        tier.intervals.push_back(std::move(iv));
      }
      tiers.push_back(std::move(tier));
    } else if (tier_class == "TextTier") {
      for (int i = 0; i < n; ++i) {
        r.number("point time");
        r.string("point mark");
      }
      if (warnings)
        warnings->push_back("skipped point tier \"" + name + "\"");
    } else {
      throw MalformedTextGrid(r.last_line(),
                              "unknown tier class \"" + tier_class + "\"");
    }
  }
  if (!r.done())
    throw MalformedTextGrid(r.last_line(),
                            "trailing content after declared tiers");
  return tiers;
}

namespace {

std::string fmt_time(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    out.push_back(c);
    if (c == '"') out.push_back('"');
  }
  out.push_back('"');
  return out;
}

}  // namespace

std::string write_textgrid_long(const std::vector<TextGridTier>& tiers) {
  double xmin = 0.0, xmax = 0.0;
  bool any = false;
  for (const auto& t : tiers) {
    for (const auto& iv : t.intervals) {
      if (!any) {
        xmin = iv.xmin;
        xmax = iv.xmax;
        any = true;
      }
      xmin = std::min(xmin, iv.xmin);
      xmax = std::max(xmax, iv.xmax);
    }
  }

  std::ostringstream os;
  os << "File type = \"ooTextFile\"\n";
  os << "Object class = \"TextGrid\"\n\n";
  os << "xmin = " << fmt_time(xmin) << "\n";
  os << "xmax = " << fmt_time(xmax) << "\n";
  os << "tiers? <exists>\n";
  os << "size = " << tiers.size() << "\n";
  os << "item []:\n";
  for (size_t k = 0; k < tiers.size(); ++k) {
    const auto& tier = tiers[k];
    double txmin = xmin, txmax = xmax;
    if (!tier.intervals.empty()) {
      txmin = tier.intervals.front().xmin;
      txmax = tier.intervals.back().xmax;
    }
    os << "    item [" << (k + 1) << "]:\n";
    os << "        class = \"IntervalTier\"\n";
    os << "        name = " << quote(tier.name) << "\n";
    os << "        xmin = " << fmt_time(txmin) << "\n";
    os << "        xmax = " << fmt_time(txmax) << "\n";
    os << "        intervals: size = " << tier.intervals.size() << "\n";
    for (size_t i = 0; i < tier.intervals.size(); ++i) {
      const auto& iv = tier.intervals[i];
      os << "        intervals [" << (i + 1) << "]:\n";
      os << "            xmin = " << fmt_time(iv.xmin) << "\n";
      os << "            xmax = " << fmt_time(iv.xmax) << "\n";
      os << "            text = " << quote(iv.text) << "\n";
    }
  }
  return os.str();
}

}  // namespace lugasr
