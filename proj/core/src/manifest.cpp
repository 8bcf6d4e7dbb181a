#include "lugasr/manifest.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "lugasr/rng.hpp"

namespace lugasr {

namespace {

std::vector<std::string> split_csv_line(const std::string& line, size_t row) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur.push_back(c);
      }
    } else if (c == '"' && cur.empty()) {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (quoted) throw InvalidRow(row, "unterminated quoted field");
  fields.push_back(cur);
  return fields;
}

void validate_transcript(const std::string& t, const Alphabet& alphabet,
                         size_t row) {
  if (t.empty()) throw InvalidRow(row, "empty transcript");
  if (t.front() == ' ' || t.back() == ' ')
    throw InvalidRow(row, "transcript has leading or trailing space");
  if (t.find("  ") != std::string::npos)
    throw InvalidRow(row, "transcript has a double space");
  if (!alphabet.valid_text(t))
    throw InvalidRow(row, "transcript contains characters outside the alphabet");
}

}  // namespace

std::vector<ManifestEntry> parse_manifest_csv(const std::string& content,
                                              const Alphabet& alphabet) {
  std::istringstream in(content);
  std::string line;
  if (!std::getline(in, line)) throw CsvSchemaError("empty manifest file");
  if (!line.empty() && line.back() == '\r') line.pop_back();

  bool has_group;
  if (line == kManifestHeader) {
    has_group = false;
  } else if (line == kManifestHeaderWithGroup) {
    has_group = true;
  } else {
    throw CsvSchemaError("bad manifest header: expected '" +
                         std::string(kManifestHeader) + "[,speaker_group]', got '" +
                         line + "'");
  }

  std::vector<ManifestEntry> entries;
  size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fields = split_csv_line(line, row);
    size_t expected = has_group ? 4 : 3;
    if (fields.size() != expected)
      throw InvalidRow(row, "expected " + std::to_string(expected) +
                                " fields, got " + std::to_string(fields.size()));
    ManifestEntry e;
    e.wav_filename = fields[0];
    if (e.wav_filename.empty()) throw InvalidRow(row, "empty wav_filename");
    try {
      size_t used = 0;
      long long size = std::stoll(fields[1], &used);
      if (used != fields[1].size() || size < 0) throw std::invalid_argument("");
      e.wav_filesize = static_cast<uint64_t>(size);
    } catch (const std::exception&) {
      throw InvalidRow(row, "wav_filesize is not a nonnegative integer: '" +
                                fields[1] + "'");
    }
    e.transcript = fields[2];
    validate_transcript(e.transcript, alphabet, row);
    if (has_group) e.speaker_group = fields[3];
    entries.push_back(std::move(e));
  }
  return entries;
}

std::string format_manifest_csv(const std::vector<ManifestEntry>& entries) {
  bool has_group = false;
  for (const auto& e : entries)
    if (!e.speaker_group.empty()) has_group = true;

  std::ostringstream os;
  os << (has_group ? kManifestHeaderWithGroup : kManifestHeader) << "\n";
  for (const auto& e : entries) {
    os << e.wav_filename << ',' << e.wav_filesize << ',' << e.transcript;
    if (has_group) os << ',' << e.speaker_group;
    os << "\n";
  }
  return os.str();
}

std::vector<ManifestEntry> read_manifest(const std::string& path,
                                         const Alphabet& alphabet) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open manifest: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_manifest_csv(buf.str(), alphabet);
}

void write_manifest(const std::vector<ManifestEntry>& entries,
                    const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write manifest: " + path);
  out << format_manifest_csv(entries);
}

ManifestSplit split_manifest(const std::vector<ManifestEntry>& entries,
                             double train_ratio, double dev_ratio,
                             double test_ratio, uint64_t seed) {
  if (entries.empty()) throw EmptyManifest();
  if (train_ratio <= 0 || dev_ratio <= 0 || test_ratio <= 0)
    throw InvalidRatios("split ratios must be positive");
  if (std::fabs(train_ratio + dev_ratio + test_ratio - 1.0) > 1e-9)
    throw InvalidRatios("split ratios must sum to 1");

  std::vector<ManifestEntry> shuffled = entries;
  Rng rng(seed);
  shuffle(shuffled, rng);

  size_t n = shuffled.size();
  size_t n_dev = static_cast<size_t>(std::floor(n * dev_ratio));
  size_t n_test = static_cast<size_t>(std::floor(n * test_ratio));

  ManifestSplit split;
  split.train.assign(shuffled.begin(), shuffled.end() - n_dev - n_test);
  split.dev.assign(shuffled.end() - n_dev - n_test, shuffled.end() - n_test);
  split.test.assign(shuffled.end() - n_test, shuffled.end());
  return split;
}

}  // namespace lugasr
