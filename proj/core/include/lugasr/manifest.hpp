#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lugasr/alphabet.hpp"
#include "lugasr/errors.hpp"

namespace lugasr {

class CsvSchemaError : public Error {
 public:
  explicit CsvSchemaError(const std::string& what) : Error(what) {}
};

class InvalidRow : public Error {
 public:
  InvalidRow(size_t row, const std::string& reason)
      : Error("invalid manifest row " + std::to_string(row) + ": " + reason),
        row(row),
        reason(reason) {}
  size_t row;  // 1-based, counting the header as row 1
  std::string reason;
};

class EmptyManifest : public Error {
 public:
  EmptyManifest() : Error("manifest has no entries") {}
};

class InvalidRatios : public Error {
 public:
  explicit InvalidRatios(const std::string& what) : Error(what) {}
};

// One row of the training CSV: a clip, its size in bytes (used to batch
// audio of similar lengths), and the normalized transcript. speaker_group
// is an optional label for group-split evaluation; empty means unknown.
struct ManifestEntry {
  std::string wav_filename;
  uint64_t wav_filesize = 0;
  std::string transcript;
  std::string speaker_group;

  bool operator==(const ManifestEntry&) const = default;
};

inline constexpr const char* kManifestHeader = "wav_filename,wav_filesize,transcript";
inline constexpr const char* kManifestHeaderWithGroup =
    "wav_filename,wav_filesize,transcript,speaker_group";

std::vector<ManifestEntry> parse_manifest_csv(const std::string& content,
                                              const Alphabet& alphabet);
std::string format_manifest_csv(const std::vector<ManifestEntry>& entries);

std::vector<ManifestEntry> read_manifest(const std::string& path,
                                         const Alphabet& alphabet);
void write_manifest(const std::vector<ManifestEntry>& entries,
                    const std::string& path);

struct ManifestSplit {
  std::vector<ManifestEntry> train;
  std::vector<ManifestEntry> dev;
  std::vector<ManifestEntry> test;
};

// Deterministic shuffled partition. Dev and test sizes are
// floor(n * ratio); the remainder goes to train.
ManifestSplit split_manifest(const std::vector<ManifestEntry>& entries,
                             double train_ratio, double dev_ratio,
                             double test_ratio, uint64_t seed);

}  // namespace lugasr
