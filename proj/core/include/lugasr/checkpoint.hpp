#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lugasr/features.hpp"
#include "lugasr/model.hpp"

namespace lugasr {

class VersionMismatch : public Error {
 public:
  VersionMismatch(uint32_t found, uint32_t expected)
      : Error("checkpoint version " + std::to_string(found) +
              " not supported (expected " + std::to_string(expected) + ")") {}
};

class CorruptCheckpoint : public Error {
 public:
  explicit CorruptCheckpoint(const std::string& what) : Error(what) {}
};

inline constexpr uint32_t kCheckpointVersion = 1;

// Everything needed to resume training or run inference: parameters,
// optimizer moments, the feature pipeline settings and the normalization
// stats the model was trained with. Round-trips bit-exactly.
struct Checkpoint {
  AcousticModel model;
  AdamState adam;
  int epoch = 0;
  FeatureConfig feature_config;
  std::optional<FeatureStats> feature_stats;
};

std::vector<uint8_t> serialize_checkpoint(const Checkpoint& ckpt);
Checkpoint deserialize_checkpoint(const std::vector<uint8_t>& bytes);

void save_checkpoint(const Checkpoint& ckpt, const std::string& path);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace lugasr
