#pragma once

#include <optional>
#include <set>
#include <vector>

#include "lugasr/checkpoint.hpp"
#include "lugasr/ctc.hpp"
#include "lugasr/model.hpp"

namespace lugasr {

class DivergenceDetected : public Error {
 public:
  explicit DivergenceDetected(int epoch)
      : Error("training diverged (non-finite loss) at epoch " +
              std::to_string(epoch)) {}
};

class IncompatibleFeatureDim : public Error {
 public:
  IncompatibleFeatureDim(Eigen::Index got, Eigen::Index expected)
      : Error("feature dimension " + std::to_string(got) +
              " does not match checkpoint input dimension " +
              std::to_string(expected)) {}
};

struct TrainConfig {
  double dropout = 0.1;
  int batch_size = 64;
  double learning_rate = 1e-4;
  int epochs = 10;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  int time_masks = 0;
  int time_mask_width = 0;
  int freq_masks = 0;
  int freq_mask_width = 0;
  uint64_t seed = 0;
  // stop once mean train loss drops below this; 0 disables the check
  double stop_at_train_loss = 0.0;
};

struct Utterance {
  Eigen::MatrixXd features;  // stacked, normalized, T x D
  std::vector<int> label;    // alphabet symbol indices, no blank
  uint64_t size_hint = 0;    // wav byte size; batches group similar lengths
};
using Dataset = std::vector<Utterance>;

// Loss and parameter gradients for one utterance, full backprop including
// backward-through-time over the recurrent layer. Training mode (dropout,
// sampled masks) when rng is non-null.
std::pair<double, ModelTensors> backward(const AcousticModel& model,
                                         const Eigen::MatrixXd& x,
                                         const std::vector<int>& label,
                                         double dropout = 0.0,
                                         Rng* rng = nullptr);

struct EpochStats {
  int epoch = 0;  // 1-based, cumulative across resumed runs
  double train_loss = 0.0;
  double dev_loss = 0.0;  // NaN when no dev set was given
};

struct TrainResult {
  Checkpoint best;  // lowest dev loss (train loss when dev is empty)
  Checkpoint last;
  std::vector<EpochStats> log;
  int best_epoch = 0;
};

struct TrainSession {
  Dataset train_set;
  Dataset dev_set;
  TrainConfig config;
  // recorded into emitted checkpoints so decoding can rebuild the pipeline
  FeatureConfig feature_config;
  std::optional<FeatureStats> feature_stats;
};

// Mini-batch Adam over batches of similar-length utterances (sorted by
// size_hint). Fixed seed gives a bit-identical loss curve.
TrainResult train(const AcousticModel& model, const TrainSession& session);

// Continues a run: optimizer moments and the epoch counter carry over.
TrainResult resume(const Checkpoint& from, const TrainSession& session);

// Transfer to a new output alphabet. When the class count changes, the
// output layer is reinitialized (seeded by session.config.seed) and its
// optimizer moments reset; all other tensors carry over bit-identically.
// Layers named in freeze_layers (1..6; 4 covers the recurrent weights)
// receive no updates at all.
TrainResult finetune(const Checkpoint& from, const Alphabet& new_alphabet,
                     const std::set<int>& freeze_layers,
                     const TrainSession& session);

}  // namespace lugasr
