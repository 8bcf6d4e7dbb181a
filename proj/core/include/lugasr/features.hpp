#pragma once

#include <Eigen/Core>
#include <optional>
#include <string>
#include <vector>

#include "lugasr/errors.hpp"
#include "lugasr/rng.hpp"
#include "lugasr/wav.hpp"

namespace lugasr {

class AudioTooShort : public Error {
 public:
  AudioTooShort(size_t samples, size_t window)
      : Error("audio too short for one analysis window: " +
              std::to_string(samples) + " samples < " + std::to_string(window)) {}
};

class DimensionMismatch : public Error {
 public:
  explicit DimensionMismatch(const std::string& what) : Error(what) {}
};

struct FeatureConfig {
  int window_ms = 25;
  int hop_ms = 10;
  int n_mels = 40;
  int n_mfcc = 26;
  int context = 9;  // frames of context on each side when stacking

  int stacked_dim() const { return (2 * context + 1) * n_mfcc; }
  bool operator==(const FeatureConfig&) const = default;
};

// Per-utterance T x P matrix of MFCC rows (row t = frame t).
struct FeatureSequence {
  Eigen::MatrixXd frames;
  int window_ms = 25;
  int hop_ms = 10;
};

// T x D with D = (2C+1) * P; row t concatenates MFCC rows t-C..t+C, edge
// rows replicated at the boundaries.
struct StackedFeatures {
  Eigen::MatrixXd frames;
  int context = 0;
  int base_dim = 0;
};

// HTK mel scale.
double hz_to_mel(double hz);
double mel_to_hz(double mel);

// Triangular unit-peak filters over FFT bins 0..n_fft/2, rows = filters.
Eigen::MatrixXd mel_filterbank(int n_mels, int n_fft, int sample_rate);

// Frame count convention: T = 1 + floor((N - window) / hop) for N >= window.
// Per frame: pre-emphasis 0.97 over the whole signal (y0 = x0), symmetric
// Hann window, power spectrum via FFT zero-padded to the next power of two,
// mel filterbank energies. Throws AudioTooShort when N < window.
Eigen::MatrixXd mel_energies(const AudioBuffer& audio, int window_ms, int hop_ms,
                             int n_mels);

// log(mel energy, floored at 1e-10) followed by an orthonormal DCT-II,
// keeping the first n_mfcc coefficients.
FeatureSequence mfcc(const AudioBuffer& audio, int window_ms, int hop_ms,
                     int n_mels, int n_mfcc);
FeatureSequence mfcc(const AudioBuffer& audio, const FeatureConfig& cfg);

StackedFeatures stack_context(const FeatureSequence& f, int context);

struct FeatureStats {
  Eigen::VectorXd mean;
  Eigen::VectorXd var;  // population variance, clamped to >= 1e-8 when used
};

// Zero-mean unit-variance per dimension. With no stats given, moments are
// computed over `frames` and returned alongside the normalized copy.
std::pair<Eigen::MatrixXd, FeatureStats> normalize_features(
    const Eigen::MatrixXd& frames, const std::optional<FeatureStats>& stats);

FeatureStats compute_feature_stats(const std::vector<Eigen::MatrixXd>& set);

// Training-time masking: exactly n_time_masks row bands of width time_width
// and n_freq_masks column bands of width freq_width, positions drawn from
// rng, masked cells set to the per-dimension mean of the input (0 for
// normalized features). Bands may overlap.
Eigen::MatrixXd mask_augment(const Eigen::MatrixXd& frames, int n_time_masks,
                             int time_width, int n_freq_masks, int freq_width,
                             Rng& rng);

// Flat little-endian dump with a 16-byte header (magic "LGFT", rows, cols,
// dtype code 2 = float64), row-major payload.
void save_features(const Eigen::MatrixXd& frames, const std::string& path);
Eigen::MatrixXd load_features(const std::string& path);

}  // namespace lugasr
