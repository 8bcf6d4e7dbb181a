#include "lugasr/features.hpp"

#include <cmath>
#include <complex>
#include <cstring>
#include <fstream>
#include <numbers>

namespace lugasr {

namespace {

constexpr double kLogFloor = 1e-10;
constexpr double kPreEmphasis = 0.97;

size_t next_pow2(size_t n) {
  size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

// In-place iterative radix-2 FFT; size must be a power of two.
void fft_radix2(std::vector<std::complex<double>>& a) {
  const size_t n = a.size();
  for (size_t i = 1, j = 0; i < n; ++i) {
    size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (size_t len = 2; len <= n; len <<= 1) {
    const double ang = -2.0 * std::numbers::pi / static_cast<double>(len);
    const std::complex<double> wl(std::cos(ang), std::sin(ang));
    for (size_t i = 0; i < n; i += len) {
      std::complex<double> w(1.0, 0.0);
      for (size_t k = 0; k < len / 2; ++k) {
        auto u = a[i + k];
        auto v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
        w *= wl;
      }
    }
  }
}

Eigen::MatrixXd dct2_orthonormal(int n_out, int n_in) {
  Eigen::MatrixXd d(n_out, n_in);
  const double pi = std::numbers::pi;
  for (int i = 0; i < n_out; ++i) {
    const double scale = i == 0 ? std::sqrt(1.0 / n_in) : std::sqrt(2.0 / n_in);
    for (int j = 0; j < n_in; ++j)
      d(i, j) = scale * std::cos(pi * i * (2 * j + 1) / (2.0 * n_in));
  }
  return d;
}

}  // namespace

double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
double mel_to_hz(double mel) {
  return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0);
}

Eigen::MatrixXd mel_filterbank(int n_mels, int n_fft, int sample_rate) {
  const int n_bins = n_fft / 2 + 1;
  const double mel_max = hz_to_mel(sample_rate / 2.0);
  std::vector<double> edges(n_mels + 2);
  for (int m = 0; m < n_mels + 2; ++m)
    edges[m] = mel_to_hz(mel_max * m / (n_mels + 1));

  Eigen::MatrixXd bank = Eigen::MatrixXd::Zero(n_mels, n_bins);
  for (int m = 0; m < n_mels; ++m) {
    const double lo = edges[m], mid = edges[m + 1], hi = edges[m + 2];
    for (int k = 0; k < n_bins; ++k) {
      const double f = static_cast<double>(k) * sample_rate / n_fft;
      double up = (f - lo) / (mid - lo);
      double down = (hi - f) / (hi - mid);
      bank(m, k) = std::max(0.0, std::min(up, down));
    }
  }
  return bank;
}

Eigen::MatrixXd mel_energies(const AudioBuffer& audio, int window_ms, int hop_ms,
                             int n_mels) {
  if (hop_ms <= 0 || window_ms < hop_ms)
    throw Error("window must be >= hop and hop positive");
  const size_t win = static_cast<size_t>(audio.sample_rate) * window_ms / 1000;
  const size_t hop = static_cast<size_t>(audio.sample_rate) * hop_ms / 1000;
  const size_t n = audio.samples.size();
  if (n < win) throw AudioTooShort(n, win);
  const size_t n_frames = 1 + (n - win) / hop;
  const size_t n_fft = next_pow2(win);
  const size_t n_bins = n_fft / 2 + 1;

  std::vector<double> emphasized(n);
  emphasized[0] = audio.samples[0];
  for (size_t i = 1; i < n; ++i)
    emphasized[i] = audio.samples[i] - kPreEmphasis * audio.samples[i - 1];

  std::vector<double> window(win);
  if (win == 1) {
    window[0] = 1.0;
  } else {
    for (size_t i = 0; i < win; ++i)
      window[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * i / (win - 1));
  }

  Eigen::MatrixXd bank = mel_filterbank(n_mels, static_cast<int>(n_fft),
                                        audio.sample_rate);
  Eigen::MatrixXd energies(n_frames, n_mels);
  std::vector<std::complex<double>> buf(n_fft);
  Eigen::VectorXd power(n_bins);
  for (size_t t = 0; t < n_frames; ++t) {
    for (size_t i = 0; i < win; ++i)
      buf[i] = emphasized[t * hop + i] * window[i];
    std::fill(buf.begin() + win, buf.end(), std::complex<double>(0.0, 0.0));
    fft_radix2(buf);
    for (size_t k = 0; k < n_bins; ++k) power[k] = std::norm(buf[k]);
    energies.row(t) = (bank * power).transpose();
  }
  return energies;
}

FeatureSequence mfcc(const AudioBuffer& audio, int window_ms, int hop_ms,
                     int n_mels, int n_mfcc) {
  if (n_mfcc > n_mels) throw Error("n_mfcc must be <= n_mels");
  Eigen::MatrixXd energies = mel_energies(audio, window_ms, hop_ms, n_mels);
  Eigen::MatrixXd logs =
      energies.cwiseMax(kLogFloor).array().log().matrix();
  Eigen::MatrixXd dct = dct2_orthonormal(n_mfcc, n_mels);
  FeatureSequence out;
  out.frames = logs * dct.transpose();
  out.window_ms = window_ms;
  out.hop_ms = hop_ms;
  return out;
}

FeatureSequence mfcc(const AudioBuffer& audio, const FeatureConfig& cfg) {
  return mfcc(audio, cfg.window_ms, cfg.hop_ms, cfg.n_mels, cfg.n_mfcc);
}

StackedFeatures stack_context(const FeatureSequence& f, int context) {
  if (context < 0) throw Error("context must be >= 0");
  const Eigen::Index t_len = f.frames.rows();
  const Eigen::Index p = f.frames.cols();
  StackedFeatures out;
  out.context = context;
  out.base_dim = static_cast<int>(p);
  out.frames.resize(t_len, (2 * context + 1) * p);
  for (Eigen::Index t = 0; t < t_len; ++t) {
    for (int c = -context; c <= context; ++c) {
      Eigen::Index src = std::clamp<Eigen::Index>(t + c, 0, t_len - 1);
      out.frames.block(t, (c + context) * p, 1, p) = f.frames.row(src);
    }
  }
  return out;
}

std::pair<Eigen::MatrixXd, FeatureStats> normalize_features(
    const Eigen::MatrixXd& frames, const std::optional<FeatureStats>& stats) {
  FeatureStats s;
  if (stats) {
    if (stats->mean.size() != frames.cols() || stats->var.size() != frames.cols())
      throw DimensionMismatch("feature stats dimension does not match features");
    s = *stats;
  } else {
    s.mean = frames.colwise().mean();
    Eigen::MatrixXd centered = frames.rowwise() - s.mean.transpose();
    s.var = centered.array().square().colwise().mean();
  }
  Eigen::ArrayXd denom = s.var.array().max(1e-8).sqrt();
  Eigen::MatrixXd normalized =
      ((frames.rowwise() - s.mean.transpose()).array().rowwise() /
       denom.transpose())
          .matrix();
  return {std::move(normalized), std::move(s)};
}

FeatureStats compute_feature_stats(const std::vector<Eigen::MatrixXd>& set) {
  if (set.empty()) throw Error("cannot compute stats of an empty feature set");
  const Eigen::Index d = set.front().cols();
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(d);
  Eigen::VectorXd sumsq = Eigen::VectorXd::Zero(d);
  double n = 0;
  for (const auto& m : set) {
    if (m.cols() != d)
      throw DimensionMismatch("feature set has inconsistent dimensions");
    sum += m.colwise().sum().transpose();
    sumsq += m.array().square().colwise().sum().matrix().transpose();
    n += static_cast<double>(m.rows());
  }
  FeatureStats s;
  s.mean = sum / n;
  s.var = (sumsq / n - s.mean.cwiseProduct(s.mean).eval()).cwiseMax(0.0);
  return s;
}

Eigen::MatrixXd mask_augment(const Eigen::MatrixXd& frames, int n_time_masks,
                             int time_width, int n_freq_masks, int freq_width,
                             Rng& rng) {
  if (time_width > frames.rows() || freq_width > frames.cols())
    throw Error("mask width exceeds feature dimensions");
  Eigen::MatrixXd out = frames;
  Eigen::RowVectorXd mean = frames.colwise().mean();
  for (int m = 0; m < n_time_masks && time_width > 0; ++m) {
    auto start = static_cast<Eigen::Index>(
        uniform_index(rng, frames.rows() - time_width + 1));
    for (Eigen::Index t = start; t < start + time_width; ++t)
      out.row(t) = mean;
  }
  for (int m = 0; m < n_freq_masks && freq_width > 0; ++m) {
    auto start = static_cast<Eigen::Index>(
        uniform_index(rng, frames.cols() - freq_width + 1));
    for (Eigen::Index c = start; c < start + freq_width; ++c)
      out.col(c).setConstant(mean[c]);
  }
  return out;
}

namespace {
constexpr char kFeatureMagic[4] = {'L', 'G', 'F', 'T'};
constexpr uint32_t kDtypeF64 = 2;
}  // namespace

void save_features(const Eigen::MatrixXd& frames, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write feature file: " + path);
  uint32_t rows = static_cast<uint32_t>(frames.rows());
  uint32_t cols = static_cast<uint32_t>(frames.cols());
  uint32_t dtype = kDtypeF64;
  out.write(kFeatureMagic, 4);
  out.write(reinterpret_cast<const char*>(&rows), 4);
  out.write(reinterpret_cast<const char*>(&cols), 4);
  out.write(reinterpret_cast<const char*>(&dtype), 4);
  for (Eigen::Index t = 0; t < frames.rows(); ++t)
    for (Eigen::Index c = 0; c < frames.cols(); ++c) {
      double v = frames(t, c);
      out.write(reinterpret_cast<const char*>(&v), 8);
    }
}

Eigen::MatrixXd load_features(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open feature file: " + path);
  char magic[4];
  uint32_t rows = 0, cols = 0, dtype = 0;
  in.read(magic, 4);
  in.read(reinterpret_cast<char*>(&rows), 4);
  in.read(reinterpret_cast<char*>(&cols), 4);
  in.read(reinterpret_cast<char*>(&dtype), 4);
  if (!in || std::memcmp(magic, kFeatureMagic, 4) != 0)
    throw Error("bad feature file header: " + path);
  if (dtype != kDtypeF64)
    throw Error("unsupported feature dtype code " + std::to_string(dtype));
  Eigen::MatrixXd frames(rows, cols);
  for (uint32_t t = 0; t < rows; ++t)
    for (uint32_t c = 0; c < cols; ++c) {
      double v;
      in.read(reinterpret_cast<char*>(&v), 8);
      frames(t, c) = v;
    }
  if (!in) throw Error("truncated feature file: " + path);
  return frames;
}

}  // namespace lugasr
