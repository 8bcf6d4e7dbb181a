#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "lugasr/features.hpp"
#include "oracles.hpp"

using namespace lugasr;

TEST_CASE("frame count: 1s at 25ms/10ms gives 98 frames") {
  auto audio = oracles::make_tone(440.0, 1.0);
  auto f = mfcc(audio, 25, 10, 40, 26);
  CHECK(f.frames.rows() == 98);
  CHECK(f.frames.cols() == 26);
  CHECK(f.frames.allFinite());
}

TEST_CASE("audio shorter than a window is rejected") {
  AudioBuffer tiny;
  tiny.samples.assign(100, 0);  // 6.25 ms
  CHECK_THROWS_AS(mfcc(tiny, 25, 10, 40, 26), AudioTooShort);
}

TEST_CASE("all-zero audio gives the log-floor DCT constant") {
  AudioBuffer silence;
  silence.samples.assign(16000, 0);
  auto f = mfcc(silence, 25, 10, 40, 26);
  const double c0 = std::sqrt(40.0) * std::log(1e-10);
  for (Eigen::Index t = 0; t < f.frames.rows(); ++t) {
    CHECK(f.frames(t, 0) == doctest::Approx(c0).epsilon(1e-12));
    for (Eigen::Index c = 1; c < f.frames.cols(); ++c)
      CHECK(f.frames(t, c) == doctest::Approx(0.0).scale(1.0).epsilon(1e-9));
  }
}

TEST_CASE("1 kHz tone peaks in the mel filter containing 1 kHz") {
  auto audio = oracles::make_tone(1000.0, 1.0, 0.8);
  auto energies = mel_energies(audio, 25, 10, 40);

  // mel edges recomputed analytically; find filters whose peak band
  // contains 1 kHz
  const int n_mels = 40;
  const double mel_max = hz_to_mel(8000.0);
  std::vector<double> edges(n_mels + 2);
  for (int m = 0; m < n_mels + 2; ++m)
    edges[m] = mel_to_hz(mel_max * m / (n_mels + 1));
  int expected = -1;
  for (int m = 0; m < n_mels; ++m)
    if (edges[m] < 1000.0 && 1000.0 <= edges[m + 2]) expected = m;
  REQUIRE(expected >= 0);

  for (Eigen::Index t = 0; t < energies.rows(); ++t) {
    Eigen::Index argmax;
    energies.row(t).maxCoeff(&argmax);
    // the tone lands between two overlapping triangles; either neighbor of
    // the analytic filter is acceptable
    CHECK(std::abs(static_cast<int>(argmax) - expected) <= 1);
  }
}

TEST_CASE("fft matches the naive dft on one frame") {
  auto audio = oracles::make_tone(731.0, 0.05, 0.3);
  // reproduce the exact frame pipeline: pre-emphasis then a Hann window
  const size_t win = 400;
  std::vector<double> emphasized(audio.samples.size());
  emphasized[0] = audio.samples[0];
  for (size_t i = 1; i < audio.samples.size(); ++i)
    emphasized[i] = audio.samples[i] - 0.97 * audio.samples[i - 1];
  std::vector<double> frame(512, 0.0);
  for (size_t i = 0; i < win; ++i)
    frame[i] =
        emphasized[i] * (0.5 - 0.5 * std::cos(2.0 * M_PI * i / (win - 1)));
  auto power = oracles::power_spectrum_naive(frame, 512);

  Eigen::MatrixXd bank = mel_filterbank(40, 512, 16000);
  Eigen::Map<Eigen::VectorXd> p(power.data(), static_cast<Eigen::Index>(power.size()));
  Eigen::VectorXd expected = bank * p;
  Eigen::MatrixXd got = mel_energies(audio, 25, 10, 40);
  for (int m = 0; m < 40; ++m)
    CHECK(got(0, m) == doctest::Approx(expected[m]).epsilon(1e-9));
}

TEST_CASE("mfcc is deterministic") {
  auto audio = oracles::make_tone(620.0, 0.5, 0.4);
  auto a = mfcc(audio, 25, 10, 40, 26);
  auto b = mfcc(audio, 25, 10, 40, 26);
  CHECK(a.frames == b.frames);
}

TEST_CASE("stack_context dimensions and edge replication") {
  FeatureSequence f;
  f.frames.resize(3, 2);
  f.frames << 1, 2, 3, 4, 5, 6;

  auto id = stack_context(f, 0);
  CHECK(id.frames == f.frames);

  auto s = stack_context(f, 1);
  CHECK(s.frames.cols() == 6);
  // row 0: [row0 row0 row1] under edge replication
  Eigen::RowVectorXd row0(6);
  row0 << 1, 2, 1, 2, 3, 4;
  CHECK(s.frames.row(0) == row0);
  // center block equals the original row
  for (int t = 0; t < 3; ++t)
    CHECK(s.frames.block(t, 2, 1, 2) == f.frames.row(t));

  FeatureSequence single;
  single.frames.resize(1, 2);
  single.frames << 9, 7;
  auto rep = stack_context(single, 3);
  for (int c = 0; c < 7; ++c)
    CHECK(rep.frames.block(0, 2 * c, 1, 2) == single.frames.row(0));
}

TEST_CASE("stacked dimension for the default config is 494") {
  FeatureConfig cfg;
  CHECK(cfg.stacked_dim() == 19 * 26);
  CHECK(cfg.stacked_dim() == 494);
}

TEST_CASE("normalize_features: computed stats give zero mean unit variance") {
  lugasr::Rng rng(3);
  Eigen::MatrixXd m(200, 5);
  for (Eigen::Index t = 0; t < m.rows(); ++t)
    for (Eigen::Index c = 0; c < m.cols(); ++c)
      m(t, c) = 3.0 * uniform_unit(rng) + static_cast<double>(c);
  auto [normalized, stats] = normalize_features(m, std::nullopt);
  Eigen::VectorXd mean = normalized.colwise().mean();
  for (Eigen::Index c = 0; c < m.cols(); ++c) {
    CHECK(mean[c] == doctest::Approx(0.0).scale(1.0).epsilon(1e-9));
    double var = (normalized.col(c).array() - mean[c]).square().mean();
    CHECK(var == doctest::Approx(1.0).epsilon(1e-9));
  }

  // idempotence with its own stats
  auto [again, stats2] = normalize_features(normalized, std::nullopt);
  CHECK((again - normalized).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("normalize_features: constant dimension clamps to zero") {
  Eigen::MatrixXd m = Eigen::MatrixXd::Constant(10, 3, 4.2);
  auto [normalized, stats] = normalize_features(m, std::nullopt);
  CHECK(normalized.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("normalize_features rejects mismatched stats") {
  FeatureStats stats;
  stats.mean = Eigen::VectorXd::Zero(4);
  stats.var = Eigen::VectorXd::Ones(4);
  Eigen::MatrixXd m(5, 3);
  m.setZero();
  CHECK_THROWS_AS(normalize_features(m, stats), DimensionMismatch);
}

TEST_CASE("mask_augment: zero masks is identity; one mask zeroes 5 rows") {
  lugasr::Rng rng(11);
  Eigen::MatrixXd m(100, 8);
  for (Eigen::Index t = 0; t < m.rows(); ++t)
    for (Eigen::Index c = 0; c < m.cols(); ++c)
      m(t, c) = uniform_unit(rng) - 0.5;
  Eigen::MatrixXd centered = m.rowwise() - m.colwise().mean();

  lugasr::Rng r0(1);
  CHECK(mask_augment(centered, 0, 0, 0, 0, r0) == centered);

  lugasr::Rng r1(2);
  auto masked = mask_augment(centered, 1, 5, 0, 0, r1);
  int zero_rows = 0, changed_rows = 0;
  for (Eigen::Index t = 0; t < masked.rows(); ++t) {
    if (masked.row(t).cwiseAbs().maxCoeff() < 1e-9)
      ++zero_rows;
    if ((masked.row(t) - centered.row(t)).cwiseAbs().maxCoeff() > 0)
      ++changed_rows;
  }
  CHECK(zero_rows == 5);
  CHECK(changed_rows == 5);
  CHECK(masked.allFinite());

  // reproducible for a fixed seed
  lugasr::Rng r2(2);
  CHECK(mask_augment(centered, 1, 5, 0, 0, r2) == masked);
}

TEST_CASE("feature dump round-trips") {
  lugasr::Rng rng(8);
  Eigen::MatrixXd m(17, 26);
  for (Eigen::Index t = 0; t < m.rows(); ++t)
    for (Eigen::Index c = 0; c < m.cols(); ++c)
      m(t, c) = uniform_unit(rng) * 100.0 - 50.0;
  auto path = std::filesystem::temp_directory_path() / "lugasr_feat_test.bin";
  save_features(m, path.string());
  CHECK(load_features(path.string()) == m);
  CHECK(std::filesystem::file_size(path) == 16 + 17 * 26 * 8);
  std::filesystem::remove(path);
}
