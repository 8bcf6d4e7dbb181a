#include <doctest.h>
#include <zlib.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "lugasr/checkpoint.hpp"
#include "lugasr/model.hpp"
#include "lugasr/trainer.hpp"
#include "oracles.hpp"

using namespace lugasr;

namespace {

Alphabet tiny_alphabet() { return Alphabet(std::string("abcd")); }

AcousticModel tiny_model(int input_dim = 6, int hidden = 5, uint64_t seed = 1) {
  LayerSizes sizes;
  sizes.input = input_dim;
  sizes.h1 = hidden;
  sizes.h2 = hidden;
  sizes.h3 = hidden;
  sizes.h_rec = hidden;
  sizes.h5 = hidden;
  sizes.classes = tiny_alphabet().num_classes();
  return AcousticModel::init(sizes, tiny_alphabet(), seed);
}

Eigen::MatrixXd random_input(int frames, int dim, uint64_t seed) {
  lugasr::Rng rng(seed);
  Eigen::MatrixXd x(frames, dim);
  for (int t = 0; t < frames; ++t)
    for (int d = 0; d < dim; ++d) x(t, d) = 2.0 * uniform_unit(rng) - 1.0;
  return x;
}

}  // namespace

TEST_CASE("clipped relu clamps to [0, 20]") {
  CHECK(clipped_relu(-3.0) == 0.0);
  CHECK(clipped_relu(0.5) == 0.5);
  CHECK(clipped_relu(25.0) == 20.0);
  CHECK(clipped_relu_grad(-1.0) == 0.0);
  CHECK(clipped_relu_grad(5.0) == 1.0);
  CHECK(clipped_relu_grad(25.0) == 0.0);
}

TEST_CASE("zero weights give the uniform distribution") {
  AcousticModel m = tiny_model();
  Alphabet def = Alphabet::english();
  LayerSizes sizes = m.sizes();
  sizes.classes = def.num_classes();
  AcousticModel zero = AcousticModel::init(sizes, def, 0);
  visit_tensors(zero, [](const char*, auto& t) { t.setZero(); });
  auto lp = forward(zero, random_input(4, sizes.input, 9));
  for (Eigen::Index t = 0; t < lp.rows(); ++t)
    for (Eigen::Index k = 0; k < lp.cols(); ++k)
      CHECK(lp(t, k) == doctest::Approx(-std::log(29.0)).epsilon(1e-12));
}

TEST_CASE("per-frame probabilities sum to one") {
  AcousticModel m = tiny_model();
  auto lp = forward(m, random_input(7, 6, 2));
  for (Eigen::Index t = 0; t < lp.rows(); ++t)
    CHECK(lp.row(t).array().exp().sum() == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("hidden activations stay within the clip bounds") {
  AcousticModel m = tiny_model(6, 8, 3);
  // scale weights up so some activations hit the ceiling
  visit_tensors(m, [](const char* name, auto& t) {
    if (std::string_view(name) != "w6" && std::string_view(name) != "b6")
      t *= 40.0;
  });
  auto trace = forward_trace(m, random_input(6, 6, 4), 0.0, nullptr);
  for (const auto* h : {&trace.out1, &trace.out2, &trace.out3, &trace.h4,
                        &trace.out5}) {
    CHECK(h->minCoeff() >= 0.0);
    CHECK(h->maxCoeff() <= 20.0);
  }
  CHECK(trace.h4.maxCoeff() == 20.0);  // clip engaged
}

TEST_CASE("forward is deterministic; dropout with a fixed rng reproduces") {
  AcousticModel m = tiny_model();
  auto x = random_input(9, 6, 5);
  CHECK(forward(m, x) == forward(m, x));

  lugasr::Rng r1(42), r2(42);
  auto a = forward_trace(m, x, 0.3, &r1);
  auto b = forward_trace(m, x, 0.3, &r2);
  CHECK(a.logprobs == b.logprobs);
  CHECK(a.mask1 == b.mask1);
}

TEST_CASE("shape mismatch is rejected") {
  AcousticModel m = tiny_model();
  CHECK_THROWS_AS(forward(m, random_input(3, 7, 1)), ShapeMismatch);
}

TEST_CASE("every parameter gradient matches central finite differences") {
  // tiny model: hidden <= 8, T <= 6, relative error <= 1e-3 at eps = 1e-4
  AcousticModel model = tiny_model(5, 4, 11);
  const Eigen::MatrixXd x = random_input(6, 5, 12);
  const std::vector<int> label = {0, 2, 1};

  auto [loss, grads] = backward(model, x, label);
  CHECK(std::isfinite(loss));

  const double eps = 1e-4;
  const int blank = model.alphabet.blank_index();

  auto views = [](auto& tensors) {
    std::vector<std::pair<double*, size_t>> v;
    visit_tensors(tensors, [&](const char*, auto& t) {
      v.emplace_back(t.data(), static_cast<size_t>(t.size()));
    });
    return v;
  };
  auto gviews = views(grads);

  size_t checked = 0;
  for (size_t tensor = 0; tensor < gviews.size(); ++tensor) {
    for (size_t i = 0; i < gviews[tensor].second; ++i) {
      AcousticModel up = model, down = model;
      views(up)[tensor].first[i] += eps;
      views(down)[tensor].first[i] -= eps;
      double fd = (ctc_loss(forward(up, x), label, blank).loss -
                   ctc_loss(forward(down, x), label, blank).loss) /
                  (2 * eps);
      double analytic = gviews[tensor].first[i];
      if (std::fabs(fd) < 1e-10 && std::fabs(analytic) < 1e-10)
        continue;  // both zero (clipped units)
      double rel = std::fabs(analytic - fd) /
                   std::max({std::fabs(analytic), std::fabs(fd), 1e-8});
      CHECK(rel <= 1e-3);
      ++checked;
    }
  }
  CHECK(checked > 80);
}

TEST_CASE("checkpoint round-trips bit-exactly") {
  AcousticModel m = tiny_model(6, 5, 21);
  Checkpoint ckpt;
  ckpt.model = m;
  ckpt.adam = AdamState::zeros_like(m);
  ckpt.adam.step = 17;
  ckpt.adam.m.w3.setConstant(0.25);
  ckpt.epoch = 3;
  ckpt.feature_config.context = 4;
  FeatureStats stats;
  stats.mean = Eigen::VectorXd::LinSpaced(6, 0.0, 1.0);
  stats.var = Eigen::VectorXd::Constant(6, 2.0);
  ckpt.feature_stats = stats;

  auto bytes = serialize_checkpoint(ckpt);
  Checkpoint back = deserialize_checkpoint(bytes);
  CHECK(serialize_checkpoint(back) == bytes);  // save -> load -> save
  CHECK(back.epoch == 3);
  CHECK(back.adam.step == 17);
  CHECK(back.model.alphabet == m.alphabet);
  CHECK(back.feature_config.context == 4);
  CHECK(back.feature_stats->mean == stats.mean);

  // load-then-forward equals pre-save forward bit-exactly
  auto x = random_input(5, 6, 30);
  CHECK(forward(back.model, x) == forward(m, x));
}

TEST_CASE("truncated or damaged checkpoints are rejected") {
  AcousticModel m = tiny_model();
  Checkpoint ckpt;
  ckpt.model = m;
  ckpt.adam = AdamState::zeros_like(m);
  auto bytes = serialize_checkpoint(ckpt);

  std::vector<uint8_t> truncated(bytes.begin(), bytes.end() - 40);
  CHECK_THROWS_AS(deserialize_checkpoint(truncated), CorruptCheckpoint);

  auto flipped = bytes;
  flipped[bytes.size() / 2] ^= 0xFF;
  CHECK_THROWS_AS(deserialize_checkpoint(flipped), CorruptCheckpoint);

  // a checksum-valid payload of an unknown version
  auto versioned = bytes;
  versioned[4] = 9;  // version field, little-endian
  uint32_t crc = static_cast<uint32_t>(crc32(
      0L, versioned.data() + 4, static_cast<uInt>(versioned.size() - 8)));
  for (int b = 0; b < 4; ++b)
    versioned[versioned.size() - 4 + b] = (crc >> (8 * b)) & 0xFF;
  CHECK_THROWS_AS(deserialize_checkpoint(versioned), VersionMismatch);
}

TEST_CASE("checkpoint file io") {
  AcousticModel m = tiny_model(4, 3, 33);
  Checkpoint ckpt;
  ckpt.model = m;
  ckpt.adam = AdamState::zeros_like(m);
  auto path = std::filesystem::temp_directory_path() / "lugasr_ckpt_test.bin";
  save_checkpoint(ckpt, path.string());
  Checkpoint back = load_checkpoint(path.string());
  CHECK(serialize_checkpoint(back) == serialize_checkpoint(ckpt));
  std::filesystem::remove(path);
}
