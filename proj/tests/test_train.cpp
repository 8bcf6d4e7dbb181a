#include <doctest.h>

#include <cmath>

#include "lugasr/decoder.hpp"
#include "lugasr/trainer.hpp"
#include "oracles.hpp"

using namespace lugasr;

namespace {

Alphabet tiny_alphabet() { return Alphabet(std::string("abcd")); }

AcousticModel tiny_model(int input_dim, int hidden, uint64_t seed) {
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

// each symbol gets its own distinctive input pattern, repeated over frames
Dataset pattern_dataset(const std::vector<std::vector<int>>& labels,
                        int frames_per_symbol, int dim, uint64_t seed) {
  Dataset set;
  lugasr::Rng rng(seed);
  std::vector<Eigen::RowVectorXd> patterns;
  for (int s = 0; s < 8; ++s) {
    Eigen::RowVectorXd p(dim);
    for (int d = 0; d < dim; ++d) p[d] = 2.0 * uniform_unit(rng) - 1.0;
    patterns.push_back(p);
  }
  uint64_t size_hint = 100;
  for (const auto& label : labels) {
    Utterance utt;
    utt.label = label;
    utt.features.resize(static_cast<Eigen::Index>(label.size()) *
                            frames_per_symbol,
                        dim);
    Eigen::Index row = 0;
    for (int s : label)
      for (int f = 0; f < frames_per_symbol; ++f)
        utt.features.row(row++) = patterns[static_cast<size_t>(s)];
    utt.size_hint = size_hint;
    size_hint += 50;
    set.push_back(std::move(utt));
  }
  return set;
}

}  // namespace

TEST_CASE("learning rate zero leaves parameters untouched") {
  AcousticModel model = tiny_model(4, 4, 7);
  TrainSession session;
  session.train_set = pattern_dataset({{0, 1}, {2, 3}}, 3, 4, 9);
  session.config.learning_rate = 0.0;
  session.config.dropout = 0.0;
  session.config.epochs = 4;
  auto result = train(model, session);
  CHECK(result.last.model.w1 == model.w1);
  CHECK(result.last.model.w_rec == model.w_rec);
  CHECK(result.last.model.b6 == model.b6);
  CHECK(result.log.size() == 4);
}

TEST_CASE("fixed seed gives a bit-identical loss curve") {
  AcousticModel model = tiny_model(4, 4, 7);
  TrainSession session;
  session.train_set = pattern_dataset({{0, 1}, {2}, {3, 1, 0}}, 3, 4, 9);
  session.dev_set = session.train_set;
  session.config.learning_rate = 1e-3;
  session.config.dropout = 0.1;
  session.config.time_masks = 1;
  session.config.time_mask_width = 2;
  session.config.epochs = 5;
  session.config.seed = 123;
  auto a = train(model, session);
  auto b = train(model, session);
  REQUIRE(a.log.size() == b.log.size());
  for (size_t i = 0; i < a.log.size(); ++i) {
    CHECK(a.log[i].train_loss == b.log[i].train_loss);
    CHECK(a.log[i].dev_loss == b.log[i].dev_loss);
  }
}

TEST_CASE("training reduces the loss and overfits tiny data") {
  AcousticModel model = tiny_model(4, 16, 3);
  TrainSession session;
  session.train_set = pattern_dataset({{0, 1}, {2, 3}, {1, 2, 0}}, 4, 4, 5);
  session.config.learning_rate = 3e-3;
  session.config.dropout = 0.0;
  session.config.epochs = 150;
  session.config.stop_at_train_loss = 0.05;
  auto result = train(model, session);
  CHECK(result.log.back().train_loss < 0.05);
  CHECK(result.log.size() < 150);

  for (const auto& utt : session.train_set) {
    auto lp = forward(result.last.model, utt.features);
    CHECK(greedy_decode(lp, result.last.model.alphabet) ==
          result.last.model.alphabet.decode(utt.label));
  }
}

TEST_CASE("resume continues the epoch counter and the curve") {
  AcousticModel model = tiny_model(4, 8, 3);
  TrainSession session;
  session.train_set = pattern_dataset({{0, 1}, {2, 3}}, 3, 4, 5);
  session.config.learning_rate = 1e-3;
  session.config.dropout = 0.0;
  session.config.epochs = 6;

  auto full = train(model, session);

  TrainSession first_half = session;
  first_half.config.epochs = 3;
  auto part1 = train(model, first_half);
  auto part2 = resume(part1.last, first_half);
  CHECK(part2.log.back().epoch == 6);
  // Adam moments carried over: the continued curve matches the single run
  CHECK(part2.log.back().train_loss ==
        doctest::Approx(full.log.back().train_loss).epsilon(1e-12));
}

TEST_CASE("divergence is reported, not propagated as NaN") {
  AcousticModel model = tiny_model(4, 4, 7);
  visit_tensors(model, [](const char*, auto& t) {
    t.setConstant(1e308);  // force overflow in the first forward pass
  });
  TrainSession session;
  session.train_set = pattern_dataset({{0, 1}}, 3, 4, 9);
  session.config.epochs = 1;
  session.config.dropout = 0.0;
  CHECK_THROWS_AS(train(model, session), DivergenceDetected);
}

TEST_CASE("finetune: same alphabet with all layers frozen is the identity") {
  AcousticModel model = tiny_model(4, 4, 7);
  TrainSession session;
  session.train_set = pattern_dataset({{0, 1}, {2}}, 3, 4, 9);
  session.config.epochs = 3;
  session.config.dropout = 0.0;
  session.config.learning_rate = 1e-2;
  auto start = train(model, session);

  auto frozen = finetune(start.last, tiny_alphabet(), {1, 2, 3, 4, 5, 6},
                         session);
  CHECK(frozen.last.model.w1 == start.last.model.w1);
  CHECK(frozen.last.model.w_rec == start.last.model.w_rec);
  CHECK(frozen.last.model.w6 == start.last.model.w6);
  CHECK(frozen.last.model.b6 == start.last.model.b6);
}

TEST_CASE("finetune to a wider alphabet reinitializes only the output layer") {
  AcousticModel model = tiny_model(4, 4, 7);
  TrainSession session;
  session.train_set = pattern_dataset({{0, 1}}, 3, 4, 9);
  session.config.epochs = 0;  // no steps: inspect the state right after setup
  Checkpoint start;
  start.model = model;
  start.adam = AdamState::zeros_like(model);
  start.adam.m.w6.setConstant(0.5);

  Alphabet wider(std::string("abcde"));
  auto result = finetune(start, wider, {}, session);
  CHECK(result.last.model.alphabet == wider);
  CHECK(result.last.model.w6.rows() == wider.num_classes());
  CHECK(result.last.model.b6.size() == wider.num_classes());
  CHECK(result.last.adam.m.w6.isZero());
  // everything below the output layer is bit-identical
  CHECK(result.last.model.w1 == model.w1);
  CHECK(result.last.model.w2 == model.w2);
  CHECK(result.last.model.w3 == model.w3);
  CHECK(result.last.model.w4 == model.w4);
  CHECK(result.last.model.w_rec == model.w_rec);
  CHECK(result.last.model.w5 == model.w5);
}

TEST_CASE("finetune rejects mismatched feature dimensions") {
  AcousticModel model = tiny_model(4, 4, 7);
  Checkpoint start;
  start.model = model;
  start.adam = AdamState::zeros_like(model);
  TrainSession session;
  session.train_set = pattern_dataset({{0, 1}}, 3, 6, 9);  // dim 6 != 4
  session.config.epochs = 1;
  CHECK_THROWS_AS(finetune(start, tiny_alphabet(), {}, session),
                  IncompatibleFeatureDim);
}

TEST_CASE("finetuning on related data converges faster than cold start") {
  const int dim = 4, hidden = 16;
  AcousticModel model = tiny_model(dim, hidden, 3);
  TrainConfig cfg;
  cfg.learning_rate = 3e-3;
  cfg.dropout = 0.0;
  cfg.epochs = 400;
  cfg.stop_at_train_loss = 0.1;

  TrainSession pretrain;
  pretrain.train_set = pattern_dataset({{0, 1}, {2, 3}, {1, 2}}, 4, dim, 5);
  pretrain.config = cfg;
  auto base = train(model, pretrain);
  REQUIRE(base.log.back().train_loss < 0.1);

  TrainSession next;
  next.train_set = pattern_dataset({{3, 0}, {1, 3}, {2, 0, 1}}, 4, dim, 5);
  next.config = cfg;

  auto warm = finetune(base.last, tiny_alphabet(), {}, next);
  auto cold = train(tiny_model(dim, hidden, 3), next);
  REQUIRE(warm.log.back().train_loss < 0.1);
  REQUIRE(cold.log.back().train_loss < 0.1);
  CHECK(warm.log.size() < cold.log.size());
}
