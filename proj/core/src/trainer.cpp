#include "lugasr/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace lugasr {

namespace {

Eigen::MatrixXd relu_grad_of(const Eigen::MatrixXd& z) {
  return z.unaryExpr(&clipped_relu_grad);
}

// Flat views over the parameter tensors, in visit_tensors order.
std::vector<std::pair<double*, size_t>> flat_views(auto& tensors) {
  std::vector<std::pair<double*, size_t>> views;
  visit_tensors(tensors, [&](const char*, auto& t) {
    views.emplace_back(t.data(), static_cast<size_t>(t.size()));
  });
  return views;
}

// Tensor indices (visit_tensors order) belonging to each layer id.
const std::vector<int>& layer_tensor_indices(int layer) {
  static const std::vector<std::vector<int>> table = {
      {0, 1},        // 1: w1 b1
      {2, 3},        // 2: w2 b2
      {4, 5},        // 3: w3 b3
      {6, 7, 8},     // 4: w4 w_rec b4
      {9, 10},       // 5: w5 b5
      {11, 12},      // 6: w6 b6
  };
  if (layer < 1 || layer > 6) throw Error("layer id must be in 1..6");
  return table[layer - 1];
}

void adam_step(AcousticModel& model, AdamState& adam, const ModelTensors& grads,
               const TrainConfig& cfg, const std::set<size_t>& frozen_tensors) {
  adam.step += 1;
  const double bc1 = 1.0 - std::pow(cfg.adam_beta1, static_cast<double>(adam.step));
  const double bc2 = 1.0 - std::pow(cfg.adam_beta2, static_cast<double>(adam.step));
  auto params = flat_views(model);
  auto g = flat_views(const_cast<ModelTensors&>(grads));
  auto m = flat_views(adam.m);
  auto v = flat_views(adam.v);
  for (size_t t = 0; t < params.size(); ++t) {
    if (frozen_tensors.count(t)) continue;
    double* p = params[t].first;
    const double* gp = g[t].first;
    double* mp = m[t].first;
    double* vp = v[t].first;
    for (size_t i = 0; i < params[t].second; ++i) {
      mp[i] = cfg.adam_beta1 * mp[i] + (1.0 - cfg.adam_beta1) * gp[i];
      vp[i] = cfg.adam_beta2 * vp[i] + (1.0 - cfg.adam_beta2) * gp[i] * gp[i];
      const double mhat = mp[i] / bc1;
      const double vhat = vp[i] / bc2;
      p[i] -= cfg.learning_rate * mhat / (std::sqrt(vhat) + cfg.adam_eps);
    }
  }
}

void accumulate(ModelTensors& into, const ModelTensors& grads) {
  auto a = flat_views(into);
  auto b = flat_views(const_cast<ModelTensors&>(grads));
  for (size_t t = 0; t < a.size(); ++t)
    for (size_t i = 0; i < a[t].second; ++i) a[t].first[i] += b[t].first[i];
}

void scale(ModelTensors& tensors, double factor) {
  auto views = flat_views(tensors);
  for (auto& [p, n] : views)
    for (size_t i = 0; i < n; ++i) p[i] *= factor;
}

double dataset_loss(const AcousticModel& model, const Dataset& set) {
  if (set.empty()) return std::numeric_limits<double>::quiet_NaN();
  double total = 0.0;
  for (const auto& utt : set) {
    auto logprobs = forward(model, utt.features);
    total += ctc_loss(logprobs, utt.label, model.alphabet.blank_index()).loss;
  }
  return total / static_cast<double>(set.size());
}

Eigen::MatrixXd apply_masking(const Eigen::MatrixXd& features,
                              const TrainConfig& cfg, Rng& rng) {
  if ((cfg.time_masks <= 0 || cfg.time_mask_width <= 0) &&
      (cfg.freq_masks <= 0 || cfg.freq_mask_width <= 0))
    return features;
  int tw = std::min<int>(cfg.time_mask_width, static_cast<int>(features.rows()));
  int fw = std::min<int>(cfg.freq_mask_width, static_cast<int>(features.cols()));
  return mask_augment(features, cfg.time_masks, tw, cfg.freq_masks, fw, rng);
}

TrainResult train_impl(AcousticModel model, AdamState adam, int start_epoch,
                       const TrainSession& session,
                       const std::set<int>& freeze_layers) {
  const TrainConfig& cfg = session.config;
  if (session.train_set.empty()) throw Error("training set is empty");
  if (cfg.batch_size < 1) throw Error("batch_size must be >= 1");
  model.check_consistent();
  for (const auto& utt : session.train_set)
    if (utt.features.cols() != model.w1.cols())
      throw IncompatibleFeatureDim(utt.features.cols(), model.w1.cols());

  std::set<size_t> frozen_tensors;
  for (int layer : freeze_layers)
    for (int idx : layer_tensor_indices(layer))
      frozen_tensors.insert(static_cast<size_t>(idx));

  // group audio of similar lengths: ascending by on-disk size, stable
  std::vector<size_t> order(session.train_set.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    return session.train_set[a].size_hint < session.train_set[b].size_hint;
  });

  Rng rng(cfg.seed);

  auto make_checkpoint = [&](int epoch) {
    Checkpoint ckpt;
    ckpt.model = model;
    ckpt.adam = adam;
    ckpt.epoch = epoch;
    ckpt.feature_config = session.feature_config;
    ckpt.feature_stats = session.feature_stats;
    return ckpt;
  };

  TrainResult result;
  double best_metric = std::numeric_limits<double>::infinity();
  result.best = make_checkpoint(start_epoch);
  result.best_epoch = start_epoch;

  for (int e = 0; e < cfg.epochs; ++e) {
    const int epoch = start_epoch + e + 1;
    double epoch_loss = 0.0;
    size_t seen = 0;
    for (size_t begin = 0; begin < order.size(); begin += cfg.batch_size) {
      const size_t end = std::min(order.size(),
                                  begin + static_cast<size_t>(cfg.batch_size));
      ModelTensors grads = ModelTensors::zeros_like(model);
      for (size_t i = begin; i < end; ++i) {
        const Utterance& utt = session.train_set[order[i]];
        Eigen::MatrixXd features = apply_masking(utt.features, cfg, rng);
        auto [loss, g] = backward(model, features, utt.label, cfg.dropout,
                                  cfg.dropout > 0.0 ? &rng : nullptr);
        if (!std::isfinite(loss)) throw DivergenceDetected(epoch);
        epoch_loss += loss;
        ++seen;
        accumulate(grads, g);
      }
      scale(grads, 1.0 / static_cast<double>(end - begin));
      adam_step(model, adam, grads, cfg, frozen_tensors);
    }

    EpochStats stats;
    stats.epoch = epoch;
    stats.train_loss = epoch_loss / static_cast<double>(seen);
    stats.dev_loss = dataset_loss(model, session.dev_set);
    if (!std::isfinite(stats.train_loss)) throw DivergenceDetected(epoch);
    result.log.push_back(stats);

    const double metric =
        session.dev_set.empty() ? stats.train_loss : stats.dev_loss;
    if (metric < best_metric) {
      best_metric = metric;
      result.best = make_checkpoint(epoch);
      result.best_epoch = epoch;
    }
    if (cfg.stop_at_train_loss > 0.0 &&
        stats.train_loss < cfg.stop_at_train_loss)
      break;
  }
  result.last = make_checkpoint(result.log.empty() ? start_epoch
                                                   : result.log.back().epoch);
  return result;
}

}  // namespace

std::pair<double, ModelTensors> backward(const AcousticModel& model,
                                         const Eigen::MatrixXd& x,
                                         const std::vector<int>& label,
                                         double dropout, Rng* rng) {
  ForwardTrace t = forward_trace(model, x, dropout, rng);
  CtcResult ctc = ctc_loss(t.logprobs, label, model.alphabet.blank_index());
  const bool training = rng != nullptr && dropout > 0.0;
  const Eigen::Index frames = x.rows();

  ModelTensors g = ModelTensors::zeros_like(model);

  // output layer
  const Eigen::MatrixXd& dlogits = ctc.grad_logits;
  g.w6 = dlogits.transpose() * t.out5;
  g.b6 = dlogits.colwise().sum();
  Eigen::MatrixXd dout5 = dlogits * model.w6;

  // layer 5
  Eigen::MatrixXd dz5 = training ? dout5.cwiseProduct(t.mask5) : dout5;
  dz5 = dz5.cwiseProduct(relu_grad_of(t.z5));
  g.w5 = dz5.transpose() * t.h4;
  g.b5 = dz5.colwise().sum();
  Eigen::MatrixXd dh4 = dz5 * model.w5;

  // recurrent layer, backward through time
  Eigen::MatrixXd dz4 = Eigen::MatrixXd::Zero(frames, model.w4.rows());
  for (Eigen::Index i = frames - 1; i >= 0; --i) {
    Eigen::VectorXd d = dh4.row(i).transpose();
    if (i + 1 < frames)
      d += model.w_rec.transpose() * dz4.row(i + 1).transpose();
    dz4.row(i) =
        d.cwiseProduct(relu_grad_of(t.z4.row(i)).transpose()).transpose();
  }
  g.w4 = dz4.transpose() * t.out3;
  g.b4 = dz4.colwise().sum();
  if (frames > 1)
    g.w_rec = dz4.bottomRows(frames - 1).transpose() * t.h4.topRows(frames - 1);
  Eigen::MatrixXd dout3 = dz4 * model.w4;

  // feed-forward stack
  auto hidden_backward = [&](const Eigen::MatrixXd& dout,
                             const Eigen::MatrixXd& z,
                             const Eigen::MatrixXd& mask,
                             const Eigen::MatrixXd& input,
                             const Eigen::MatrixXd& w, Eigen::MatrixXd& gw,
                             Eigen::VectorXd& gb) {
    Eigen::MatrixXd dz = training ? dout.cwiseProduct(mask) : dout;
    dz = dz.cwiseProduct(relu_grad_of(z));
    gw = dz.transpose() * input;
    gb = dz.colwise().sum();
    return Eigen::MatrixXd(dz * w);
  };
  Eigen::MatrixXd dout2 =
      hidden_backward(dout3, t.z3, t.mask3, t.out2, model.w3, g.w3, g.b3);
  Eigen::MatrixXd dout1 =
      hidden_backward(dout2, t.z2, t.mask2, t.out1, model.w2, g.w2, g.b2);
  hidden_backward(dout1, t.z1, t.mask1, t.input, model.w1, g.w1, g.b1);

  return {ctc.loss, std::move(g)};
}

TrainResult train(const AcousticModel& model, const TrainSession& session) {
  return train_impl(model, AdamState::zeros_like(model), 0, session, {});
}

TrainResult resume(const Checkpoint& from, const TrainSession& session) {
  return train_impl(from.model, from.adam, from.epoch, session, {});
}

TrainResult finetune(const Checkpoint& from, const Alphabet& new_alphabet,
                     const std::set<int>& freeze_layers,
                     const TrainSession& session) {
  if (!session.train_set.empty() &&
      session.train_set.front().features.cols() != from.model.w1.cols())
    throw IncompatibleFeatureDim(session.train_set.front().features.cols(),
                                 from.model.w1.cols());

  AcousticModel model = from.model;
  AdamState adam = from.adam;
  if (new_alphabet.num_classes() != model.alphabet.num_classes()) {
    Rng rng(session.config.seed);
    const Eigen::Index h5 = model.w5.rows();
    model.w6 = glorot_uniform(new_alphabet.num_classes(), h5, rng);
    model.b6 = Eigen::VectorXd::Zero(new_alphabet.num_classes());
    adam.m.w6 = Eigen::MatrixXd::Zero(new_alphabet.num_classes(), h5);
    adam.v.w6 = Eigen::MatrixXd::Zero(new_alphabet.num_classes(), h5);
    adam.m.b6 = Eigen::VectorXd::Zero(new_alphabet.num_classes());
    adam.v.b6 = Eigen::VectorXd::Zero(new_alphabet.num_classes());
  }
  model.alphabet = new_alphabet;

  if (session.config.epochs == 0 || session.train_set.empty()) {
    TrainResult result;
    Checkpoint ckpt;
    ckpt.model = model;
    ckpt.adam = adam;
    ckpt.epoch = from.epoch;
    ckpt.feature_config = session.feature_config;
    ckpt.feature_stats = session.feature_stats;
    result.best = ckpt;
    result.last = std::move(ckpt);
    result.best_epoch = from.epoch;
    return result;
  }
  return train_impl(std::move(model), std::move(adam), from.epoch, session,
                    freeze_layers);
}

}  // namespace lugasr
