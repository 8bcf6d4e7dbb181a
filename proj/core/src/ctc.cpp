#include "lugasr/ctc.hpp"

#include <cmath>
#include <limits>

namespace lugasr {

namespace {

constexpr double kLogZero = -std::numeric_limits<double>::infinity();

double log_add(double a, double b) {
  if (a == kLogZero) return b;
  if (b == kLogZero) return a;
  double hi = std::max(a, b), lo = std::min(a, b);
  return hi + std::log1p(std::exp(lo - hi));
}

}  // namespace

size_t ctc_min_frames(const std::vector<int>& label) {
  size_t repeats = 0;
  for (size_t i = 1; i < label.size(); ++i)
    if (label[i] == label[i - 1]) ++repeats;
  return label.size() + repeats;
}

CtcResult ctc_loss(const Eigen::MatrixXd& logprobs,
                   const std::vector<int>& label, int blank) {
  const Eigen::Index frames = logprobs.rows();
  const Eigen::Index classes = logprobs.cols();
  if (blank < 0 || blank >= classes)
    throw Error("blank index out of range");
  for (int s : label) {
    if (s < 0 || s >= classes) throw Error("label symbol out of range");
    if (s == blank) throw Error("label must not contain the blank symbol");
  }
  const size_t required = ctc_min_frames(label);
  if (static_cast<size_t>(frames) < required || frames == 0)
    throw InfeasibleAlignment(frames, std::max<size_t>(required, 1));

  // augmented state sequence: blank, l1, blank, l2, ..., blank
  const Eigen::Index n_states = 2 * static_cast<Eigen::Index>(label.size()) + 1;
  auto state_sym = [&](Eigen::Index s) {
    return s % 2 == 0 ? blank : label[static_cast<size_t>(s / 2)];
  };
  auto can_skip = [&](Eigen::Index s) {
    // entering state s from s-2 is allowed unless s is blank or repeats s-2
    return s >= 2 && state_sym(s) != blank && state_sym(s) != state_sym(s - 2);
  };

  Eigen::MatrixXd alpha =
      Eigen::MatrixXd::Constant(frames, n_states, kLogZero);
  alpha(0, 0) = logprobs(0, blank);
  if (n_states > 1) alpha(0, 1) = logprobs(0, state_sym(1));
  for (Eigen::Index t = 1; t < frames; ++t) {
    for (Eigen::Index s = 0; s < n_states; ++s) {
      double acc = alpha(t - 1, s);
      if (s >= 1) acc = log_add(acc, alpha(t - 1, s - 1));
      if (can_skip(s)) acc = log_add(acc, alpha(t - 1, s - 2));
      if (acc == kLogZero) continue;
      alpha(t, s) = acc + logprobs(t, state_sym(s));
    }
  }
  double log_p = alpha(frames - 1, n_states - 1);
  if (n_states > 1) log_p = log_add(log_p, alpha(frames - 1, n_states - 2));

  Eigen::MatrixXd beta = Eigen::MatrixXd::Constant(frames, n_states, kLogZero);
  beta(frames - 1, n_states - 1) = 0.0;
  if (n_states > 1) beta(frames - 1, n_states - 2) = 0.0;
  for (Eigen::Index t = frames - 2; t >= 0; --t) {
    for (Eigen::Index s = 0; s < n_states; ++s) {
      double acc = kLogZero;
      if (beta(t + 1, s) != kLogZero)
        acc = log_add(acc, beta(t + 1, s) + logprobs(t + 1, state_sym(s)));
      if (s + 1 < n_states && beta(t + 1, s + 1) != kLogZero)
        acc = log_add(acc, beta(t + 1, s + 1) + logprobs(t + 1, state_sym(s + 1)));
      if (s + 2 < n_states && can_skip(s + 2) && beta(t + 1, s + 2) != kLogZero)
        acc = log_add(acc, beta(t + 1, s + 2) + logprobs(t + 1, state_sym(s + 2)));
      beta(t, s) = acc;
    }
  }

  CtcResult result;
  result.loss = -log_p;
  result.grad_logits.resize(frames, classes);
  for (Eigen::Index t = 0; t < frames; ++t) {
    // per-class occupancy q[t][k] = sum over states with symbol k
    Eigen::VectorXd occupancy = Eigen::VectorXd::Constant(classes, kLogZero);
    for (Eigen::Index s = 0; s < n_states; ++s) {
      double g = alpha(t, s) + beta(t, s);
      if (g == kLogZero) continue;
      int k = state_sym(s);
      occupancy[k] = log_add(occupancy[k], g);
    }
    for (Eigen::Index k = 0; k < classes; ++k) {
      double q = occupancy[k] == kLogZero ? 0.0 : std::exp(occupancy[k] - log_p);
      result.grad_logits(t, k) = std::exp(logprobs(t, k)) - q;
    }
  }
  return result;
}

}  // namespace lugasr
