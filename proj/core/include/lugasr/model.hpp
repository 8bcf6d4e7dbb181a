#pragma once

#include <Eigen/Core>
#include <cstdint>

#include "lugasr/alphabet.hpp"
#include "lugasr/errors.hpp"
#include "lugasr/rng.hpp"

namespace lugasr {

class ShapeMismatch : public Error {
 public:
  explicit ShapeMismatch(const std::string& what) : Error(what) {}
};

struct LayerSizes {
  int input = 0;    // stacked feature dimension
  int h1 = 128;
  int h2 = 128;
  int h3 = 128;
  int h_rec = 128;  // forward-recurrent layer
  int h5 = 128;
  int classes = 0;  // alphabet symbols + blank

  bool operator==(const LayerSizes&) const = default;
};

// Hidden activation used by every layer except the output logits.
inline double clipped_relu(double z) { return std::min(std::max(0.0, z), 20.0); }
inline double clipped_relu_grad(double z) { return z > 0.0 && z < 20.0 ? 1.0 : 0.0; }

// Six-stage network: three feed-forward layers, one forward-recurrent
// layer, one feed-forward layer, and output logits over the alphabet plus
// blank. Weight matrices map layer input to output (rows = output units).
struct AcousticModel {
  Eigen::MatrixXd w1, w2, w3, w4, w_rec, w5, w6;
  Eigen::VectorXd b1, b2, b3, b4, b5, b6;
  Alphabet alphabet = Alphabet::english();

  static AcousticModel init(const LayerSizes& sizes, const Alphabet& alphabet,
                            uint64_t seed);

  LayerSizes sizes() const;
  void check_consistent() const;  // shapes and finiteness
};

// Glorot-uniform init used for fresh models and reinitialized output layers.
Eigen::MatrixXd glorot_uniform(Eigen::Index rows, Eigen::Index cols, Rng& rng);

// Cached per-layer state of one forward pass, enough to backpropagate.
// Dropout masks already include the 1/keep scaling; they are empty matrices
// in inference mode.
struct ForwardTrace {
  Eigen::MatrixXd input;                    // T x D
  Eigen::MatrixXd z1, out1, z2, out2, z3, out3;  // outN = post-dropout
  Eigen::MatrixXd z4, h4;                   // recurrent layer, no dropout
  Eigen::MatrixXd z5, out5;
  Eigen::MatrixXd logits;                   // T x K
  Eigen::MatrixXd logprobs;                 // log-softmax rows
  Eigen::MatrixXd mask1, mask2, mask3, mask5;
};

// Training-mode pass when rng is non-null (inverted dropout after layers
// 1, 2, 3 and 5); deterministic inference pass otherwise.
ForwardTrace forward_trace(const AcousticModel& model, const Eigen::MatrixXd& x,
                           double dropout, Rng* rng);

// Per-frame log-probabilities (T x K), inference mode.
Eigen::MatrixXd forward(const AcousticModel& model, const Eigen::MatrixXd& x);

// Model-shaped tensor bundle used for gradients and Adam moments.
struct ModelTensors {
  Eigen::MatrixXd w1, w2, w3, w4, w_rec, w5, w6;
  Eigen::VectorXd b1, b2, b3, b4, b5, b6;

  static ModelTensors zeros_like(const AcousticModel& model);
};

struct AdamState {
  ModelTensors m;
  ModelTensors v;
  int64_t step = 0;

  static AdamState zeros_like(const AcousticModel& model);
};

// Applies `fn(name, tensor)` to every parameter tensor in a fixed order
// (the checkpoint serialization order).
template <typename Model, typename Fn>
void visit_tensors(Model& m, Fn&& fn) {
  fn("w1", m.w1);
  fn("b1", m.b1);
  fn("w2", m.w2);
  fn("b2", m.b2);
  fn("w3", m.w3);
  fn("b3", m.b3);
  fn("w4", m.w4);
  fn("w_rec", m.w_rec);
  fn("b4", m.b4);
  fn("w5", m.w5);
  fn("b5", m.b5);
  fn("w6", m.w6);
  fn("b6", m.b6);
}

}  // namespace lugasr
