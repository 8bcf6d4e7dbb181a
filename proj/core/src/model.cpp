#include "lugasr/model.hpp"

#include <cmath>

namespace lugasr {

Eigen::MatrixXd glorot_uniform(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(rows + cols));
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c)
      m(r, c) = uniform_real(rng, -limit, limit);
  return m;
}

AcousticModel AcousticModel::init(const LayerSizes& sizes,
                                  const Alphabet& alphabet, uint64_t seed) {
  if (sizes.classes != alphabet.num_classes())
    throw ShapeMismatch("classes must equal alphabet symbols + blank");
  if (sizes.input <= 0) throw ShapeMismatch("input dimension must be positive");
  Rng rng(seed);
  AcousticModel m;
  m.alphabet = alphabet;
  m.w1 = glorot_uniform(sizes.h1, sizes.input, rng);
  m.b1 = Eigen::VectorXd::Zero(sizes.h1);
  m.w2 = glorot_uniform(sizes.h2, sizes.h1, rng);
  m.b2 = Eigen::VectorXd::Zero(sizes.h2);
  m.w3 = glorot_uniform(sizes.h3, sizes.h2, rng);
  m.b3 = Eigen::VectorXd::Zero(sizes.h3);
  m.w4 = glorot_uniform(sizes.h_rec, sizes.h3, rng);
  m.w_rec = glorot_uniform(sizes.h_rec, sizes.h_rec, rng);
  m.b4 = Eigen::VectorXd::Zero(sizes.h_rec);
  m.w5 = glorot_uniform(sizes.h5, sizes.h_rec, rng);
  m.b5 = Eigen::VectorXd::Zero(sizes.h5);
  m.w6 = glorot_uniform(sizes.classes, sizes.h5, rng);
  m.b6 = Eigen::VectorXd::Zero(sizes.classes);
  return m;
}

LayerSizes AcousticModel::sizes() const {
  LayerSizes s;
  s.input = static_cast<int>(w1.cols());
  s.h1 = static_cast<int>(w1.rows());
  s.h2 = static_cast<int>(w2.rows());
  s.h3 = static_cast<int>(w3.rows());
  s.h_rec = static_cast<int>(w4.rows());
  s.h5 = static_cast<int>(w5.rows());
  s.classes = static_cast<int>(w6.rows());
  return s;
}

void AcousticModel::check_consistent() const {
  LayerSizes s = sizes();
  auto expect = [](bool ok, const char* what) {
    if (!ok) throw ShapeMismatch(what);
  };
  expect(w2.cols() == s.h1, "w2 input dim != h1");
  expect(w3.cols() == s.h2, "w3 input dim != h2");
  expect(w4.cols() == s.h3, "w4 input dim != h3");
  expect(w_rec.rows() == s.h_rec && w_rec.cols() == s.h_rec,
         "w_rec must be h_rec x h_rec");
  expect(w5.cols() == s.h_rec, "w5 input dim != h_rec");
  expect(w6.cols() == s.h5, "w6 input dim != h5");
  expect(b1.size() == s.h1 && b2.size() == s.h2 && b3.size() == s.h3 &&
             b4.size() == s.h_rec && b5.size() == s.h5 && b6.size() == s.classes,
         "bias sizes inconsistent with weights");
  expect(s.classes == alphabet.num_classes(),
         "output classes != alphabet symbols + blank");
  bool finite = true;
  visit_tensors(*this, [&](const char*, const auto& t) {
    finite = finite && t.allFinite();
  });
  expect(finite, "model contains non-finite values");
}

namespace {

Eigen::MatrixXd dropout_mask(Eigen::Index rows, Eigen::Index cols,
                             double dropout, Rng& rng) {
  const double keep = 1.0 - dropout;
  Eigen::MatrixXd mask(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c)
      mask(r, c) = uniform_unit(rng) < keep ? 1.0 / keep : 0.0;
  return mask;
}

Eigen::MatrixXd affine(const Eigen::MatrixXd& input, const Eigen::MatrixXd& w,
                       const Eigen::VectorXd& b) {
  return (input * w.transpose()).rowwise() + b.transpose();
}

}  // namespace

ForwardTrace forward_trace(const AcousticModel& model, const Eigen::MatrixXd& x,
                           double dropout, Rng* rng) {
  if (x.cols() != model.w1.cols())
    throw ShapeMismatch("input dimension " + std::to_string(x.cols()) +
                        " != model input " + std::to_string(model.w1.cols()));
  const bool training = rng != nullptr && dropout > 0.0;
  ForwardTrace t;
  t.input = x;

  auto hidden = [&](const Eigen::MatrixXd& in, const Eigen::MatrixXd& w,
                    const Eigen::VectorXd& b, Eigen::MatrixXd& z,
                    Eigen::MatrixXd& out, Eigen::MatrixXd& mask) {
    z = affine(in, w, b);
    out = z.unaryExpr(&clipped_relu);
    if (training) {
      mask = dropout_mask(out.rows(), out.cols(), dropout, *rng);
      out = out.cwiseProduct(mask);
    }
  };

  hidden(t.input, model.w1, model.b1, t.z1, t.out1, t.mask1);
  hidden(t.out1, model.w2, model.b2, t.z2, t.out2, t.mask2);
  hidden(t.out2, model.w3, model.b3, t.z3, t.out3, t.mask3);

  const Eigen::Index frames = x.rows();
  const Eigen::Index h_rec = model.w4.rows();
  t.z4.resize(frames, h_rec);
  t.h4.resize(frames, h_rec);
  Eigen::VectorXd prev = Eigen::VectorXd::Zero(h_rec);
  for (Eigen::Index i = 0; i < frames; ++i) {
    Eigen::VectorXd z = model.w4 * t.out3.row(i).transpose() +
                        model.w_rec * prev + model.b4;
    t.z4.row(i) = z.transpose();
    prev = z.unaryExpr(&clipped_relu);
    t.h4.row(i) = prev.transpose();
  }

  hidden(t.h4, model.w5, model.b5, t.z5, t.out5, t.mask5);
  t.logits = affine(t.out5, model.w6, model.b6);

  t.logprobs.resizeLike(t.logits);
  for (Eigen::Index i = 0; i < frames; ++i) {
    double mx = t.logits.row(i).maxCoeff();
    double lse = mx + std::log((t.logits.row(i).array() - mx).exp().sum());
    t.logprobs.row(i) = t.logits.row(i).array() - lse;
  }
  return t;
}

Eigen::MatrixXd forward(const AcousticModel& model, const Eigen::MatrixXd& x) {
  return forward_trace(model, x, 0.0, nullptr).logprobs;
}

ModelTensors ModelTensors::zeros_like(const AcousticModel& model) {
  ModelTensors g;
  g.w1 = Eigen::MatrixXd::Zero(model.w1.rows(), model.w1.cols());
  g.w2 = Eigen::MatrixXd::Zero(model.w2.rows(), model.w2.cols());
  g.w3 = Eigen::MatrixXd::Zero(model.w3.rows(), model.w3.cols());
  g.w4 = Eigen::MatrixXd::Zero(model.w4.rows(), model.w4.cols());
  g.w_rec = Eigen::MatrixXd::Zero(model.w_rec.rows(), model.w_rec.cols());
  g.w5 = Eigen::MatrixXd::Zero(model.w5.rows(), model.w5.cols());
  g.w6 = Eigen::MatrixXd::Zero(model.w6.rows(), model.w6.cols());
  g.b1 = Eigen::VectorXd::Zero(model.b1.size());
  g.b2 = Eigen::VectorXd::Zero(model.b2.size());
  g.b3 = Eigen::VectorXd::Zero(model.b3.size());
  g.b4 = Eigen::VectorXd::Zero(model.b4.size());
  g.b5 = Eigen::VectorXd::Zero(model.b5.size());
  g.b6 = Eigen::VectorXd::Zero(model.b6.size());
  return g;
}

AdamState AdamState::zeros_like(const AcousticModel& model) {
  AdamState s;
  s.m = ModelTensors::zeros_like(model);
  s.v = ModelTensors::zeros_like(model);
  s.step = 0;
  return s;
}

}  // namespace lugasr
