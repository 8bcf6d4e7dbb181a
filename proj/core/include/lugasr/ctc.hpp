#pragma once

#include <Eigen/Core>
#include <vector>

#include "lugasr/errors.hpp"

namespace lugasr {

class InfeasibleAlignment : public Error {
 public:
  InfeasibleAlignment(size_t frames, size_t required)
      : Error("CTC alignment infeasible: " + std::to_string(frames) +
              " frames < required minimum " + std::to_string(required)),
        frames(frames),
        required(required) {}
  size_t frames;
  size_t required;
};

// Shortest frame count that can emit `label`: its length plus one blank
// between every adjacent repeated pair.
size_t ctc_min_frames(const std::vector<int>& label);

struct CtcResult {
  double loss = 0.0;                // -log P(label | logprobs)
  Eigen::MatrixXd grad_logits;      // T x K, gradient wrt pre-softmax logits
};

// Forward-backward over the 2|label|+1 augmented state lattice, in log
// space. `logprobs` rows must be log-softmax (the gradient formula
// grad = softmax - occupancy assumes it). The empty label is the all-blank
// path. Throws InfeasibleAlignment when T < ctc_min_frames(label).
CtcResult ctc_loss(const Eigen::MatrixXd& logprobs, const std::vector<int>& label,
                   int blank);

}  // namespace lugasr
