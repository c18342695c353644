// Copyright 2026 The bgmtts Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef BGMTTS_NN_VAR_H_
#define BGMTTS_NN_VAR_H_

#include <functional>
#include <memory>
#include <vector>

#include "bgmtts/base/types.h"

namespace bgmtts::nn {

using Mat = RealMatrix;

// One value in a dynamically built computation graph. Interior nodes hold a
// closure that pushes their gradient into their inputs; leaves (parameters
// and constants) do not.
struct Node {
  Mat value;
  Mat grad;  // empty until something flows into it
  bool requires_grad = false;
  std::vector<std::shared_ptr<Node>> inputs;
  std::function<void(Node&)> backward;

  Mat& GradRef();  // allocates a zero gradient on first use
};

class Var {
 public:
  Var() = default;
  explicit Var(Mat value, bool requires_grad = false);

  const Mat& value() const { return node_->value; }
  Mat& mutable_value() { return node_->value; }
  const Mat& grad() const { return node_->grad; }
  bool requires_grad() const { return node_ && node_->requires_grad; }
  Eigen::Index rows() const { return node_->value.rows(); }
  Eigen::Index cols() const { return node_->value.cols(); }
  double scalar() const { return node_->value(0, 0); }
  bool defined() const { return node_ != nullptr; }
  void ZeroGrad();

  const std::shared_ptr<Node>& node() const { return node_; }

 private:
  std::shared_ptr<Node> node_;
};

// Builds an op result. When gradients are disabled or no input requires
// one, the closure is dropped and the result is a constant.
Var MakeResult(Mat value, std::vector<Var> inputs,
               std::function<void(Node&)> backward);

// Reverse-mode sweep from a 1x1 value. Gradients accumulate into leaves
// until they are cleared.
void Backward(const Var& loss);

bool GradEnabled();

// Disables graph recording on this thread for its lifetime.
class NoGradGuard {
 public:
  NoGradGuard();
  ~NoGradGuard();
  NoGradGuard(const NoGradGuard&) = delete;
  NoGradGuard& operator=(const NoGradGuard&) = delete;

 private:
  bool previous_;
};

}  // namespace bgmtts::nn

#endif  // BGMTTS_NN_VAR_H_
