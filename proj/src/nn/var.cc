// Copyright 2026 The bgmtts Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "bgmtts/nn/var.h"

#include <unordered_set>

#include "bgmtts/base/error.h"

namespace bgmtts::nn {

namespace {
thread_local bool grad_enabled = true;
}  // namespace

Mat& Node::GradRef() {
  if (grad.rows() != value.rows() || grad.cols() != value.cols())
    grad = Mat::Zero(value.rows(), value.cols());
  return grad;
}

Var::Var(Mat value, bool requires_grad) : node_(std::make_shared<Node>()) {
  node_->value = std::move(value);
  node_->requires_grad = requires_grad;
}

void Var::ZeroGrad() {
  if (node_ && node_->grad.size() > 0) node_->grad.setZero();
}

Var MakeResult(Mat value, std::vector<Var> inputs,
               std::function<void(Node&)> backward) {
  Var out(std::move(value));
  if (!grad_enabled) return out;
  bool any = false;
  for (const Var& in : inputs) any = any || in.requires_grad();
  if (!any) return out;
  Node& node = *out.node();
  node.requires_grad = true;
  node.backward = std::move(backward);
  node.inputs.reserve(inputs.size());
  for (Var& in : inputs) node.inputs.push_back(in.node());
  return out;
}

void Backward(const Var& loss) {
  if (loss.rows() != 1 || loss.cols() != 1)
    throw ArgumentError("Backward expects a scalar");
  if (!loss.requires_grad()) return;

  // Iterative post-order DFS gives a topological order.
  std::vector<Node*> order;
  std::unordered_set<Node*> seen;
  std::vector<std::pair<Node*, std::size_t>> stack;
  stack.emplace_back(loss.node().get(), 0);
  seen.insert(loss.node().get());
  while (!stack.empty()) {
    auto& [node, next] = stack.back();
    if (next < node->inputs.size()) {
      Node* child = node->inputs[next++].get();
      if (child->requires_grad && child->backward && !seen.count(child)) {
        seen.insert(child);
        stack.emplace_back(child, 0);
      }
      continue;
    }
    order.push_back(node);
    stack.pop_back();
  }

  loss.node()->GradRef()(0, 0) += 1.0;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    Node* node = *it;
    if (node->grad.size() == 0) continue;
    node->backward(*node);
    // Interior gradients are not needed once propagated.
    if (node != loss.node().get()) node->grad.resize(0, 0);
  }
}

bool GradEnabled() { return grad_enabled; }

NoGradGuard::NoGradGuard() : previous_(grad_enabled) { grad_enabled = false; }

NoGradGuard::~NoGradGuard() { grad_enabled = previous_; }

}  // namespace bgmtts::nn
