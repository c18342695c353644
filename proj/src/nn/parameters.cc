// Copyright 2026 The bgmtts Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "bgmtts/nn/parameters.h"

#include <cmath>

#include "bgmtts/base/error.h"

namespace bgmtts::nn {

Var ParameterSet::Add(const std::string& name, Mat init) {
  if (index_.count(name) || buffers_.count(name))
    throw ArgumentError("duplicate parameter name " + name);
  Var v(std::move(init), true);
  index_[name] = params_.size();
  params_.push_back({name, v});
  return v;
}

Var ParameterSet::AddXavier(const std::string& name, Eigen::Index rows,
                            Eigen::Index cols, double fan_in, double fan_out) {
  const double limit = std::sqrt(6.0 / (fan_in + fan_out));
  std::uniform_real_distribution<double> dist(-limit, limit);
  Mat init(rows, cols);
  for (Eigen::Index i = 0; i < init.size(); ++i) init.data()[i] = dist(rng_);
  return Add(name, std::move(init));
}

Var ParameterSet::AddZeros(const std::string& name, Eigen::Index rows,
                           Eigen::Index cols) {
  return Add(name, Mat::Zero(rows, cols));
}

Var ParameterSet::AddConstant(const std::string& name, Eigen::Index rows,
                              Eigen::Index cols, double value) {
  return Add(name, Mat::Constant(rows, cols, value));
}

Mat* ParameterSet::AddBuffer(const std::string& name, Mat init) {
  if (index_.count(name) || buffers_.count(name))
    throw ArgumentError("duplicate buffer name " + name);
  return &(buffers_[name] = std::move(init));
}

Var ParameterSet::Find(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) throw ArgumentError("no parameter named " + name);
  return params_[it->second].var;
}

void ParameterSet::ZeroGrad() {
  for (auto& p : params_) {
    Var v = p.var;
    v.ZeroGrad();
  }
}

std::size_t ParameterSet::NumScalars() const {
  std::size_t n = 0;
  for (const auto& p : params_) n += static_cast<std::size_t>(p.var.value().size());
  return n;
}

double ParameterSet::GradNorm() const {
  double sq = 0.0;
  for (const auto& p : params_)
    if (p.var.grad().size() > 0) sq += p.var.grad().squaredNorm();
  return std::sqrt(sq);
}

bool ParameterSet::AllFinite() const {
  for (const auto& p : params_)
    if (!p.var.value().allFinite()) return false;
  return true;
}

}  // namespace bgmtts::nn
