// Copyright 2026 The bgmtts Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "bgmtts/nn/optim.h"

#include <cmath>

namespace bgmtts::nn {

void to_json(nlohmann::json& j, const AdamConfig& c) {
  j = {{"lr", c.lr}, {"beta1", c.beta1}, {"beta2", c.beta2},
       {"eps", c.eps}, {"clip_norm", c.clip_norm}};
}

void from_json(const nlohmann::json& j, AdamConfig& c) {
  c.lr = j.value("lr", c.lr);
  c.beta1 = j.value("beta1", c.beta1);
  c.beta2 = j.value("beta2", c.beta2);
  c.eps = j.value("eps", c.eps);
  c.clip_norm = j.value("clip_norm", c.clip_norm);
}

Adam::Adam(const ParameterSet& params, AdamConfig config) : config_(config) {
  for (const auto& p : params.parameters()) {
    m_.push_back(Mat::Zero(p.var.rows(), p.var.cols()));
    v_.push_back(Mat::Zero(p.var.rows(), p.var.cols()));
  }
}

void Adam::Step(ParameterSet& params) {
  ++step_;
  double scale = 1.0;
  if (config_.clip_norm > 0.0) {
    const double norm = params.GradNorm();
    if (norm > config_.clip_norm) scale = config_.clip_norm / norm;
  }
  const double c1 = 1.0 - std::pow(config_.beta1, static_cast<double>(step_));
  const double c2 = 1.0 - std::pow(config_.beta2, static_cast<double>(step_));
  const auto& list = params.parameters();
  for (std::size_t i = 0; i < list.size(); ++i) {
    Var v = list[i].var;
    if (v.grad().size() == 0) continue;
    const Mat g = v.grad() * scale;
    m_[i] = config_.beta1 * m_[i] + (1.0 - config_.beta1) * g;
    v_[i] = config_.beta2 * v_[i] + (1.0 - config_.beta2) * g.cwiseAbs2();
    v.mutable_value().array() -=
        config_.lr * (m_[i].array() / c1) / ((v_[i].array() / c2).sqrt() + config_.eps);
  }
}

}  // namespace bgmtts::nn
