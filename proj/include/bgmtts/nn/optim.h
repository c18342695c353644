// Copyright 2026 The bgmtts Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef BGMTTS_NN_OPTIM_H_
#define BGMTTS_NN_OPTIM_H_

#include <cstdint>
#include <vector>

#include <nlohmann/json.hpp>

#include "bgmtts/nn/parameters.h"

namespace bgmtts::nn {

struct AdamConfig {
  double lr = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double clip_norm = 0.0;  // global gradient-norm clip, 0 disables
};

void to_json(nlohmann::json& j, const AdamConfig& c);
void from_json(const nlohmann::json& j, AdamConfig& c);

class Adam {
 public:
  Adam(const ParameterSet& params, AdamConfig config);

  // Applies one update from the accumulated gradients; parameters without
  // a gradient are left untouched.
  void Step(ParameterSet& params);

  const AdamConfig& config() const { return config_; }
  std::int64_t step() const { return step_; }
  std::vector<Mat>& first_moments() { return m_; }
  std::vector<Mat>& second_moments() { return v_; }
  void set_step(std::int64_t step) { step_ = step; }

 private:
  AdamConfig config_;
  std::int64_t step_ = 0;
  std::vector<Mat> m_, v_;
};

}  // namespace bgmtts::nn

#endif  // BGMTTS_NN_OPTIM_H_
