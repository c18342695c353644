// Copyright 2026 The bgmtts Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef BGMTTS_NN_PARAMETERS_H_
#define BGMTTS_NN_PARAMETERS_H_

#include <cstdint>
#include <map>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "bgmtts/nn/var.h"

namespace bgmtts::nn {

struct NamedParameter {
  std::string name;
  Var var;
};

// Owns every trainable tensor of a model plus non-trainable buffers
// (normalisation statistics). Names are unique and insertion ordered.
class ParameterSet {
 public:
  explicit ParameterSet(std::uint64_t seed = 0) : rng_(seed) {}

  Var Add(const std::string& name, Mat init);
  // Uniform(-a, a) with a = sqrt(6 / (fan_in + fan_out)).
  Var AddXavier(const std::string& name, Eigen::Index rows, Eigen::Index cols,
                double fan_in, double fan_out);
  Var AddZeros(const std::string& name, Eigen::Index rows, Eigen::Index cols);
  Var AddConstant(const std::string& name, Eigen::Index rows, Eigen::Index cols,
                  double value);
  Mat* AddBuffer(const std::string& name, Mat init);

  const std::vector<NamedParameter>& parameters() const { return params_; }
  std::map<std::string, Mat>& buffers() { return buffers_; }
  const std::map<std::string, Mat>& buffers() const { return buffers_; }

  Var Find(const std::string& name) const;
  void ZeroGrad();
  std::size_t NumScalars() const;
  double GradNorm() const;
  bool AllFinite() const;

  std::mt19937_64& rng() { return rng_; }

 private:
  std::vector<NamedParameter> params_;
  std::map<std::string, std::size_t> index_;
  std::map<std::string, Mat> buffers_;
  std::mt19937_64 rng_;
};

}  // namespace bgmtts::nn

#endif  // BGMTTS_NN_PARAMETERS_H_
