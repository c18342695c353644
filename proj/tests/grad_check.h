// Copyright 2026 The bgmtts Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef BGMTTS_TESTS_GRAD_CHECK_H_
#define BGMTTS_TESTS_GRAD_CHECK_H_

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "bgmtts/nn/var.h"

namespace bgmtts::testing {

// Central-difference check of d loss / d leaf for every leaf. Returns the
// largest relative error ||analytic - numeric|| / (||analytic|| + ||numeric||)
// across leaves. `loss` must rebuild the graph from the current leaf values.
inline double MaxGradientError(const std::function<nn::Var()>& loss,
                               std::vector<nn::Var> leaves, double step = 1e-3) {
  for (auto& leaf : leaves) leaf.ZeroGrad();
  nn::Backward(loss());
  double worst = 0.0;
  for (auto& leaf : leaves) {
    const nn::Mat analytic =
        leaf.grad().size() ? leaf.grad() : nn::Mat::Zero(leaf.rows(), leaf.cols());
    nn::Mat numeric(leaf.rows(), leaf.cols());
    nn::Mat& value = leaf.mutable_value();
    for (Eigen::Index i = 0; i < value.size(); ++i) {
      const double keep = value.data()[i];
      value.data()[i] = keep + step;
      double up;
      {
        nn::NoGradGuard guard;
        up = loss().scalar();
      }
      value.data()[i] = keep - step;
      double down;
      {
        nn::NoGradGuard guard;
        down = loss().scalar();
      }
      value.data()[i] = keep;
      numeric.data()[i] = (up - down) / (2.0 * step);
    }
    const double denom = analytic.norm() + numeric.norm();
    const double err = denom > 1e-12 ? (analytic - numeric).norm() / denom : 0.0;
    worst = std::max(worst, err);
  }
  return worst;
}

inline nn::Mat RandomMat(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng,
                         double scale = 1.0) {
  std::normal_distribution<double> dist(0.0, scale);
  nn::Mat m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = dist(rng);
  return m;
}

}  // namespace bgmtts::testing

#endif  // BGMTTS_TESTS_GRAD_CHECK_H_
