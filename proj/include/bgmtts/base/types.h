// Copyright 2026 The bgmtts Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef BGMTTS_BASE_TYPES_H_
#define BGMTTS_BASE_TYPES_H_

#include <complex>

#include <Eigen/Core>

namespace bgmtts {

// Time-frequency data is stored [frames x bins], row-major.
using RealMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ComplexMatrix = Eigen::Matrix<std::complex<double>, Eigen::Dynamic,
                                    Eigen::Dynamic, Eigen::RowMajor>;
using RealVector = Eigen::VectorXd;

}  // namespace bgmtts

#endif  // BGMTTS_BASE_TYPES_H_
