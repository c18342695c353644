// Copyright 2026 The bgmtts Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef BGMTTS_NN_OPS_H_
#define BGMTTS_NN_OPS_H_

#include <vector>

#include "bgmtts/nn/var.h"

namespace bgmtts::nn {

Var Constant(Mat value);

// Dense algebra.
Var MatMul(const Var& a, const Var& b);
Var MatMulTransposeB(const Var& a, const Var& b);  // a * b^T
Var Add(const Var& a, const Var& b);
Var Sub(const Var& a, const Var& b);
Var Mul(const Var& a, const Var& b);  // elementwise
Var Scale(const Var& a, double s);
Var AddRowVector(const Var& a, const Var& row);  // row: [1 x cols]
Var AddColVector(const Var& a, const Var& col);  // col: [rows x 1]
Var OneMinus(const Var& a);

// Pointwise nonlinearities.
Var Sigmoid(const Var& a);
Var Tanh(const Var& a);
Var Relu(const Var& a);
Var Log1p(const Var& a);

Var SoftmaxRows(const Var& a);

// Shape manipulation.
Var Transpose(const Var& a);
Var ConcatCols(const std::vector<Var>& parts);
Var ConcatRows(const std::vector<Var>& parts);
Var SliceCols(const Var& a, Eigen::Index start, Eigen::Index count);
Var SliceRows(const Var& a, Eigen::Index start, Eigen::Index count);
Var Reshape(const Var& a, Eigen::Index rows, Eigen::Index cols);  // row-major
Var BroadcastRows(const Var& row, Eigen::Index rows);
Var GatherRows(const Var& table, const std::vector<int>& ids);

// Reductions to 1x1.
Var Sum(const Var& a);
Var Mean(const Var& a);

// Sequence convolution over the row (time) axis. x: [T x C]. Each output
// row is the concatenation of `kernel` input rows spaced by `dilation`;
// causal windows end at the current row, otherwise they are centred.
// Missing rows are zero. Result: [T x kernel*C].
Var Im2Col1d(const Var& x, int kernel, int dilation, bool causal);

// 2-D convolution on channel-major feature maps. x holds `batch` maps of
// height x width per channel as [C x batch*height*width]; weight is
// [C_out x C*kh*kw]; bias [C_out x 1]. "Same" padding: output size is
// ceil(input / stride).
struct Conv2dGeometry {
  int batch = 1, height = 1, width = 1;
  int kernel_h = 1, kernel_w = 1;
  int stride_h = 1, stride_w = 1;
  int dilation_h = 1, dilation_w = 1;

  int out_height() const { return (height + stride_h - 1) / stride_h; }
  int out_width() const { return (width + stride_w - 1) / stride_w; }
};
Var Conv2d(const Var& x, const Var& weight, const Var& bias,
           const Conv2dGeometry& geometry);

// [C x B*T*F] feature maps -> [B*T x C*F] frame vectors.
Var ChannelsToFrames(const Var& x, int batch, int steps, int features);

// Batch normalisation over the columns of each row of x: [C x N].
struct BatchNormState {
  Mat running_mean;  // [C x 1]
  Mat running_var;   // [C x 1]
  double momentum = 0.1;
  double eps = 1e-5;
};
Var BatchNorm(const Var& x, const Var& gamma, const Var& beta,
              BatchNormState* state, bool training);

// LSTM recurrence with precomputed input projections. gates_in holds
// `batch` sequences of `steps` rows each ([batch*steps x 4H], sequence
// major) in i, f, g, o order; w_hh is [H x 4H]. Returns [batch*steps x H].
Var LstmScan(const Var& gates_in, const Var& w_hh, int batch, int steps,
             bool reverse);

// Losses, each reduced to a 1x1 mean.
Var MeanSquaredError(const Var& pred, const Mat& target);
Var MeanAbsoluteError(const Var& pred, const Mat& target);
// mean(-t log p - (1 - t) log(1 - p)) with p = sigmoid(clamp(logits)).
Var BinaryDivergenceWithLogits(const Var& logits, const Mat& target,
                               double clamp);
// Mean categorical cross entropy of row-wise softmax(logits).
Var SoftmaxCrossEntropy(const Var& logits, const std::vector<int>& labels);
// mean(a .* weights)
Var WeightedMean(const Var& a, const Mat& weights);

}  // namespace bgmtts::nn

#endif  // BGMTTS_NN_OPS_H_
