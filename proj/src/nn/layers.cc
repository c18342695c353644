// Copyright 2026 The bgmtts Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "bgmtts/nn/layers.h"

#include "bgmtts/base/error.h"

namespace bgmtts::nn {

Linear::Linear(ParameterSet& params, const std::string& name, int in, int out,
               double bias_init)
    : in_(in), out_(out) {
  weight_ = params.AddXavier(name + ".weight", in, out, in, out);
  bias_ = params.AddConstant(name + ".bias", 1, out, bias_init);
}

Var Linear::operator()(const Var& x) const {
  return AddRowVector(MatMul(x, weight_), bias_);
}

Conv1d::Conv1d(ParameterSet& params, const std::string& name, int in, int out,
               int kernel, int dilation, bool causal)
    : in_(in), out_(out), kernel_(kernel), dilation_(dilation), causal_(causal) {
  weight_ = params.AddXavier(name + ".weight", kernel * in, out, kernel * in, out);
  bias_ = params.AddZeros(name + ".bias", 1, out);
}

Var Conv1d::operator()(const Var& x) const {
  if (x.cols() != in_) throw ArgumentError("Conv1d: input channel mismatch");
  const Var cols = kernel_ == 1 ? x : Im2Col1d(x, kernel_, dilation_, causal_);
  return AddRowVector(MatMul(cols, weight_), bias_);
}

HighwayConv1d::HighwayConv1d(ParameterSet& params, const std::string& name,
                             int channels, int kernel, int dilation, bool causal)
    : channels_(channels),
      conv_(params, name, channels, 2 * channels, kernel, dilation, causal) {}

Var HighwayConv1d::operator()(const Var& x) const {
  const Var h = conv_(x);
  const Var gate = Sigmoid(SliceCols(h, 0, channels_));
  const Var candidate = SliceCols(h, channels_, channels_);
  return Add(Mul(gate, candidate), Mul(OneMinus(gate), x));
}

Conv2dLayer::Conv2dLayer(ParameterSet& params, const std::string& name, int in,
                         int out, int kernel_h, int kernel_w, int stride_h,
                         int stride_w, int dilation_h, int dilation_w,
                         bool batch_norm)
    : in_(in), out_(out), batch_norm_(batch_norm) {
  geometry_.kernel_h = kernel_h;
  geometry_.kernel_w = kernel_w;
  geometry_.stride_h = stride_h;
  geometry_.stride_w = stride_w;
  geometry_.dilation_h = dilation_h;
  geometry_.dilation_w = dilation_w;
  const int fan_in = in * kernel_h * kernel_w;
  const int fan_out = out * kernel_h * kernel_w;
  weight_ = params.AddXavier(name + ".weight", out, fan_in, fan_in, fan_out);
  bias_ = params.AddZeros(name + ".bias", out, 1);
  if (batch_norm_) {
    gamma_ = params.AddConstant(name + ".bn.gamma", out, 1, 1.0);
    beta_ = params.AddZeros(name + ".bn.beta", out, 1);
    running_mean_ = params.AddBuffer(name + ".bn.running_mean", Mat::Zero(out, 1));
    running_var_ = params.AddBuffer(name + ".bn.running_var", Mat::Ones(out, 1));
  }
}

Var Conv2dLayer::Forward(const Var& x, int batch, int* height, int* width,
                         bool training) const {
  if (x.rows() != in_) throw ArgumentError("Conv2dLayer: input channel mismatch");
  Conv2dGeometry g = geometry_;
  g.batch = batch;
  g.height = *height;
  g.width = *width;
  Var y = Conv2d(x, weight_, bias_, g);
  *height = g.out_height();
  *width = g.out_width();
  if (!batch_norm_) return y;
  BatchNormState state{*running_mean_, *running_var_};
  y = BatchNorm(y, gamma_, beta_, &state, training);
  if (training) {
    *running_mean_ = state.running_mean;
    *running_var_ = state.running_var;
  }
  return y;
}

Lstm::Lstm(ParameterSet& params, const std::string& name, int in, int hidden,
           bool reverse)
    : in_(in), hidden_(hidden), reverse_(reverse) {
  w_ih_ = params.AddXavier(name + ".w_ih", in, 4 * hidden, in, 4 * hidden);
  w_hh_ = params.AddXavier(name + ".w_hh", hidden, 4 * hidden, hidden, 4 * hidden);
  // Forget-gate bias starts at 1.
  Mat bias = Mat::Zero(1, 4 * hidden);
  bias.middleCols(hidden, hidden).setOnes();
  bias_ = params.Add(name + ".bias", bias);
}

Var Lstm::operator()(const Var& x, int batch, int steps) const {
  if (x.cols() != in_) throw ArgumentError("Lstm: input width mismatch");
  const Var gates = AddRowVector(MatMul(x, w_ih_), bias_);
  return LstmScan(gates, w_hh_, batch, steps, reverse_);
}

BiLstm::BiLstm(ParameterSet& params, const std::string& name, int in, int hidden)
    : forward_(params, name + ".fwd", in, hidden, false),
      backward_(params, name + ".bwd", in, hidden, true) {}

Var BiLstm::operator()(const Var& x, int batch, int steps) const {
  return ConcatCols({forward_(x, batch, steps), backward_(x, batch, steps)});
}

}  // namespace bgmtts::nn
