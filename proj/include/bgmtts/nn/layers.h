// Copyright 2026 The bgmtts Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef BGMTTS_NN_LAYERS_H_
#define BGMTTS_NN_LAYERS_H_

#include <string>

#include "bgmtts/nn/ops.h"
#include "bgmtts/nn/parameters.h"

namespace bgmtts::nn {

// x [N x in] -> [N x out]
class Linear {
 public:
  Linear() = default;
  Linear(ParameterSet& params, const std::string& name, int in, int out,
         double bias_init = 0.0);
  Var operator()(const Var& x) const;
  int in() const { return in_; }
  int out() const { return out_; }

 private:
  int in_ = 0, out_ = 0;
  Var weight_, bias_;
};

// Sequence convolution over time, x [T x in] -> [T x out].
class Conv1d {
 public:
  Conv1d() = default;
  Conv1d(ParameterSet& params, const std::string& name, int in, int out,
         int kernel, int dilation, bool causal);
  Var operator()(const Var& x) const;
  int out() const { return out_; }

 private:
  int in_ = 0, out_ = 0, kernel_ = 1, dilation_ = 1;
  bool causal_ = false;
  Var weight_, bias_;
};

// Highway convolution: H = conv(x) split into gate and candidate halves,
// out = sigmoid(gate) * candidate + (1 - sigmoid(gate)) * x.
class HighwayConv1d {
 public:
  HighwayConv1d() = default;
  HighwayConv1d(ParameterSet& params, const std::string& name, int channels,
                int kernel, int dilation, bool causal);
  Var operator()(const Var& x) const;

 private:
  int channels_ = 0;
  Conv1d conv_;
};

// 2-D convolution with optional batch normalisation, channel-major maps.
class Conv2dLayer {
 public:
  Conv2dLayer() = default;
  Conv2dLayer(ParameterSet& params, const std::string& name, int in, int out,
              int kernel_h, int kernel_w, int stride_h, int stride_w,
              int dilation_h, int dilation_w, bool batch_norm);
  // height/width describe x on input and are updated to the output size.
  Var Forward(const Var& x, int batch, int* height, int* width,
              bool training) const;
  int out() const { return out_; }

 private:
  int in_ = 0, out_ = 0;
  Conv2dGeometry geometry_;
  bool batch_norm_ = false;
  Var weight_, bias_, gamma_, beta_;
  Mat* running_mean_ = nullptr;
  Mat* running_var_ = nullptr;
};

// Single-layer LSTM over `batch` sequences of equal length stored sequence
// major: x [batch*steps x in] -> [batch*steps x hidden].
class Lstm {
 public:
  Lstm() = default;
  Lstm(ParameterSet& params, const std::string& name, int in, int hidden,
       bool reverse = false);
  Var operator()(const Var& x, int batch, int steps) const;
  int hidden() const { return hidden_; }

 private:
  int in_ = 0, hidden_ = 0;
  bool reverse_ = false;
  Var w_ih_, w_hh_, bias_;
};

// Forward and backward LSTMs, outputs concatenated: [.. x 2*hidden].
class BiLstm {
 public:
  BiLstm() = default;
  BiLstm(ParameterSet& params, const std::string& name, int in, int hidden);
  Var operator()(const Var& x, int batch, int steps) const;

 private:
  Lstm forward_, backward_;
};

}  // namespace bgmtts::nn

#endif  // BGMTTS_NN_LAYERS_H_
