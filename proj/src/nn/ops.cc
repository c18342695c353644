// Copyright 2026 The bgmtts Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "bgmtts/nn/ops.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "bgmtts/base/error.h"

namespace bgmtts::nn {

namespace {

void CheckSameShape(const Var& a, const Var& b, const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw ArgumentError(std::string(op) + ": shape mismatch " +
                        std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
                        " vs " + std::to_string(b.rows()) + "x" +
                        std::to_string(b.cols()));
}

void CheckTargetShape(const Var& a, const Mat& t, const char* op) {
  if (a.rows() != t.rows() || a.cols() != t.cols())
    throw ArgumentError(std::string(op) + ": target shape mismatch");
}

Node& In(Node& node, std::size_t i) { return *node.inputs[i]; }

double SigmoidScalar(double x) {
  return x >= 0.0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x));
}

}  // namespace

Var Constant(Mat value) { return Var(std::move(value), false); }

Var MatMul(const Var& a, const Var& b) {
  if (a.cols() != b.rows())
    throw ArgumentError("MatMul: inner dimensions " + std::to_string(a.cols()) +
                        " and " + std::to_string(b.rows()) + " differ");
  Mat out = a.value() * b.value();
  return MakeResult(std::move(out), {a, b}, [](Node& n) {
    Node& x = In(n, 0);
    Node& y = In(n, 1);
    if (x.requires_grad) x.GradRef().noalias() += n.grad * y.value.transpose();
    if (y.requires_grad) y.GradRef().noalias() += x.value.transpose() * n.grad;
  });
}

Var MatMulTransposeB(const Var& a, const Var& b) {
  if (a.cols() != b.cols()) throw ArgumentError("MatMulTransposeB: column counts differ");
  Mat out = a.value() * b.value().transpose();
  return MakeResult(std::move(out), {a, b}, [](Node& n) {
    Node& x = In(n, 0);
    Node& y = In(n, 1);
    if (x.requires_grad) x.GradRef().noalias() += n.grad * y.value;
    if (y.requires_grad) y.GradRef().noalias() += n.grad.transpose() * x.value;
  });
}

Var Add(const Var& a, const Var& b) {
  CheckSameShape(a, b, "Add");
  return MakeResult(a.value() + b.value(), {a, b}, [](Node& n) {
    for (int i = 0; i < 2; ++i)
      if (In(n, i).requires_grad) In(n, i).GradRef() += n.grad;
  });
}

Var Sub(const Var& a, const Var& b) {
  CheckSameShape(a, b, "Sub");
  return MakeResult(a.value() - b.value(), {a, b}, [](Node& n) {
    if (In(n, 0).requires_grad) In(n, 0).GradRef() += n.grad;
    if (In(n, 1).requires_grad) In(n, 1).GradRef() -= n.grad;
  });
}

Var Mul(const Var& a, const Var& b) {
  CheckSameShape(a, b, "Mul");
  return MakeResult(a.value().cwiseProduct(b.value()), {a, b}, [](Node& n) {
    Node& x = In(n, 0);
    Node& y = In(n, 1);
    if (x.requires_grad) x.GradRef() += n.grad.cwiseProduct(y.value);
    if (y.requires_grad) y.GradRef() += n.grad.cwiseProduct(x.value);
  });
}

Var Scale(const Var& a, double s) {
  return MakeResult(a.value() * s, {a}, [s](Node& n) {
    In(n, 0).GradRef() += n.grad * s;
  });
}

Var OneMinus(const Var& a) {
  return MakeResult((1.0 - a.value().array()).matrix(), {a}, [](Node& n) {
    In(n, 0).GradRef() -= n.grad;
  });
}

Var AddRowVector(const Var& a, const Var& row) {
  if (row.rows() != 1 || row.cols() != a.cols())
    throw ArgumentError("AddRowVector: bias must be [1 x " + std::to_string(a.cols()) + "]");
  Mat out = a.value();
  out.rowwise() += row.value().row(0);
  return MakeResult(std::move(out), {a, row}, [](Node& n) {
    if (In(n, 0).requires_grad) In(n, 0).GradRef() += n.grad;
    if (In(n, 1).requires_grad) In(n, 1).GradRef() += n.grad.colwise().sum();
  });
}

Var AddColVector(const Var& a, const Var& col) {
  if (col.cols() != 1 || col.rows() != a.rows())
    throw ArgumentError("AddColVector: bias must be [" + std::to_string(a.rows()) + " x 1]");
  Mat out = a.value();
  out.colwise() += col.value().col(0);
  return MakeResult(std::move(out), {a, col}, [](Node& n) {
    if (In(n, 0).requires_grad) In(n, 0).GradRef() += n.grad;
    if (In(n, 1).requires_grad) In(n, 1).GradRef() += n.grad.rowwise().sum();
  });
}

Var Sigmoid(const Var& a) {
  Mat out = a.value().unaryExpr(&SigmoidScalar);
  return MakeResult(out, {a}, [](Node& n) {
    In(n, 0).GradRef().array() +=
        n.grad.array() * n.value.array() * (1.0 - n.value.array());
  });
}

Var Tanh(const Var& a) {
  Mat out = a.value().array().tanh().matrix();
  return MakeResult(out, {a}, [](Node& n) {
    In(n, 0).GradRef().array() += n.grad.array() * (1.0 - n.value.array().square());
  });
}

Var Relu(const Var& a) {
  Mat out = a.value().cwiseMax(0.0);
  return MakeResult(out, {a}, [](Node& n) {
    In(n, 0).GradRef().array() +=
        n.grad.array() * (n.value.array() > 0.0).cast<double>();
  });
}

Var Log1p(const Var& a) {
  if (a.value().minCoeff() <= -1.0) throw ArgumentError("Log1p: argument <= -1");
  Mat out = a.value().array().log1p().matrix();
  return MakeResult(out, {a}, [](Node& n) {
    Node& x = In(n, 0);
    x.GradRef().array() += n.grad.array() / (1.0 + x.value.array());
  });
}

Var SoftmaxRows(const Var& a) {
  Mat out = a.value();
  for (Eigen::Index r = 0; r < out.rows(); ++r) {
    const double m = out.row(r).maxCoeff();
    out.row(r) = (out.row(r).array() - m).exp().matrix();
    out.row(r) /= out.row(r).sum();
  }
  return MakeResult(out, {a}, [](Node& n) {
    Mat& g = In(n, 0).GradRef();
    for (Eigen::Index r = 0; r < n.value.rows(); ++r) {
      const double dot = n.grad.row(r).dot(n.value.row(r));
      g.row(r).array() += n.value.row(r).array() * (n.grad.row(r).array() - dot);
    }
  });
}

Var Transpose(const Var& a) {
  return MakeResult(a.value().transpose(), {a}, [](Node& n) {
    In(n, 0).GradRef() += n.grad.transpose();
  });
}

Var ConcatCols(const std::vector<Var>& parts) {
  if (parts.empty()) throw ArgumentError("ConcatCols: no inputs");
  const Eigen::Index rows = parts[0].rows();
  Eigen::Index cols = 0;
  for (const Var& p : parts) {
    if (p.rows() != rows) throw ArgumentError("ConcatCols: row counts differ");
    cols += p.cols();
  }
  Mat out(rows, cols);
  Eigen::Index offset = 0;
  for (const Var& p : parts) {
    out.middleCols(offset, p.cols()) = p.value();
    offset += p.cols();
  }
  return MakeResult(std::move(out), parts, [](Node& n) {
    Eigen::Index off = 0;
    for (auto& in : n.inputs) {
      const Eigen::Index c = in->value.cols();
      if (in->requires_grad) in->GradRef() += n.grad.middleCols(off, c);
      off += c;
    }
  });
}

Var ConcatRows(const std::vector<Var>& parts) {
  if (parts.empty()) throw ArgumentError("ConcatRows: no inputs");
  const Eigen::Index cols = parts[0].cols();
  Eigen::Index rows = 0;
  for (const Var& p : parts) {
    if (p.cols() != cols) throw ArgumentError("ConcatRows: column counts differ");
    rows += p.rows();
  }
  Mat out(rows, cols);
  Eigen::Index offset = 0;
  for (const Var& p : parts) {
    out.middleRows(offset, p.rows()) = p.value();
    offset += p.rows();
  }
  return MakeResult(std::move(out), parts, [](Node& n) {
    Eigen::Index off = 0;
    for (auto& in : n.inputs) {
      const Eigen::Index r = in->value.rows();
      if (in->requires_grad) in->GradRef() += n.grad.middleRows(off, r);
      off += r;
    }
  });
}

Var SliceCols(const Var& a, Eigen::Index start, Eigen::Index count) {
  if (start < 0 || count < 0 || start + count > a.cols())
    throw ArgumentError("SliceCols: range out of bounds");
  return MakeResult(a.value().middleCols(start, count), {a}, [start, count](Node& n) {
    In(n, 0).GradRef().middleCols(start, count) += n.grad;
  });
}

Var SliceRows(const Var& a, Eigen::Index start, Eigen::Index count) {
  if (start < 0 || count < 0 || start + count > a.rows())
    throw ArgumentError("SliceRows: range out of bounds");
  return MakeResult(a.value().middleRows(start, count), {a}, [start, count](Node& n) {
    In(n, 0).GradRef().middleRows(start, count) += n.grad;
  });
}

Var Reshape(const Var& a, Eigen::Index rows, Eigen::Index cols) {
  if (rows * cols != a.value().size()) throw ArgumentError("Reshape: size mismatch");
  Mat out = Eigen::Map<const Mat>(a.value().data(), rows, cols);
  return MakeResult(std::move(out), {a}, [](Node& n) {
    Node& x = In(n, 0);
    Mat& g = x.GradRef();
    Eigen::Map<Mat>(g.data(), n.grad.rows(), n.grad.cols()) += n.grad;
  });
}

Var BroadcastRows(const Var& row, Eigen::Index rows) {
  if (row.rows() != 1) throw ArgumentError("BroadcastRows: expects a single row");
  Mat out = row.value().replicate(rows, 1);
  return MakeResult(std::move(out), {row}, [](Node& n) {
    In(n, 0).GradRef() += n.grad.colwise().sum();
  });
}

Var GatherRows(const Var& table, const std::vector<int>& ids) {
  Mat out(static_cast<Eigen::Index>(ids.size()), table.cols());
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (ids[i] < 0 || ids[i] >= table.rows())
      throw ArgumentError("GatherRows: index " + std::to_string(ids[i]) + " out of range");
    out.row(static_cast<Eigen::Index>(i)) = table.value().row(ids[i]);
  }
  return MakeResult(std::move(out), {table}, [ids](Node& n) {
    Mat& g = In(n, 0).GradRef();
    for (std::size_t i = 0; i < ids.size(); ++i)
      g.row(ids[i]) += n.grad.row(static_cast<Eigen::Index>(i));
  });
}

Var Sum(const Var& a) {
  Mat out(1, 1);
  out(0, 0) = a.value().sum();
  return MakeResult(std::move(out), {a}, [](Node& n) {
    In(n, 0).GradRef().array() += n.grad(0, 0);
  });
}

Var Mean(const Var& a) {
  const double count = static_cast<double>(a.value().size());
  Mat out(1, 1);
  out(0, 0) = a.value().sum() / count;
  return MakeResult(std::move(out), {a}, [count](Node& n) {
    In(n, 0).GradRef().array() += n.grad(0, 0) / count;
  });
}

Var Im2Col1d(const Var& x, int kernel, int dilation, bool causal) {
  if (kernel < 1 || dilation < 1) throw ArgumentError("Im2Col1d: bad kernel/dilation");
  const Eigen::Index steps = x.rows(), channels = x.cols();
  // Offset of tap j relative to the output row.
  const int first = causal ? -(kernel - 1) * dilation : -((kernel - 1) * dilation) / 2;
  Mat out = Mat::Zero(steps, kernel * channels);
  for (Eigen::Index t = 0; t < steps; ++t) {
    for (int j = 0; j < kernel; ++j) {
      const Eigen::Index src = t + first + j * dilation;
      if (src < 0 || src >= steps) continue;
      out.block(t, j * channels, 1, channels) = x.value().row(src);
    }
  }
  return MakeResult(std::move(out), {x}, [kernel, first, dilation](Node& n) {
    Mat& g = In(n, 0).GradRef();
    const Eigen::Index steps = g.rows(), channels = g.cols();
    for (Eigen::Index t = 0; t < steps; ++t) {
      for (int j = 0; j < kernel; ++j) {
        const Eigen::Index src = t + first + j * dilation;
        if (src < 0 || src >= steps) continue;
        g.row(src) += n.grad.block(t, j * channels, 1, channels);
      }
    }
  });
}

namespace {

struct ConvPlan {
  Conv2dGeometry g;
  int channels;
  int pad_top, pad_left;
  int out_h, out_w;
};

ConvPlan MakeConvPlan(const Conv2dGeometry& g, int channels) {
  ConvPlan p{g, channels, 0, 0, g.out_height(), g.out_width()};
  const int span_h = (g.kernel_h - 1) * g.dilation_h + 1;
  const int span_w = (g.kernel_w - 1) * g.dilation_w + 1;
  p.pad_top = std::max(0, (p.out_h - 1) * g.stride_h + span_h - g.height) / 2;
  p.pad_left = std::max(0, (p.out_w - 1) * g.stride_w + span_w - g.width) / 2;
  return p;
}

// Output rows per im2col tile; keeps the column buffer cache resident.
constexpr int kConvTileRows = 4;

// cols: [C*kh*kw x (oh1-oh0)*out_w] for batch item b, output rows [oh0, oh1).
void Im2Col2d(const Mat& x, const ConvPlan& p, int b, int oh0, int oh1, Mat* cols) {
  const Conv2dGeometry& g = p.g;
  const Eigen::Index in_plane = static_cast<Eigen::Index>(g.height) * g.width;
  const Eigen::Index tile = static_cast<Eigen::Index>(oh1 - oh0) * p.out_w;
  cols->setZero(static_cast<Eigen::Index>(p.channels) * g.kernel_h * g.kernel_w, tile);
  for (int c = 0; c < p.channels; ++c) {
    const double* src = x.data() + c * x.cols() + b * in_plane;
    for (int i = 0; i < g.kernel_h; ++i) {
      for (int j = 0; j < g.kernel_w; ++j) {
        double* dst = cols->data() + ((c * g.kernel_h + i) * g.kernel_w + j) * tile;
        const int shift = j * g.dilation_w - p.pad_left;
        for (int oh = oh0; oh < oh1; ++oh) {
          const int ih = oh * g.stride_h - p.pad_top + i * g.dilation_h;
          if (ih < 0 || ih >= g.height) continue;
          const double* row = src + static_cast<Eigen::Index>(ih) * g.width;
          double* out_row = dst + static_cast<Eigen::Index>(oh - oh0) * p.out_w;
          if (g.stride_w == 1) {
            const int lo = std::max(0, -shift);
            const int hi = std::min(p.out_w, g.width - shift);
            for (int ow = lo; ow < hi; ++ow) out_row[ow] = row[ow + shift];
          } else {
            for (int ow = 0; ow < p.out_w; ++ow) {
              const int iw = ow * g.stride_w + shift;
              if (iw >= 0 && iw < g.width) out_row[ow] = row[iw];
            }
          }
        }
      }
    }
  }
}

void Col2Im2d(const Mat& cols, const ConvPlan& p, int b, int oh0, int oh1, Mat* grad) {
  const Conv2dGeometry& g = p.g;
  const Eigen::Index in_plane = static_cast<Eigen::Index>(g.height) * g.width;
  const Eigen::Index tile = static_cast<Eigen::Index>(oh1 - oh0) * p.out_w;
  for (int c = 0; c < p.channels; ++c) {
    double* dst = grad->data() + c * grad->cols() + b * in_plane;
    for (int i = 0; i < g.kernel_h; ++i) {
      for (int j = 0; j < g.kernel_w; ++j) {
        const double* src = cols.data() + ((c * g.kernel_h + i) * g.kernel_w + j) * tile;
        const int shift = j * g.dilation_w - p.pad_left;
        for (int oh = oh0; oh < oh1; ++oh) {
          const int ih = oh * g.stride_h - p.pad_top + i * g.dilation_h;
          if (ih < 0 || ih >= g.height) continue;
          double* row = dst + static_cast<Eigen::Index>(ih) * g.width;
          const double* in_row = src + static_cast<Eigen::Index>(oh - oh0) * p.out_w;
          for (int ow = 0; ow < p.out_w; ++ow) {
            const int iw = ow * g.stride_w + shift;
            if (iw >= 0 && iw < g.width) row[iw] += in_row[ow];
          }
        }
      }
    }
  }
}

}  // namespace

Var Conv2d(const Var& x, const Var& weight, const Var& bias,
           const Conv2dGeometry& geometry) {
  const Conv2dGeometry& g = geometry;
  const int channels = static_cast<int>(x.rows());
  if (x.cols() != static_cast<Eigen::Index>(g.batch) * g.height * g.width)
    throw ArgumentError("Conv2d: input columns do not match batch*height*width");
  if (weight.cols() != static_cast<Eigen::Index>(channels) * g.kernel_h * g.kernel_w)
    throw ArgumentError("Conv2d: weight columns do not match C*kh*kw");
  if (bias.rows() != weight.rows() || bias.cols() != 1)
    throw ArgumentError("Conv2d: bias must be [C_out x 1]");
  const ConvPlan plan = MakeConvPlan(g, channels);
  const Eigen::Index out_plane = static_cast<Eigen::Index>(plan.out_h) * plan.out_w;
  Mat out(weight.rows(), g.batch * out_plane);
  Mat cols;
  for (int b = 0; b < g.batch; ++b) {
    for (int oh0 = 0; oh0 < plan.out_h; oh0 += kConvTileRows) {
      const int oh1 = std::min(plan.out_h, oh0 + kConvTileRows);
      Im2Col2d(x.value(), plan, b, oh0, oh1, &cols);
      out.middleCols(b * out_plane + static_cast<Eigen::Index>(oh0) * plan.out_w, cols.cols())
          .noalias() = weight.value() * cols;
    }
  }
  out.colwise() += bias.value().col(0);
  return MakeResult(std::move(out), {x, weight, bias}, [plan, out_plane](Node& n) {
    Node& xn = In(n, 0);
    Node& wn = In(n, 1);
    Node& bn = In(n, 2);
    if (bn.requires_grad) bn.GradRef() += n.grad.rowwise().sum();
    Mat cols, dcols;
    for (int b = 0; b < plan.g.batch; ++b) {
      for (int oh0 = 0; oh0 < plan.out_h; oh0 += kConvTileRows) {
        const int oh1 = std::min(plan.out_h, oh0 + kConvTileRows);
        const Eigen::Index tile = static_cast<Eigen::Index>(oh1 - oh0) * plan.out_w;
        const auto dy = n.grad.middleCols(
            b * out_plane + static_cast<Eigen::Index>(oh0) * plan.out_w, tile);
        if (wn.requires_grad) {
          Im2Col2d(xn.value, plan, b, oh0, oh1, &cols);
          wn.GradRef().noalias() += dy * cols.transpose();
        }
        if (xn.requires_grad) {
          dcols.noalias() = wn.value.transpose() * dy;
          Col2Im2d(dcols, plan, b, oh0, oh1, &xn.GradRef());
        }
      }
    }
  });
}

Var ChannelsToFrames(const Var& x, int batch, int steps, int features) {
  const Eigen::Index channels = x.rows();
  if (x.cols() != static_cast<Eigen::Index>(batch) * steps * features)
    throw ArgumentError("ChannelsToFrames: column count mismatch");
  Mat out(static_cast<Eigen::Index>(batch) * steps, channels * features);
  for (Eigen::Index c = 0; c < channels; ++c)
    for (Eigen::Index r = 0; r < out.rows(); ++r)
      out.block(r, c * features, 1, features) = x.value().block(c, r * features, 1, features);
  return MakeResult(std::move(out), {x}, [features](Node& n) {
    Mat& g = In(n, 0).GradRef();
    for (Eigen::Index c = 0; c < g.rows(); ++c)
      for (Eigen::Index r = 0; r < n.grad.rows(); ++r)
        g.block(c, r * features, 1, features) += n.grad.block(r, c * features, 1, features);
  });
}

Var BatchNorm(const Var& x, const Var& gamma, const Var& beta,
              BatchNormState* state, bool training) {
  const Eigen::Index channels = x.rows();
  const double count = static_cast<double>(x.cols());
  if (gamma.rows() != channels || beta.rows() != channels)
    throw ArgumentError("BatchNorm: parameter size mismatch");
  Eigen::VectorXd mean, var;
  if (training) {
    mean = x.value().rowwise().mean();
    var = ((x.value().colwise() - mean).array().square().rowwise().sum() / count).matrix();
    state->running_mean = (1.0 - state->momentum) * state->running_mean + state->momentum * mean;
    const double unbiased = count > 1.0 ? count / (count - 1.0) : 1.0;
    state->running_var =
        (1.0 - state->momentum) * state->running_var + state->momentum * unbiased * var;
  } else {
    mean = state->running_mean.col(0);
    var = state->running_var.col(0);
  }
  const Eigen::VectorXd inv_std = (var.array() + state->eps).rsqrt().matrix();
  Mat xhat = (x.value().colwise() - mean);
  xhat = inv_std.asDiagonal() * xhat;
  Mat out = gamma.value().col(0).asDiagonal() * xhat;
  out.colwise() += beta.value().col(0);
  return MakeResult(std::move(out), {x, gamma, beta},
                    [xhat, inv_std, training, count](Node& n) {
    Node& xn = In(n, 0);
    Node& gn = In(n, 1);
    Node& bn = In(n, 2);
    if (bn.requires_grad) bn.GradRef() += n.grad.rowwise().sum();
    if (gn.requires_grad) gn.GradRef() += n.grad.cwiseProduct(xhat).rowwise().sum();
    if (!xn.requires_grad) return;
    const Eigen::VectorXd gamma_v = gn.value.col(0);
    Mat dxhat = gamma_v.asDiagonal() * n.grad;
    if (!training) {
      xn.GradRef() += inv_std.asDiagonal() * dxhat;
      return;
    }
    const Eigen::VectorXd sum_d = dxhat.rowwise().sum();
    const Eigen::VectorXd sum_dx = dxhat.cwiseProduct(xhat).rowwise().sum();
    Mat dx = (dxhat * count).colwise() - sum_d;
    dx -= sum_dx.asDiagonal() * xhat;
    xn.GradRef() += (inv_std / count).asDiagonal() * dx;
  });
}

Var LstmScan(const Var& gates_in, const Var& w_hh, int batch, int steps,
             bool reverse) {
  const Eigen::Index hidden = w_hh.rows();
  if (w_hh.cols() != 4 * hidden) throw ArgumentError("LstmScan: w_hh must be [H x 4H]");
  if (gates_in.cols() != 4 * hidden ||
      gates_in.rows() != static_cast<Eigen::Index>(batch) * steps)
    throw ArgumentError("LstmScan: gate input shape mismatch");
  const Eigen::Index rows = gates_in.rows();
  // Activated gates and cell states, laid out like gates_in.
  auto acts = std::make_shared<Mat>(rows, 4 * hidden);
  auto cells = std::make_shared<Mat>(rows, hidden);
  Mat out(rows, hidden);
  Mat h(batch, hidden), c(batch, hidden), pre(batch, 4 * hidden);
  h.setZero();
  c.setZero();
  for (int s = 0; s < steps; ++s) {
    const int t = reverse ? steps - 1 - s : s;
    pre.noalias() = h * w_hh.value();
    for (int b = 0; b < batch; ++b) {
      const Eigen::Index r = static_cast<Eigen::Index>(b) * steps + t;
      for (Eigen::Index k = 0; k < hidden; ++k) {
        const double gi = SigmoidScalar(pre(b, k) + gates_in.value()(r, k));
        const double gf = SigmoidScalar(pre(b, hidden + k) + gates_in.value()(r, hidden + k));
        const double gg = std::tanh(pre(b, 2 * hidden + k) + gates_in.value()(r, 2 * hidden + k));
        const double go = SigmoidScalar(pre(b, 3 * hidden + k) + gates_in.value()(r, 3 * hidden + k));
        const double cell = gf * c(b, k) + gi * gg;
        c(b, k) = cell;
        h(b, k) = go * std::tanh(cell);
        (*acts)(r, k) = gi;
        (*acts)(r, hidden + k) = gf;
        (*acts)(r, 2 * hidden + k) = gg;
        (*acts)(r, 3 * hidden + k) = go;
        (*cells)(r, k) = cell;
      }
      out.row(r) = h.row(b);
    }
  }
  return MakeResult(out, {gates_in, w_hh},
                    [acts, cells, batch, steps, reverse, hidden](Node& n) {
    Node& gin = In(n, 0);
    Node& whh = In(n, 1);
    Mat dh_next = Mat::Zero(batch, hidden), dc_next = Mat::Zero(batch, hidden);
    Mat dgates(batch, 4 * hidden), h_prev(batch, hidden);
    for (int s = steps - 1; s >= 0; --s) {
      const int t = reverse ? steps - 1 - s : s;
      const int t_prev = reverse ? t + 1 : t - 1;
      const bool has_prev = s > 0;
      for (int b = 0; b < batch; ++b) {
        const Eigen::Index r = static_cast<Eigen::Index>(b) * steps + t;
        const Eigen::Index rp = static_cast<Eigen::Index>(b) * steps + t_prev;
        for (Eigen::Index k = 0; k < hidden; ++k) {
          const double gi = (*acts)(r, k), gf = (*acts)(r, hidden + k);
          const double gg = (*acts)(r, 2 * hidden + k), go = (*acts)(r, 3 * hidden + k);
          const double cell = (*cells)(r, k);
          const double c_prev = has_prev ? (*cells)(rp, k) : 0.0;
          const double tc = std::tanh(cell);
          const double dh = n.grad(r, k) + dh_next(b, k);
          const double dc = dh * go * (1.0 - tc * tc) + dc_next(b, k);
          dgates(b, k) = dc * gg * gi * (1.0 - gi);
          dgates(b, hidden + k) = dc * c_prev * gf * (1.0 - gf);
          dgates(b, 2 * hidden + k) = dc * gi * (1.0 - gg * gg);
          dgates(b, 3 * hidden + k) = dh * tc * go * (1.0 - go);
          dc_next(b, k) = dc * gf;
          h_prev(b, k) = has_prev ? n.value(rp, k) : 0.0;
        }
        if (gin.requires_grad) gin.GradRef().row(r) += dgates.row(b);
      }
      if (whh.requires_grad) whh.GradRef().noalias() += h_prev.transpose() * dgates;
      dh_next.noalias() = dgates * whh.value.transpose();
    }
  });
}

Var MeanSquaredError(const Var& pred, const Mat& target) {
  CheckTargetShape(pred, target, "MeanSquaredError");
  const double count = static_cast<double>(target.size());
  Mat out(1, 1);
  out(0, 0) = (pred.value() - target).squaredNorm() / count;
  return MakeResult(std::move(out), {pred}, [target, count](Node& n) {
    Node& p = In(n, 0);
    p.GradRef() += (2.0 * n.grad(0, 0) / count) * (p.value - target);
  });
}

Var MeanAbsoluteError(const Var& pred, const Mat& target) {
  CheckTargetShape(pred, target, "MeanAbsoluteError");
  const double count = static_cast<double>(target.size());
  Mat out(1, 1);
  out(0, 0) = (pred.value() - target).cwiseAbs().sum() / count;
  return MakeResult(std::move(out), {pred}, [target, count](Node& n) {
    Node& p = In(n, 0);
    p.GradRef() += (n.grad(0, 0) / count) *
                   (p.value - target).unaryExpr([](double d) {
                     return static_cast<double>((d > 0.0) - (d < 0.0));
                   });
  });
}

Var BinaryDivergenceWithLogits(const Var& logits, const Mat& target,
                               double clamp) {
  CheckTargetShape(logits, target, "BinaryDivergenceWithLogits");
  if (target.size() > 0 && (target.minCoeff() < 0.0 || target.maxCoeff() > 1.0))
    throw ArgumentError("binary divergence targets must lie in [0, 1]");
  const double count = static_cast<double>(target.size());
  // softplus(z) - t z == -t log sigmoid(z) - (1 - t) log(1 - sigmoid(z))
  const Mat z = logits.value().cwiseMax(-clamp).cwiseMin(clamp);
  double total = 0.0;
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    const double v = z.data()[i];
    const double softplus = std::max(v, 0.0) + std::log1p(std::exp(-std::abs(v)));
    total += softplus - target.data()[i] * v;
  }
  Mat out(1, 1);
  out(0, 0) = total / count;
  return MakeResult(std::move(out), {logits}, [target, count, clamp](Node& n) {
    Node& l = In(n, 0);
    Mat& g = l.GradRef();
    const double scale = n.grad(0, 0) / count;
    for (Eigen::Index i = 0; i < g.size(); ++i) {
      const double raw = l.value.data()[i];
      if (raw < -clamp || raw > clamp) continue;
      g.data()[i] += scale * (SigmoidScalar(raw) - target.data()[i]);
    }
  });
}

Var SoftmaxCrossEntropy(const Var& logits, const std::vector<int>& labels) {
  if (static_cast<Eigen::Index>(labels.size()) != logits.rows())
    throw ArgumentError("SoftmaxCrossEntropy: one label per row required");
  Mat probs = logits.value();
  double total = 0.0;
  for (Eigen::Index r = 0; r < probs.rows(); ++r) {
    if (labels[r] < 0 || labels[r] >= probs.cols())
      throw ArgumentError("SoftmaxCrossEntropy: label out of range");
    const double m = probs.row(r).maxCoeff();
    probs.row(r) = (probs.row(r).array() - m).exp().matrix();
    const double z = probs.row(r).sum();
    probs.row(r) /= z;
    total += -(logits.value()(r, labels[r]) - m - std::log(z));
  }
  const double count = static_cast<double>(labels.size());
  Mat out(1, 1);
  out(0, 0) = total / count;
  return MakeResult(std::move(out), {logits}, [probs, labels, count](Node& n) {
    Mat d = probs;
    for (std::size_t r = 0; r < labels.size(); ++r)
      d(static_cast<Eigen::Index>(r), labels[r]) -= 1.0;
    In(n, 0).GradRef() += (n.grad(0, 0) / count) * d;
  });
}

Var WeightedMean(const Var& a, const Mat& weights) {
  CheckTargetShape(a, weights, "WeightedMean");
  const double count = static_cast<double>(weights.size());
  Mat out(1, 1);
  out(0, 0) = a.value().cwiseProduct(weights).sum() / count;
  return MakeResult(std::move(out), {a}, [weights, count](Node& n) {
    In(n, 0).GradRef() += (n.grad(0, 0) / count) * weights;
  });
}

}  // namespace bgmtts::nn
