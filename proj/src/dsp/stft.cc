// Copyright 2026 The bgmtts Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "bgmtts/dsp/stft.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "bgmtts/base/error.h"
#include "fft.h"

namespace bgmtts::dsp {

std::string WindowName(WindowType type) {
  switch (type) {
    case WindowType::kHann:
      return "hann";
    case WindowType::kRectangular:
      return "rectangular";
  }
  return "unknown";
}

WindowType WindowFromName(const std::string& name) {
  if (name == "hann") return WindowType::kHann;
  if (name == "rectangular") return WindowType::kRectangular;
  throw ArgumentError("unknown window type: " + name);
}

std::vector<double> MakeWindow(WindowType type, int length) {
  std::vector<double> w(length, 1.0);
  if (type == WindowType::kHann) {
    for (int i = 0; i < length; ++i)
      w[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * i / length);
  }
  return w;
}

int StftParams::NumFrames(std::size_t num_samples) const {
  return 1 + static_cast<int>(num_samples / hop_size);
}

void StftParams::Validate() const {
  if (hop_size <= 0 || win_size <= 0 || fft_size <= 0)
    throw ArgumentError("STFT sizes must be positive");
  if (hop_size > win_size || win_size > fft_size)
    throw ArgumentError("STFT requires hop_size <= win_size <= fft_size");
  if (win_size % 2 != 0) throw ArgumentError("win_size must be even");
  // Constant overlap-add over one hop period in the steady state.
  const std::vector<double> w = MakeWindow(window, win_size);
  double lo = 1e300, hi = -1e300;
  for (int n = 0; n < hop_size; ++n) {
    double sum = 0.0;
    for (int k = n; k < win_size; k += hop_size) sum += w[k];
    lo = std::min(lo, sum);
    hi = std::max(hi, sum);
  }
  if (lo <= 0.0 || (hi - lo) > 1e-9 * hi)
    throw ArgumentError("window " + WindowName(window) +
                        " is not constant-overlap-add at hop " +
                        std::to_string(hop_size));
}

StftParams StftParams::FromMilliseconds(double win_ms, double hop_ms,
                                        int sample_rate) {
  StftParams p;
  p.win_size = static_cast<int>(std::lround(win_ms * 1e-3 * sample_rate));
  p.hop_size = static_cast<int>(std::lround(hop_ms * 1e-3 * sample_rate));
  p.fft_size = p.win_size;
  p.window = WindowType::kHann;
  p.Validate();
  return p;
}

namespace internal {

ComplexMatrix AnalyzeFrames(const std::vector<double>& padded,
                            const StftParams& params, Eigen::Index frames) {
  const int bins = params.num_bins();
  const std::vector<double> window = MakeWindow(params.window, params.win_size);
  RealFft fft(params.fft_size);
  ComplexMatrix out(frames, bins);
  std::vector<double> buffer(params.fft_size, 0.0);
  for (Eigen::Index t = 0; t < frames; ++t) {
    const std::size_t start = static_cast<std::size_t>(t) * params.hop_size;
    for (int i = 0; i < params.win_size; ++i)
      buffer[i] = padded[start + i] * window[i];
    fft.Forward(buffer.data(), out.row(t).data());
  }
  return out;
}

std::vector<double> SynthesizeFrames(const ComplexMatrix& values,
                                     const StftParams& params) {
  const Eigen::Index frames = values.rows();
  const std::vector<double> window = MakeWindow(params.window, params.win_size);
  RealFft fft(params.fft_size);
  const std::size_t length =
      frames == 0 ? 0
                  : static_cast<std::size_t>(frames - 1) * params.hop_size +
                        params.win_size;
  std::vector<double> out(length, 0.0), norm(length, 0.0);
  std::vector<double> buffer(params.fft_size);
  const double scale = 1.0 / params.fft_size;
  for (Eigen::Index t = 0; t < frames; ++t) {
    fft.Inverse(values.row(t).data(), buffer.data());
    const std::size_t start = static_cast<std::size_t>(t) * params.hop_size;
    for (int i = 0; i < params.win_size; ++i) {
      out[start + i] += buffer[i] * scale * window[i];
      norm[start + i] += window[i] * window[i];
    }
  }
  for (std::size_t i = 0; i < length; ++i)
    out[i] = norm[i] > 1e-10 ? out[i] / norm[i] : 0.0;
  return out;
}

}  // namespace internal

ComplexSpectrogram Stft(const Waveform& wave, const StftParams& params) {
  params.Validate();
  wave.Validate();
  const std::size_t n = wave.size();
  if (n < static_cast<std::size_t>(params.win_size))
    throw DataError("signal of " + std::to_string(n) +
                    " samples is shorter than one window (" +
                    std::to_string(params.win_size) + ")");
  const std::size_t pad = params.win_size / 2;
  std::vector<double> padded(n + 2 * pad);
  for (std::size_t i = 0; i < pad; ++i) {
    padded[i] = wave.samples[pad - i];
    padded[pad + n + i] = wave.samples[n - 2 - i];
  }
  std::copy(wave.samples.begin(), wave.samples.end(), padded.begin() + pad);

  ComplexSpectrogram spec;
  spec.params = params;
  spec.sample_rate = wave.sample_rate;
  spec.signal_length = n;
  spec.values = internal::AnalyzeFrames(padded, params, params.NumFrames(n));
  return spec;
}

Waveform Istft(const ComplexSpectrogram& spec) {
  spec.params.Validate();
  if (spec.values.cols() != spec.params.num_bins())
    throw ArgumentError("spectrogram bin count does not match fft_size");
  std::vector<double> padded = internal::SynthesizeFrames(spec.values, spec.params);
  const std::size_t pad = spec.params.win_size / 2;
  Waveform out;
  out.sample_rate = spec.sample_rate;
  out.samples.assign(spec.signal_length, 0.0);
  for (std::size_t i = 0; i < spec.signal_length && pad + i < padded.size(); ++i)
    out.samples[i] = padded[pad + i];
  return out;
}

MagnitudeSpectrogram Magnitude(const ComplexSpectrogram& spec) {
  MagnitudeSpectrogram out;
  out.params = spec.params;
  out.sample_rate = spec.sample_rate;
  out.values = spec.values.cwiseAbs();
  return out;
}

RealMatrix Phase(const ComplexSpectrogram& spec) {
  return spec.values.unaryExpr([](const std::complex<double>& z) {
    return std::arg(z);
  });
}

ComplexSpectrogram Polar(const MagnitudeSpectrogram& magnitude,
                         const RealMatrix& phase, std::size_t signal_length) {
  if (phase.rows() != magnitude.values.rows() ||
      phase.cols() != magnitude.values.cols())
    throw ArgumentError("phase and magnitude shapes differ");
  ComplexSpectrogram out;
  out.params = magnitude.params;
  out.sample_rate = magnitude.sample_rate;
  out.signal_length = signal_length;
  out.values.resize(phase.rows(), phase.cols());
  for (Eigen::Index i = 0; i < phase.rows(); ++i)
    for (Eigen::Index j = 0; j < phase.cols(); ++j)
      out.values(i, j) = std::polar(magnitude.values(i, j), phase(i, j));
  return out;
}

MagnitudeSpectrogram ApplyMask(const MagnitudeSpectrogram& magnitude,
                               const Mask& mask) {
  if (mask.values.rows() != magnitude.values.rows() ||
      mask.values.cols() != magnitude.values.cols())
    throw ArgumentError("mask shape " + std::to_string(mask.values.rows()) +
                        "x" + std::to_string(mask.values.cols()) +
                        " does not match magnitude shape " +
                        std::to_string(magnitude.values.rows()) + "x" +
                        std::to_string(magnitude.values.cols()));
  MagnitudeSpectrogram out = magnitude;
  out.values = magnitude.values.cwiseProduct(mask.values);
  return out;
}

}  // namespace bgmtts::dsp
