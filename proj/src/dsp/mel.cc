// Copyright 2026 The bgmtts Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "bgmtts/dsp/mel.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "bgmtts/base/error.h"

namespace bgmtts::dsp {

double HzToMel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }

double MelToHz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

RealMatrix MelFilterbank(int n_mels, int fft_size, int sample_rate,
                         double fmin, double fmax) {
  if (n_mels < 1) throw ArgumentError("n_mels must be >= 1");
  if (!(fmin >= 0.0) || !(fmin < fmax) || fmax > sample_rate / 2.0)
    throw ArgumentError("mel band edges must satisfy 0 <= fmin < fmax <= sr/2");
  const int bins = fft_size / 2 + 1;
  const double mel_lo = HzToMel(fmin), mel_hi = HzToMel(fmax);
  std::vector<double> edges(n_mels + 2);
  for (int i = 0; i < n_mels + 2; ++i)
    edges[i] = MelToHz(mel_lo + (mel_hi - mel_lo) * i / (n_mels + 1));

  RealMatrix bank = RealMatrix::Zero(n_mels, bins);
  for (int m = 0; m < n_mels; ++m) {
    const double left = edges[m], centre = edges[m + 1], right = edges[m + 2];
    for (int k = 0; k < bins; ++k) {
      const double f = static_cast<double>(k) * sample_rate / fft_size;
      double w = 0.0;
      if (f > left && f <= centre)
        w = (f - left) / (centre - left);
      else if (f > centre && f < right)
        w = (right - f) / (right - centre);
      bank(m, k) = w;
    }
    if (bank.row(m).sum() <= 0.0)
      throw ArgumentError("mel filter " + std::to_string(m) +
                          " covers no FFT bin; use fewer mels or a larger FFT");
  }
  return bank;
}

MelSpectrogram MelProject(const MagnitudeSpectrogram& magnitude, int n_mels,
                          double fmin, double fmax) {
  const RealMatrix bank = MelFilterbank(n_mels, magnitude.params.fft_size,
                                        magnitude.sample_rate, fmin, fmax);
  if (magnitude.values.cols() != bank.cols())
    throw ArgumentError("magnitude bins do not match fft_size");
  MelSpectrogram mel;
  mel.n_mels = n_mels;
  mel.params = magnitude.params;
  mel.sample_rate = magnitude.sample_rate;
  mel.values = magnitude.values * bank.transpose();
  return mel;
}

MelSpectrogram DownsampleMelTime(const MelSpectrogram& mel, int factor) {
  if (factor < 1) throw ArgumentError("downsample factor must be >= 1");
  MelSpectrogram out = mel;
  const Eigen::Index frames = (mel.values.rows() + factor - 1) / factor;
  out.values.resize(frames, mel.values.cols());
  for (Eigen::Index t = 0; t < frames; ++t)
    out.values.row(t) = mel.values.row(t * factor);
  return out;
}

void LogRangeNormalizer::Accumulate(const RealMatrix& linear_values, bool first) {
  if (linear_values.size() == 0) return;
  const double lo = std::log(std::max(linear_values.minCoeff(), log_floor));
  const double hi = std::log(std::max(linear_values.maxCoeff(), log_floor));
  if (first) {
    log_min = lo;
    log_max = hi;
  } else {
    log_min = std::min(log_min, lo);
    log_max = std::max(log_max, hi);
  }
}

RealMatrix LogRangeNormalizer::Normalize(const RealMatrix& linear_values) const {
  const double range = std::max(log_max - log_min, 1e-12);
  return linear_values.unaryExpr([&](double v) {
    const double x = (std::log(std::max(v, log_floor)) - log_min) / range;
    return std::clamp(x, 0.0, 1.0);
  });
}

RealMatrix LogRangeNormalizer::Denormalize(const RealMatrix& normalized) const {
  const double range = log_max - log_min;
  return normalized.unaryExpr(
      [&](double x) { return std::exp(log_min + x * range); });
}

}  // namespace bgmtts::dsp
