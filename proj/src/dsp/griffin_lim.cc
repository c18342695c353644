// Copyright 2026 The bgmtts Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "bgmtts/dsp/griffin_lim.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "bgmtts/base/error.h"

namespace bgmtts::dsp {

namespace {

// Interior bins stand for a conjugate pair of the full spectrum, so they
// carry weight 2 in the norm that the projections are orthogonal in.
double BinWeight(Eigen::Index bin, Eigen::Index bins, int fft_size) {
  const bool nyquist = fft_size % 2 == 0 && bin == bins - 1;
  return (bin == 0 || nyquist) ? 1.0 : 2.0;
}

// Phase-vocoder style starting point: every spectral peak advances its
// phase by its interpolated frequency times the hop, and the bins around a
// peak are locked to it with the linear phase of an uncentred window. Only
// the per-bin starting offsets are random.
ComplexMatrix InitialEstimate(const RealMatrix& target, const StftParams& params,
                              std::uint64_t seed) {
  const Eigen::Index frames = target.rows(), bins = target.cols();
  const double n = params.fft_size;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> angle(-std::numbers::pi, std::numbers::pi);
  std::vector<double> running(bins), freq(bins, 0.0);
  for (double& p : running) p = angle(rng);

  ComplexMatrix estimate(frames, bins);
  std::vector<Eigen::Index> peaks;
  std::vector<double> locked(bins);
  for (Eigen::Index t = 0; t < frames; ++t) {
    peaks.clear();
    for (Eigen::Index k = 1; k + 1 < bins; ++k)
      if (target(t, k) >= target(t, k - 1) && target(t, k) > target(t, k + 1))
        peaks.push_back(k);
    if (peaks.empty()) {
      Eigen::Index best = 0;
      target.row(t).maxCoeff(&best);
      peaks.push_back(best);
    }
    for (Eigen::Index k : peaks) {
      double offset = 0.0;
      if (k > 0 && k + 1 < bins) {
        const double a = std::log(target(t, k - 1) + 1e-12);
        const double b = std::log(target(t, k) + 1e-12);
        const double c = std::log(target(t, k + 1) + 1e-12);
        const double curvature = a - 2.0 * b + c;
        if (curvature < 0.0) offset = std::clamp(0.5 * (a - c) / curvature, -0.5, 0.5);
      }
      freq[k] = k + offset;
      running[k] += 2.0 * std::numbers::pi * freq[k] * params.hop_size / n;
    }
    std::size_t nearest = 0;
    for (Eigen::Index k = 0; k < bins; ++k) {
      while (nearest + 1 < peaks.size() &&
             std::abs(peaks[nearest + 1] - k) <= std::abs(peaks[nearest] - k))
        ++nearest;
      const Eigen::Index p = peaks[nearest];
      locked[k] = running[p] - std::numbers::pi * (k - freq[p]) * (n - 1.0) / n;
      estimate(t, k) = std::polar(target(t, k), locked[k]);
    }
    std::size_t next_peak = 0;
    for (Eigen::Index k = 0; k < bins; ++k) {
      if (next_peak < peaks.size() && peaks[next_peak] == k) {
        ++next_peak;
        continue;
      }
      running[k] = locked[k];
    }
  }
  return estimate;
}

}  // namespace

GriffinLimResult GriffinLim(const MagnitudeSpectrogram& magnitude, int iters,
                            std::uint64_t seed) {
  if (iters < 1) throw ArgumentError("Griffin-Lim needs at least one iteration");
  const StftParams& params = magnitude.params;
  params.Validate();
  const RealMatrix& target = magnitude.values;
  const Eigen::Index frames = target.rows(), bins = target.cols();
  if (bins != params.num_bins())
    throw ArgumentError("magnitude bin count does not match fft_size");
  if ((target.array() < 0.0).any()) throw ArgumentError("magnitude must be non-negative");

  GriffinLimResult result;
  result.wave.sample_rate = magnitude.sample_rate;
  const std::size_t out_len =
      frames > 0 ? static_cast<std::size_t>(frames - 1) * params.hop_size : 0;
  result.wave.samples.assign(out_len, 0.0);

  double target_norm = 0.0;
  for (Eigen::Index t = 0; t < frames; ++t)
    for (Eigen::Index k = 0; k < bins; ++k)
      target_norm += BinWeight(k, bins, params.fft_size) * target(t, k) * target(t, k);
  target_norm = std::sqrt(target_norm);
  if (frames == 0 || target_norm == 0.0) {
    result.residuals.assign(iters, 0.0);
    return result;
  }

  ComplexMatrix estimate = InitialEstimate(target, params, seed);

  std::vector<double> signal;
  for (int it = 0; it < iters; ++it) {
    signal = internal::SynthesizeFrames(estimate, params);
    const ComplexMatrix rebuilt = internal::AnalyzeFrames(signal, params, frames);
    double residual = 0.0;
    for (Eigen::Index t = 0; t < frames; ++t) {
      for (Eigen::Index k = 0; k < bins; ++k) {
        const std::complex<double> z = rebuilt(t, k);
        const double mag = std::abs(z);
        const double diff = mag - target(t, k);
        residual += BinWeight(k, bins, params.fft_size) * diff * diff;
        estimate(t, k) = mag > 0.0 ? z * (target(t, k) / mag)
                                   : std::complex<double>(target(t, k), 0.0);
      }
    }
    result.residuals.push_back(std::sqrt(residual) / target_norm);
  }
  const std::size_t pad = params.win_size / 2;
  for (std::size_t i = 0; i < out_len; ++i) result.wave.samples[i] = signal[pad + i];
  return result;
}

}  // namespace bgmtts::dsp
