// Copyright 2026 The bgmtts Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "bgmtts/dsp/metrics.h"

#include <algorithm>
#include <cmath>

#include "bgmtts/base/error.h"

namespace bgmtts::dsp {

double SiSnr(const Waveform& reference, const Waveform& estimate) {
  if (reference.size() != estimate.size())
    throw ArgumentError("SI-SNR inputs differ in length");
  const std::size_t n = reference.size();
  if (n == 0) throw ArgumentError("SI-SNR of empty signals");
  double mean_r = 0.0, mean_e = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mean_r += reference.samples[i];
    mean_e += estimate.samples[i];
  }
  mean_r /= n;
  mean_e /= n;
  double dot = 0.0, energy_r = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = reference.samples[i] - mean_r;
    dot += r * (estimate.samples[i] - mean_e);
    energy_r += r * r;
  }
  if (energy_r <= 0.0) throw ArgumentError("SI-SNR reference is zero");
  const double alpha = dot / energy_r;
  double target = 0.0, noise = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double s = alpha * (reference.samples[i] - mean_r);
    const double e = (estimate.samples[i] - mean_e) - s;
    target += s * s;
    noise += e * e;
  }
  if (noise <= 0.0) return kSiSnrCapDb;
  if (target <= 0.0) return -kSiSnrCapDb;
  return std::clamp(10.0 * std::log10(target / noise), -kSiSnrCapDb, kSiSnrCapDb);
}

double LogSpectralDistance(const MagnitudeSpectrogram& a,
                           const MagnitudeSpectrogram& b) {
  if (a.values.rows() != b.values.rows() || a.values.cols() != b.values.cols())
    throw ArgumentError("LSD inputs differ in shape");
  const Eigen::Index frames = a.values.rows(), bins = a.values.cols();
  if (frames == 0 || bins == 0) throw ArgumentError("LSD of empty spectrograms");
  auto to_db = [](double v) {
    return v > 0.0 ? std::max(20.0 * std::log10(v), kLsdFloorDb) : kLsdFloorDb;
  };
  double total = 0.0;
  for (Eigen::Index t = 0; t < frames; ++t) {
    double sq = 0.0;
    for (Eigen::Index k = 0; k < bins; ++k) {
      const double d = to_db(a.values(t, k)) - to_db(b.values(t, k));
      sq += d * d;
    }
    total += std::sqrt(sq / bins);
  }
  return total / frames;
}

}  // namespace bgmtts::dsp
