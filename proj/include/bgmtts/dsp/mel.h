// Copyright 2026 The bgmtts Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef BGMTTS_DSP_MEL_H_
#define BGMTTS_DSP_MEL_H_

#include "bgmtts/base/types.h"
#include "bgmtts/dsp/stft.h"

namespace bgmtts::dsp {

inline constexpr int kNumMels = 80;

struct MelSpectrogram {
  RealMatrix values;  // [frames x n_mels]
  int n_mels = kNumMels;
  StftParams params;  // analysis parameters of the source spectrogram
  int sample_rate = kDefaultSampleRate;

  Eigen::Index num_frames() const { return values.rows(); }
};

double HzToMel(double hz);
double MelToHz(double mel);

// Triangular filters on the HTK mel scale, peak 1, [n_mels x bins].
// Throws ArgumentError on invalid band edges or when a filter would not
// cover any FFT bin.
RealMatrix MelFilterbank(int n_mels, int fft_size, int sample_rate,
                         double fmin, double fmax);

MelSpectrogram MelProject(const MagnitudeSpectrogram& magnitude, int n_mels,
                          double fmin, double fmax);

// Keeps frames 0, factor, 2*factor, ...
MelSpectrogram DownsampleMelTime(const MelSpectrogram& mel, int factor);

// Min-max scaling of log values into [0, 1]. Statistics are collected over
// a corpus and stored next to its manifest.
struct LogRangeNormalizer {
  double log_floor = 1e-5;
  double log_min = 0.0;
  double log_max = 1.0;

  void Accumulate(const RealMatrix& linear_values, bool first);
  RealMatrix Normalize(const RealMatrix& linear_values) const;
  RealMatrix Denormalize(const RealMatrix& normalized) const;
};

}  // namespace bgmtts::dsp

#endif  // BGMTTS_DSP_MEL_H_
