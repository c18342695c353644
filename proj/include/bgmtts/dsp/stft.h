// Copyright 2026 The bgmtts Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef BGMTTS_DSP_STFT_H_
#define BGMTTS_DSP_STFT_H_

#include <string>
#include <vector>

#include "bgmtts/base/types.h"
#include "bgmtts/dsp/waveform.h"

namespace bgmtts::dsp {

enum class WindowType { kHann, kRectangular };

std::string WindowName(WindowType type);
WindowType WindowFromName(const std::string& name);

// Periodic window of the given length.
std::vector<double> MakeWindow(WindowType type, int length);

// Analysis parameters. Frames are centred: the signal is reflect-padded by
// win_size/2 on both ends, so a signal of n samples yields 1 + n/hop frames.
struct StftParams {
  int fft_size = 1024;
  int win_size = 1024;
  int hop_size = 256;
  WindowType window = WindowType::kHann;

  int num_bins() const { return fft_size / 2 + 1; }
  int NumFrames(std::size_t num_samples) const;

  // Requires hop <= win <= fft and a window whose shifted copies sum to a
  // constant at this hop (COLA). Throws ArgumentError otherwise.
  void Validate() const;

  // 64 ms window, 16 ms hop at the given rate, FFT size = window length.
  static StftParams FromMilliseconds(double win_ms, double hop_ms,
                                     int sample_rate);

  bool operator==(const StftParams&) const = default;
};

struct ComplexSpectrogram {
  ComplexMatrix values;  // [frames x bins]
  StftParams params;
  int sample_rate = kDefaultSampleRate;
  std::size_t signal_length = 0;  // samples of the analysed waveform

  Eigen::Index num_frames() const { return values.rows(); }
  Eigen::Index num_bins() const { return values.cols(); }
};

struct MagnitudeSpectrogram {
  RealMatrix values;  // [frames x bins], non-negative
  StftParams params;
  int sample_rate = kDefaultSampleRate;

  Eigen::Index num_frames() const { return values.rows(); }
  Eigen::Index num_bins() const { return values.cols(); }
};

// Per-bin multiplicative gain in [0, 1].
struct Mask {
  RealMatrix values;
};

// Throws DataError when the signal is shorter than one window.
ComplexSpectrogram Stft(const Waveform& wave, const StftParams& params);

// Least-squares overlap-add inverse; returns signal_length samples.
Waveform Istft(const ComplexSpectrogram& spec);

MagnitudeSpectrogram Magnitude(const ComplexSpectrogram& spec);
RealMatrix Phase(const ComplexSpectrogram& spec);

// Recombines a magnitude with a phase matrix of the same shape.
ComplexSpectrogram Polar(const MagnitudeSpectrogram& magnitude,
                         const RealMatrix& phase, std::size_t signal_length);

// out = magnitude .* mask. Throws ArgumentError on shape mismatch.
MagnitudeSpectrogram ApplyMask(const MagnitudeSpectrogram& magnitude,
                               const Mask& mask);

namespace internal {

// Uncentred frame operators on an already padded signal. Griffin-Lim
// iterates in this domain so that each istft/stft pair is an exact
// orthogonal projection.
ComplexMatrix AnalyzeFrames(const std::vector<double>& padded,
                            const StftParams& params, Eigen::Index frames);
std::vector<double> SynthesizeFrames(const ComplexMatrix& values,
                                     const StftParams& params);

}  // namespace internal

}  // namespace bgmtts::dsp

#endif  // BGMTTS_DSP_STFT_H_
