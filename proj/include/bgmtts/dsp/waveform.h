// Copyright 2026 The bgmtts Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef BGMTTS_DSP_WAVEFORM_H_
#define BGMTTS_DSP_WAVEFORM_H_

#include <filesystem>
#include <vector>

namespace bgmtts::dsp {

inline constexpr int kDefaultSampleRate = 16000;

// Mono PCM audio. Nominal amplitude range is [-1, 1].
struct Waveform {
  std::vector<double> samples;
  int sample_rate = kDefaultSampleRate;

  std::size_t size() const { return samples.size(); }
  double duration_s() const {
    return static_cast<double>(samples.size()) / sample_rate;
  }
  // Throws ArgumentError on a non-positive rate or non-finite samples.
  void Validate() const;
};

// RIFF/WAVE, 16-bit signed little-endian PCM, mono. Anything else
// (stereo, float, 8/24-bit) is rejected with DataError.
Waveform ReadWav(const std::filesystem::path& path);

// Reads and additionally checks the sample rate.
Waveform ReadWav(const std::filesystem::path& path, int expected_rate);

// Samples are clipped to [-1, 1] and rounded to 16-bit.
void WriteWav(const std::filesystem::path& path, const Waveform& wave);

}  // namespace bgmtts::dsp

#endif  // BGMTTS_DSP_WAVEFORM_H_
