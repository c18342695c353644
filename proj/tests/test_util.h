// Copyright 2026 The bgmtts Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef BGMTTS_TESTS_TEST_UTIL_H_
#define BGMTTS_TESTS_TEST_UTIL_H_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "bgmtts/dsp/waveform.h"

namespace bgmtts::testing {

inline dsp::Waveform Sine(double freq, double seconds, double amp = 0.5,
                          int rate = 16000) {
  dsp::Waveform w;
  w.sample_rate = rate;
  const auto n = static_cast<std::size_t>(seconds * rate);
  w.samples.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    w.samples[i] = amp * std::sin(2.0 * std::numbers::pi * freq * i / rate);
  return w;
}

inline dsp::Waveform WhiteNoise(std::size_t n, std::uint64_t seed,
                                double stddev = 0.1, int rate = 16000) {
  dsp::Waveform w;
  w.sample_rate = rate;
  w.samples.resize(n);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> dist(0.0, stddev);
  for (double& s : w.samples) s = dist(rng);
  return w;
}

inline double RelativeL2(const std::vector<double>& ref,
                         const std::vector<double>& est) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < ref.size(); ++i) {
    num += (ref[i] - est[i]) * (ref[i] - est[i]);
    den += ref[i] * ref[i];
  }
  return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
}

// SNR over 32 ms frames of the speech passing -40 dBFS, written out
// directly rather than through the library helpers. NaN without activity.
inline double OracleSnrDb(const std::vector<double>& speech, const std::vector<double>& noise,
                          int rate) {
  const std::size_t frame = static_cast<std::size_t>(0.032 * rate);
  double ps = 0.0, pn = 0.0;
  std::size_t count = 0;
  for (std::size_t start = 0; start < speech.size(); start += frame) {
    const std::size_t end = std::min(speech.size(), start + frame);
    double e = 0.0;
    for (std::size_t i = start; i < end; ++i) e += speech[i] * speech[i];
    if (10.0 * std::log10(e / (end - start)) < -40.0) continue;
    for (std::size_t i = start; i < end; ++i) {
      ps += speech[i] * speech[i];
      pn += noise[i] * noise[i];
      ++count;
    }
  }
  return count ? 10.0 * std::log10(ps / pn) : std::nan("");
}

// Noise bursts separated by silence, so the activity detector matters.
inline dsp::Waveform SpeechLike(std::uint64_t seed) {
  dsp::Waveform w = WhiteNoise(24000, seed, 0.2);
  for (std::size_t i = 0; i < w.size(); ++i)
    if ((i / 4000) % 2 == 1) w.samples[i] = 0.0;
  return w;
}

// Fresh scratch directory under the system temp dir.
inline std::filesystem::path ScratchDir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("bgmtts_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace bgmtts::testing

#endif  // BGMTTS_TESTS_TEST_UTIL_H_
