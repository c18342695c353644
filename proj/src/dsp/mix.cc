// Copyright 2026 The bgmtts Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "bgmtts/dsp/mix.h"

#include <cmath>
#include <random>
#include <string>

#include "bgmtts/base/error.h"

namespace bgmtts::dsp {

std::vector<bool> ActiveSamples(const Waveform& wave) {
  const std::size_t n = wave.size();
  const auto frame = static_cast<std::size_t>(
      std::lround(kVadFrameSeconds * wave.sample_rate));
  std::vector<bool> active(n, false);
  bool any = false;
  for (std::size_t start = 0; start < n; start += frame) {
    const std::size_t end = std::min(n, start + frame);
    double energy = 0.0;
    for (std::size_t i = start; i < end; ++i)
      energy += wave.samples[i] * wave.samples[i];
    energy /= static_cast<double>(end - start);
    if (energy > 0.0 && 10.0 * std::log10(energy) >= kVadThresholdDb) {
      any = true;
      for (std::size_t i = start; i < end; ++i) active[i] = true;
    }
  }
  if (!any) active.assign(n, true);
  return active;
}

double ActivePower(const Waveform& wave, const std::vector<bool>& active) {
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < wave.size(); ++i) {
    if (!active[i]) continue;
    sum += wave.samples[i] * wave.samples[i];
    ++count;
  }
  return count == 0 ? 0.0 : sum / static_cast<double>(count);
}

double MeasureSnrDb(const Waveform& speech, const Waveform& noise) {
  if (speech.size() != noise.size())
    throw ArgumentError("speech and noise lengths differ");
  const std::vector<bool> active = ActiveSamples(speech);
  const double ps = ActivePower(speech, active);
  const double pn = ActivePower(noise, active);
  if (ps <= 0.0 || pn <= 0.0) throw DataError("zero-power signal in SNR measurement");
  return 10.0 * std::log10(ps / pn);
}

MixResult MixAtSnr(const Waveform& speech, const Waveform& music,
                   double snr_db, std::uint64_t seed) {
  speech.Validate();
  music.Validate();
  if (!std::isfinite(snr_db))
    throw ArgumentError("SNR must be finite; omit the music instead of mixing at +inf");
  if (speech.sample_rate != music.sample_rate)
    throw ArgumentError("speech and music sample rates differ (" +
                        std::to_string(speech.sample_rate) + " vs " +
                        std::to_string(music.sample_rate) + ")");
  if (speech.size() == 0) throw DataError("empty speech signal");
  if (music.size() == 0) throw DataError("empty music signal");

  const std::vector<bool> active = ActiveSamples(speech);
  const double speech_power = ActivePower(speech, active);
  if (speech_power <= 0.0) throw DataError("speech signal is silent");

  std::mt19937_64 rng(seed);
  const std::size_t n = speech.size(), m = music.size();
  Waveform fitted;
  fitted.sample_rate = music.sample_rate;
  fitted.samples.resize(n);
  if (m >= n) {
    std::uniform_int_distribution<std::size_t> pick(0, m - n);
    const std::size_t offset = pick(rng);
    for (std::size_t i = 0; i < n; ++i) fitted.samples[i] = music.samples[offset + i];
  } else {
    std::uniform_int_distribution<std::size_t> pick(0, m - 1);
    const std::size_t offset = pick(rng);
    for (std::size_t i = 0; i < n; ++i)
      fitted.samples[i] = music.samples[(offset + i) % m];
  }
  const double music_power = ActivePower(fitted, active);
  if (music_power <= 0.0) throw DataError("music signal is silent over the speech region");

  MixResult result;
  result.gain = std::sqrt(speech_power / (music_power * std::pow(10.0, snr_db / 10.0)));
  result.scaled_music = std::move(fitted);
  for (double& s : result.scaled_music.samples) s *= result.gain;
  result.mixture.sample_rate = speech.sample_rate;
  result.mixture.samples.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    result.mixture.samples[i] = speech.samples[i] + result.scaled_music.samples[i];
  return result;
}

}  // namespace bgmtts::dsp
