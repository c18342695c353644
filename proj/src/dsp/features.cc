// Copyright 2026 The bgmtts Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "bgmtts/dsp/features.h"

namespace bgmtts::dsp {

void to_json(nlohmann::json& j, const FeatureConfig& c) {
  j = {{"fft_size", c.stft.fft_size}, {"win_size", c.stft.win_size},
       {"hop_size", c.stft.hop_size}, {"window", WindowName(c.stft.window)},
       {"n_mels", c.n_mels},          {"fmin_hz", c.fmin_hz},
       {"fmax_hz", c.fmax_hz},        {"reduction", c.reduction}};
}

void from_json(const nlohmann::json& j, FeatureConfig& c) {
  FeatureConfig d;
  c.stft.fft_size = j.value("fft_size", d.stft.fft_size);
  c.stft.win_size = j.value("win_size", d.stft.win_size);
  c.stft.hop_size = j.value("hop_size", d.stft.hop_size);
  c.stft.window = WindowFromName(j.value("window", WindowName(d.stft.window)));
  c.n_mels = j.value("n_mels", d.n_mels);
  c.fmin_hz = j.value("fmin_hz", d.fmin_hz);
  c.fmax_hz = j.value("fmax_hz", d.fmax_hz);
  c.reduction = j.value("reduction", d.reduction);
  c.stft.Validate();
}

void to_json(nlohmann::json& j, const LogRangeNormalizer& n) {
  j = {{"log_floor", n.log_floor}, {"log_min", n.log_min}, {"log_max", n.log_max}};
}

void from_json(const nlohmann::json& j, LogRangeNormalizer& n) {
  n.log_floor = j.at("log_floor");
  n.log_min = j.at("log_min");
  n.log_max = j.at("log_max");
}

UtteranceFeatures ComputeFeatures(const Waveform& wave, const FeatureConfig& config) {
  UtteranceFeatures f;
  f.magnitude = Magnitude(Stft(wave, config.stft));
  f.mel = MelProject(f.magnitude, config.n_mels, config.fmin_hz, config.fmax_hz);
  f.coarse = DownsampleMelTime(f.mel, config.reduction);
  return f;
}

}  // namespace bgmtts::dsp
