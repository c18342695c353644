// Copyright 2026 The bgmtts Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef BGMTTS_DSP_FEATURES_H_
#define BGMTTS_DSP_FEATURES_H_

#include <nlohmann/json.hpp>

#include "bgmtts/dsp/mel.h"
#include "bgmtts/dsp/stft.h"

namespace bgmtts::dsp {

// Analysis settings shared by the synthesis models.
struct FeatureConfig {
  StftParams stft;  // 1024 / 1024 / 256, Hann
  int n_mels = kNumMels;
  double fmin_hz = 0.0;
  double fmax_hz = 8000.0;
  int reduction = 4;  // mel frames per decoder frame

  bool operator==(const FeatureConfig&) const = default;
};

void to_json(nlohmann::json& j, const FeatureConfig& c);
void from_json(const nlohmann::json& j, FeatureConfig& c);
void to_json(nlohmann::json& j, const LogRangeNormalizer& n);
void from_json(const nlohmann::json& j, LogRangeNormalizer& n);

struct UtteranceFeatures {
  MagnitudeSpectrogram magnitude;  // linear
  MelSpectrogram mel;              // linear
  MelSpectrogram coarse;           // every reduction-th mel frame
};

UtteranceFeatures ComputeFeatures(const Waveform& wave, const FeatureConfig& config);

}  // namespace bgmtts::dsp

#endif  // BGMTTS_DSP_FEATURES_H_
