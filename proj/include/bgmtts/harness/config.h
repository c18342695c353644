// Copyright 2026 The bgmtts Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef BGMTTS_HARNESS_CONFIG_H_
#define BGMTTS_HARNESS_CONFIG_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "bgmtts/dsp/features.h"
#include "bgmtts/gsttts/config.h"
#include "bgmtts/gsttts/train.h"
#include "bgmtts/musicfilter/music_filter.h"
#include "bgmtts/musicfilter/train.h"
#include "bgmtts/ssrn/ssrn.h"
#include "bgmtts/ssrn/train.h"

namespace bgmtts::harness {

// Synthetic stand-in corpora.
struct ToyDataConfig {
  int utterances = 120;  // single-speaker target corpus
  // Multi-speaker corpus shared by the music filter and the SSRN.
  int universal_utterances = 150;
  int universal_speakers = 8;
  int filter_music_files = 10;  // mixed into the universal corpus
  int target_music_files = 6;   // mixed into the target corpus only
  double music_seconds = 6.0;
  double snr_lo_db = 0.0;
  double snr_hi_db = 20.0;
  double test_fraction = 0.2;
};

struct DivergenceConfig {
  int reference_step = 100;
  double factor = 100.0;
};

struct PipelineConfig {
  std::uint64_t seed = 1;
  ToyDataConfig data;
  dsp::FeatureConfig features;

  musicfilter::MusicFilterConfig filter = musicfilter::MusicFilterConfig::Toy();
  musicfilter::FilterTrainOptions filter_train;

  gsttts::Text2MelConfig tts;  // vocab_size is filled from the corpus
  gsttts::TtsTrainOptions tts_train;
  // Unset: DefaultAqcWeight of the clean share.
  std::optional<double> lambda;

  ssrn::SsrnConfig ssrn;
  ssrn::SsrnTrainOptions ssrn_train;

  std::vector<double> clean_ratios = {0.1, 0.3, 0.5};
  std::vector<std::string> variants = {"TTS", "GST", "GST+Aux", "GST+MF", "GST+MF+Aux"};
  DivergenceConfig divergence;

  int max_frames = 200;
  int griffin_lim_iters = 60;

  static PipelineConfig Defaults();
};

void to_json(nlohmann::json& j, const PipelineConfig& c);
// Missing keys keep their defaults; unknown keys throw ArgumentError.
void from_json(const nlohmann::json& j, PipelineConfig& c);

PipelineConfig LoadPipelineConfig(const std::filesystem::path& path);

}  // namespace bgmtts::harness

#endif  // BGMTTS_HARNESS_CONFIG_H_
