// Copyright 2026 The bgmtts Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef BGMTTS_GSTTTS_TRAIN_H_
#define BGMTTS_GSTTTS_TRAIN_H_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "bgmtts/corpus/manifest.h"
#include "bgmtts/corpus/text.h"
#include "bgmtts/dsp/features.h"
#include "bgmtts/gsttts/losses.h"
#include "bgmtts/gsttts/model.h"
#include "bgmtts/nn/optim.h"

namespace bgmtts::gsttts {

// Everything besides the weights needed to turn text and audio into model
// inputs.
struct TtsAssets {
  corpus::CharVocabulary vocabulary;
  dsp::FeatureConfig features;
  dsp::LogRangeNormalizer mel_normalizer;
};

// Vocabulary over all transcripts and normalizer statistics over all mels.
TtsAssets FitAssets(const corpus::Manifest& manifest, const dsp::FeatureConfig& features);

struct TtsExample {
  std::string id;
  std::vector<int> text;  // ends with kEos
  RealMatrix mel;         // normalized, [frames x n_mels], the reference
  RealMatrix coarse;      // normalized, every reduction-th frame, the target
  corpus::Quality quality = corpus::Quality::kClean;
  int label = 0;  // 0 clean, 1 degraded
};

RealMatrix NormalizedMel(const dsp::Waveform& wave, const TtsAssets& assets);

TtsExample MakeExample(const std::string& id, const std::string& transcript,
                       const dsp::Waveform& wave, corpus::Quality quality,
                       const TtsAssets& assets);

// Degraded records must be all NOISY or all FILTERED; mixing them throws
// DataError.
std::vector<TtsExample> MakeExamples(const corpus::Manifest& manifest,
                                     const std::vector<std::string>& ids,
                                     const TtsAssets& assets);

struct TtsTrainOptions {
  nn::AdamConfig adam{2e-3, 0.5, 0.9, 1e-6, 1.0};
  int steps = 1000;
  int batch_size = 8;
  double lambda = 0.01;
  double ga_weight = 1.0;  // 0 disables guided attention
  double ga_width = 0.2;
  bool stop_aqc_gradient = false;
  std::uint64_t seed = 0;
  std::filesystem::path log_path;         // JSON Lines, one record per step
  std::filesystem::path checkpoint_path;  // written at the end and every checkpoint_every
  int checkpoint_every = 0;
  // Called after every step; returning false stops training.
  std::function<bool(int step, const LossBundle&)> on_step;
};

struct TtsStepRecord {
  int step = 0;
  LossBundle losses;
  double aqc_accuracy = 0.0;
};

struct TtsTrainResult {
  std::vector<TtsStepRecord> history;
  bool stopped_early = false;
};

// Throws NumericalError when the objective becomes non-finite.
TtsTrainResult TrainTts(Text2Mel& model, const TtsAssets& assets,
                        const std::vector<TtsExample>& examples, const TtsTrainOptions& options);

// Single-item losses without a parameter update.
TotalLoss ExampleLoss(const Text2Mel& model, const TtsExample& example, double lambda,
                      double ga_weight, double ga_width, bool stop_aqc_gradient,
                      nn::Var* aqc_logits = nullptr);

struct QualityEvaluation {
  RealMatrix embeddings;  // [examples x quality_dim]
  std::vector<int> labels;
  std::vector<int> predictions;
  std::vector<std::string> ids;
  double accuracy = 0.0;
};

QualityEvaluation EvaluateQuality(const Text2Mel& model, const std::vector<TtsExample>& examples);

void SaveTts(const std::filesystem::path& path, const Text2Mel& model, const TtsAssets& assets,
             nn::Adam* optimizer = nullptr, std::int64_t step = 0,
             const nlohmann::json& training = {});

struct LoadedTts {
  std::unique_ptr<Text2Mel> model;
  TtsAssets assets;
  std::int64_t step = 0;
  nlohmann::json training;
};

LoadedTts LoadTts(const std::filesystem::path& path);

}  // namespace bgmtts::gsttts

#endif  // BGMTTS_GSTTTS_TRAIN_H_
