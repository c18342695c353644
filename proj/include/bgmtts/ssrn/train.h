// Copyright 2026 The bgmtts Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef BGMTTS_SSRN_TRAIN_H_
#define BGMTTS_SSRN_TRAIN_H_

#include <filesystem>
#include <string>
#include <vector>

#include "bgmtts/corpus/manifest.h"
#include "bgmtts/ssrn/ssrn.h"

namespace bgmtts::ssrn {

struct SsrnExample {
  std::string id;
  RealMatrix coarse;     // normalized, [frames x n_mels]
  RealMatrix magnitude;  // normalized, [frames*factor x bins]
};

SsrnAssets FitSsrnAssets(const corpus::Manifest& manifest, const dsp::FeatureConfig& features);

// Drops trailing STFT frames so the target is exactly factor times longer
// than the input.
SsrnExample MakeSsrnExample(const std::string& id, const dsp::Waveform& wave,
                            const SsrnAssets& assets);
std::vector<SsrnExample> MakeSsrnExamples(const corpus::Manifest& manifest,
                                          const SsrnAssets& assets);

struct SsrnTrainOptions {
  nn::AdamConfig adam{2e-3, 0.5, 0.9, 1e-6, 1.0};
  int steps = 500;
  int batch_size = 4;
  int crop_frames = 16;  // coarse frames per example
  std::uint64_t seed = 0;
  std::filesystem::path log_path;
  std::filesystem::path checkpoint_path;
};

// Returns the per-step L1 + binary divergence. Throws NumericalError on a
// non-finite loss.
std::vector<double> TrainSsrn(Ssrn& model, const SsrnAssets& assets,
                              const std::vector<SsrnExample>& examples,
                              const SsrnTrainOptions& options);

// Mean log-spectral distance in dB between denormalized predictions and
// targets.
double EvaluateLsd(const Ssrn& model, const SsrnAssets& assets,
                   const std::vector<SsrnExample>& examples);
// Same metric for a predictor that outputs `value` everywhere.
double ConstantPredictorLsd(double value, const SsrnAssets& assets,
                            const std::vector<SsrnExample>& examples);

// Denormalized linear magnitude for a coarse mel normalized with
// `mel_normalizer` (rescaled into the SSRN's own mel statistics first).
dsp::MagnitudeSpectrogram PredictMagnitude(const Ssrn& model, const SsrnAssets& assets,
                                           const RealMatrix& coarse,
                                           const dsp::LogRangeNormalizer& mel_normalizer);

}  // namespace bgmtts::ssrn

#endif  // BGMTTS_SSRN_TRAIN_H_
