// Copyright 2026 The bgmtts Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "bgmtts/ssrn/train.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>

#include "bgmtts/base/error.h"
#include "bgmtts/dsp/metrics.h"
#include "bgmtts/gsttts/losses.h"

namespace bgmtts::ssrn {

namespace {

dsp::MagnitudeSpectrogram Denormalized(const RealMatrix& normalized, const SsrnAssets& assets) {
  dsp::MagnitudeSpectrogram m;
  m.values = assets.magnitude_normalizer.Denormalize(normalized);
  m.params = assets.features.stft;
  return m;
}

}  // namespace

SsrnAssets FitSsrnAssets(const corpus::Manifest& manifest, const dsp::FeatureConfig& features) {
  if (manifest.records.empty()) throw DataError("manifest is empty");
  SsrnAssets a;
  a.features = features;
  bool first = true;
  for (const auto& rec : manifest.records) {
    const dsp::UtteranceFeatures f = dsp::ComputeFeatures(manifest.Load(rec), features);
    a.mel_normalizer.Accumulate(f.mel.values, first);
    a.magnitude_normalizer.Accumulate(f.magnitude.values, first);
    first = false;
  }
  return a;
}

SsrnExample MakeSsrnExample(const std::string& id, const dsp::Waveform& wave,
                            const SsrnAssets& assets) {
  const int r = assets.features.reduction;
  const dsp::UtteranceFeatures f = dsp::ComputeFeatures(wave, assets.features);
  const Eigen::Index coarse = f.mel.values.rows() / r;
  if (coarse < 1) throw DataError("utterance " + id + " is shorter than one coarse frame");
  SsrnExample ex;
  ex.id = id;
  ex.coarse = assets.mel_normalizer.Normalize(f.coarse.values.topRows(coarse));
  ex.magnitude = assets.magnitude_normalizer.Normalize(f.magnitude.values.topRows(coarse * r));
  return ex;
}

std::vector<SsrnExample> MakeSsrnExamples(const corpus::Manifest& manifest,
                                          const SsrnAssets& assets) {
  std::vector<SsrnExample> out;
  for (const auto& rec : manifest.records)
    out.push_back(MakeSsrnExample(rec.id, manifest.Load(rec), assets));
  return out;
}

std::vector<double> TrainSsrn(Ssrn& model, const SsrnAssets& assets,
                              const std::vector<SsrnExample>& examples,
                              const SsrnTrainOptions& options) {
  if (examples.empty()) throw DataError("no training examples");
  if (options.steps < 1 || options.batch_size < 1 || options.crop_frames < 1)
    throw ArgumentError("steps, batch_size and crop_frames must be positive");
  const int r = model.config().factor;
  std::mt19937_64 rng(options.seed);
  std::uniform_int_distribution<std::size_t> pick(0, examples.size() - 1);
  nn::Adam adam(model.params(), options.adam);
  std::ofstream log;
  if (!options.log_path.empty()) {
    if (options.log_path.has_parent_path())
      std::filesystem::create_directories(options.log_path.parent_path());
    log.open(options.log_path);
  }

  std::vector<double> losses;
  const double inv_batch = 1.0 / options.batch_size;
  for (int step = 1; step <= options.steps; ++step) {
    model.params().ZeroGrad();
    double l1 = 0.0, d_bd = 0.0;
    for (int b = 0; b < options.batch_size; ++b) {
      const SsrnExample& ex = examples[pick(rng)];
      const int frames = static_cast<int>(ex.coarse.rows());
      const int take = std::min(options.crop_frames, frames);
      const int start = std::uniform_int_distribution<int>(0, frames - take)(rng);
      const RealMatrix target = ex.magnitude.middleRows(start * r, take * r);
      const gsttts::TtsLossTerms loss =
          gsttts::TtsLoss(model.Forward(ex.coarse.middleRows(start, take)), target);
      nn::Backward(nn::Scale(nn::Add(loss.l1, loss.d_bd), inv_batch));
      l1 += loss.l1.scalar();
      d_bd += loss.d_bd.scalar();
    }
    const double value = l1 * inv_batch + d_bd * inv_batch;
    if (!std::isfinite(value))
      throw NumericalError("SSRN loss became non-finite at step " + std::to_string(step));
    adam.Step(model.params());
    losses.push_back(value);
    if (log.is_open())
      log << nlohmann::json{{"step", step}, {"l1", l1 * inv_batch}, {"d_bd", d_bd * inv_batch},
                            {"loss", value}}.dump()
          << '\n';
  }
  if (!options.checkpoint_path.empty())
    SaveSsrn(options.checkpoint_path, model, assets, &adam, options.steps);
  return losses;
}

double EvaluateLsd(const Ssrn& model, const SsrnAssets& assets,
                   const std::vector<SsrnExample>& examples) {
  if (examples.empty()) throw DataError("no evaluation examples");
  double total = 0.0;
  for (const auto& ex : examples)
    total += dsp::LogSpectralDistance(Denormalized(ex.magnitude, assets),
                                      Denormalized(model.Predict(ex.coarse), assets));
  return total / static_cast<double>(examples.size());
}

double ConstantPredictorLsd(double value, const SsrnAssets& assets,
                            const std::vector<SsrnExample>& examples) {
  if (examples.empty()) throw DataError("no evaluation examples");
  double total = 0.0;
  for (const auto& ex : examples) {
    const RealMatrix constant = RealMatrix::Constant(ex.magnitude.rows(), ex.magnitude.cols(), value);
    total += dsp::LogSpectralDistance(Denormalized(ex.magnitude, assets),
                                      Denormalized(constant, assets));
  }
  return total / static_cast<double>(examples.size());
}

dsp::MagnitudeSpectrogram PredictMagnitude(const Ssrn& model, const SsrnAssets& assets,
                                           const RealMatrix& coarse,
                                           const dsp::LogRangeNormalizer& mel_normalizer) {
  const RealMatrix rescaled = assets.mel_normalizer.Normalize(mel_normalizer.Denormalize(coarse));
  return Denormalized(model.Predict(rescaled), assets);
}

}  // namespace bgmtts::ssrn
