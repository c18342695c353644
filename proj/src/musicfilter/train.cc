// Copyright 2026 The bgmtts Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "bgmtts/musicfilter/train.h"

#include <cmath>
#include <fstream>
#include <random>

#include <nlohmann/json.hpp>

#include "bgmtts/base/error.h"
#include "bgmtts/dsp/metrics.h"

namespace bgmtts::musicfilter {

std::vector<SpectrogramPair> LoadSpectrogramPairs(const corpus::Manifest& noisy,
                                                  const corpus::Manifest& clean,
                                                  const dsp::StftParams& params) {
  std::vector<SpectrogramPair> out;
  for (const auto& rec : noisy.records) {
    const corpus::UtteranceRecord* ref = clean.Find(rec.id);
    if (!ref) throw DataError("no clean counterpart for " + rec.id);
    SpectrogramPair p;
    p.id = rec.id;
    p.noisy = dsp::Magnitude(dsp::Stft(noisy.Load(rec), params)).values;
    p.clean = dsp::Magnitude(dsp::Stft(clean.Load(*ref), params)).values;
    if (p.noisy.rows() != p.clean.rows())
      throw DataError("noisy and clean lengths differ for " + rec.id);
    out.push_back(std::move(p));
  }
  if (out.empty()) throw DataError("no training pairs");
  return out;
}

FilterTrainResult TrainFilter(MusicFilter& model, const std::vector<SpectrogramPair>& data,
                              const FilterTrainOptions& options) {
  if (data.empty()) throw DataError("no training pairs");
  if (options.steps < 1 || options.batch_size < 1 || options.crop_frames < 1)
    throw ArgumentError("steps, batch_size and crop_frames must be positive");
  const int bins = model.config().num_bins;
  const int batch = options.batch_size;
  const int crop = options.crop_frames;
  std::mt19937_64 rng(options.seed);
  std::uniform_int_distribution<std::size_t> pick(0, data.size() - 1);
  nn::Adam adam(model.params(), options.adam);
  std::ofstream log;
  if (!options.log_path.empty()) {
    if (options.log_path.has_parent_path())
      std::filesystem::create_directories(options.log_path.parent_path());
    log.open(options.log_path);
  }

  FilterTrainResult result;
  RealMatrix noisy(batch * crop, bins), clean(batch * crop, bins), valid(batch * crop, 1);
  for (int step = 1; step <= options.steps; ++step) {
    noisy.setZero();
    clean.setZero();
    valid.setZero();
    for (int b = 0; b < batch; ++b) {
      const SpectrogramPair& p = data[pick(rng)];
      const int frames = static_cast<int>(p.noisy.rows());
      const int start =
          frames > crop ? std::uniform_int_distribution<int>(0, frames - crop)(rng) : 0;
      const int take = std::min(crop, frames);
      noisy.middleRows(b * crop, take) = p.noisy.middleRows(start, take);
      clean.middleRows(b * crop, take) = p.clean.middleRows(start, take);
      valid.middleRows(b * crop, take).setOnes();
    }
    model.params().ZeroGrad();
    const nn::Var loss = model.Loss(noisy, clean, batch, crop, &valid, true);
    const double value = loss.scalar();
    if (!std::isfinite(value))
      throw NumericalError("music filter loss became non-finite at step " +
                           std::to_string(step));
    nn::Backward(loss);
    adam.Step(model.params());
    result.losses.push_back(value);
    if (log.is_open()) log << nlohmann::json{{"step", step}, {"loss", value}}.dump() << '\n';
    const bool periodic = options.checkpoint_every > 0 && step % options.checkpoint_every == 0;
    if (!options.checkpoint_path.empty() && (periodic || step == options.steps))
      model.Save(options.checkpoint_path, &adam, step);
  }
  return result;
}

FilterEvaluation EvaluateFilter(const MaskFunction& mask_fn, const dsp::StftParams& params,
                                const std::vector<WavePair>& pairs) {
  FilterEvaluation e;
  for (const auto& p : pairs) {
    const dsp::Waveform filtered = FilterWithMask(p.noisy, params, mask_fn);
    const auto clean_mag = dsp::Magnitude(dsp::Stft(p.clean, params));
    e.si_snr_noisy += dsp::SiSnr(p.clean, p.noisy);
    e.si_snr_filtered += dsp::SiSnr(p.clean, filtered);
    e.lsd_noisy += dsp::LogSpectralDistance(clean_mag, dsp::Magnitude(dsp::Stft(p.noisy, params)));
    e.lsd_filtered +=
        dsp::LogSpectralDistance(clean_mag, dsp::Magnitude(dsp::Stft(filtered, params)));
    ++e.count;
  }
  if (e.count == 0) throw DataError("no evaluation pairs");
  e.si_snr_noisy /= e.count;
  e.si_snr_filtered /= e.count;
  e.lsd_noisy /= e.count;
  e.lsd_filtered /= e.count;
  return e;
}

}  // namespace bgmtts::musicfilter
