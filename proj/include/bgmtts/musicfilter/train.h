// Copyright 2026 The bgmtts Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef BGMTTS_MUSICFILTER_TRAIN_H_
#define BGMTTS_MUSICFILTER_TRAIN_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "bgmtts/corpus/manifest.h"
#include "bgmtts/musicfilter/music_filter.h"

namespace bgmtts::musicfilter {

struct SpectrogramPair {
  std::string id;
  RealMatrix noisy;  // [frames x bins] linear magnitude
  RealMatrix clean;
};

// Pairs noisy and clean records by id.
std::vector<SpectrogramPair> LoadSpectrogramPairs(const corpus::Manifest& noisy,
                                                  const corpus::Manifest& clean,
                                                  const dsp::StftParams& params);

struct FilterTrainOptions {
  nn::AdamConfig adam;  // lr 1e-3, betas (0.9, 0.999)
  int steps = 2000;
  int batch_size = 4;
  // Training examples are random crops of this many frames; shorter
  // utterances are zero padded and the padding is excluded from the loss.
  int crop_frames = 64;
  int checkpoint_every = 0;  // 0: save only at the end (if a path is set)
  std::filesystem::path checkpoint_path;
  std::filesystem::path log_path;  // JSON Lines {step, loss}
  std::uint64_t seed = 0;
};

struct FilterTrainResult {
  std::vector<double> losses;  // one per step
};

// Throws NumericalError when the loss becomes non-finite.
FilterTrainResult TrainFilter(MusicFilter& model, const std::vector<SpectrogramPair>& data,
                              const FilterTrainOptions& options);

struct WavePair {
  dsp::Waveform clean;
  dsp::Waveform noisy;
};

struct FilterEvaluation {
  double si_snr_noisy = 0.0;     // mean SI-SNR(clean, noisy), dB
  double si_snr_filtered = 0.0;  // mean SI-SNR(clean, filtered), dB
  double lsd_noisy = 0.0;        // mean LSD(clean, noisy), dB
  double lsd_filtered = 0.0;
  int count = 0;

  double si_snr_improvement() const { return si_snr_filtered - si_snr_noisy; }
};

FilterEvaluation EvaluateFilter(const MaskFunction& mask_fn, const dsp::StftParams& params,
                                const std::vector<WavePair>& pairs);

}  // namespace bgmtts::musicfilter

#endif  // BGMTTS_MUSICFILTER_TRAIN_H_
