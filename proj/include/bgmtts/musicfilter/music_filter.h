// Copyright 2026 The bgmtts Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef BGMTTS_MUSICFILTER_MUSIC_FILTER_H_
#define BGMTTS_MUSICFILTER_MUSIC_FILTER_H_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <vector>

#include <nlohmann/json.hpp>

#include "bgmtts/dsp/stft.h"
#include "bgmtts/nn/layers.h"
#include "bgmtts/nn/optim.h"

namespace bgmtts::musicfilter {

// One 2-D convolution over the (time, frequency) plane.
struct ConvSpec {
  int kernel_t = 1, kernel_f = 1;
  int dilation_t = 1, dilation_f = 1;
  int channels = 8;

  bool operator==(const ConvSpec&) const = default;
};

// conv stack (+BN, ReLU) -> BiLSTM -> FC + ReLU -> FC + sigmoid mask.
struct MusicFilterConfig {
  int num_bins = 513;
  std::vector<ConvSpec> convs;
  int lstm_hidden = 256;
  int fc_hidden = 512;
  bool batch_norm = true;

  // Six dilated layers, BiLSTM 256, FC 512.
  static MusicFilterConfig Desk();
  // Same topology with narrow layers; sized for single-core CPU training.
  static MusicFilterConfig Toy();
  // Three-layer network for finite-difference checks.
  static MusicFilterConfig Micro(int num_bins);

  bool operator==(const MusicFilterConfig&) const = default;
};

void to_json(nlohmann::json& j, const MusicFilterConfig& c);
void from_json(const nlohmann::json& j, MusicFilterConfig& c);

inline constexpr const char* kFilterCheckpointKind = "musicfilter";

// Mask-predicting network. Inputs are linear magnitudes [frames x bins];
// the network sees log1p(magnitude) and its mask multiplies the linear
// magnitude.
class MusicFilter {
 public:
  MusicFilter(const MusicFilterConfig& config, std::uint64_t seed);
  MusicFilter(const MusicFilter&) = delete;
  MusicFilter& operator=(const MusicFilter&) = delete;

  // noisy holds `batch` sequences of `steps` frames, sequence major:
  // [batch*steps x bins]. Returns the mask as a graph node.
  nn::Var Forward(const RealMatrix& noisy, int batch, int steps, bool training) const;

  // mean over valid bins of (mask .* noisy - clean)^2. `valid` is an
  // optional [batch*steps x 1] 0/1 frame mask.
  nn::Var Loss(const RealMatrix& noisy, const RealMatrix& clean, int batch, int steps,
               const RealMatrix* valid, bool training) const;

  // Inference on one utterance (batch-norm running statistics).
  dsp::Mask PredictMask(const dsp::MagnitudeSpectrogram& noisy) const;
  // stft -> mask -> noisy phase -> istft; output length equals input length.
  dsp::Waveform Filter(const dsp::Waveform& noisy) const;

  const MusicFilterConfig& config() const { return config_; }
  const dsp::StftParams& stft() const { return stft_; }
  nn::ParameterSet& params() { return *params_; }
  const nn::ParameterSet& params() const { return *params_; }

  // optimizer may be null; `step` is the training step reached.
  void Save(const std::filesystem::path& path, nn::Adam* optimizer, std::int64_t step) const;
  // Reads the config from the file.
  static std::unique_ptr<MusicFilter> Load(const std::filesystem::path& path,
                                           std::int64_t* step = nullptr);
  // Throws DataError unless the stored config equals `expected`.
  static std::unique_ptr<MusicFilter> Load(const std::filesystem::path& path,
                                           const MusicFilterConfig& expected);

 private:
  MusicFilterConfig config_;
  dsp::StftParams stft_;
  std::unique_ptr<nn::ParameterSet> params_;
  std::vector<nn::Conv2dLayer> convs_;
  nn::BiLstm lstm_;
  nn::Linear fc_, out_;
};

using MaskFunction = std::function<dsp::Mask(const dsp::MagnitudeSpectrogram&)>;

// Masked-magnitude reconstruction with the noisy phase.
dsp::Waveform FilterWithMask(const dsp::Waveform& noisy, const dsp::StftParams& params,
                             const MaskFunction& mask_fn);

}  // namespace bgmtts::musicfilter

#endif  // BGMTTS_MUSICFILTER_MUSIC_FILTER_H_
