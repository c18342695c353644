// Copyright 2026 The bgmtts Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef BGMTTS_SSRN_SSRN_H_
#define BGMTTS_SSRN_SSRN_H_

#include <cstdint>
#include <filesystem>
#include <memory>
#include <vector>

#include <nlohmann/json.hpp>

#include "bgmtts/dsp/features.h"
#include "bgmtts/nn/layers.h"
#include "bgmtts/nn/optim.h"

namespace bgmtts::ssrn {

struct SsrnConfig {
  int n_mels = 80;
  int hidden = 64;
  int factor = 4;  // power of two; one upsampling block per doubling
  int num_bins = 513;

  // Small widths for finite-difference checks.
  static SsrnConfig Micro(int n_mels, int num_bins);

  int upsample_blocks() const;
  void Validate() const;
  bool operator==(const SsrnConfig&) const = default;
};

void to_json(nlohmann::json& j, const SsrnConfig& c);
void from_json(const nlohmann::json& j, SsrnConfig& c);

// Normalization of both sides of the mapping. The mel side uses its own
// statistics so any Text2Mel output can be rescaled into it.
struct SsrnAssets {
  dsp::FeatureConfig features;
  dsp::LogRangeNormalizer mel_normalizer;
  dsp::LogRangeNormalizer magnitude_normalizer;
};

// Non-causal conv stack: 1x1 conv and highway layers, then per doubling a
// stride-2 transposed conv (kernel 2) followed by highway layers, then
// 1x1 convs to the linear bins with a final sigmoid.
class Ssrn {
 public:
  Ssrn(const SsrnConfig& config, std::uint64_t seed);
  Ssrn(const Ssrn&) = delete;
  Ssrn& operator=(const Ssrn&) = delete;

  // coarse: [frames x n_mels] normalized -> logits [frames*factor x num_bins].
  nn::Var Forward(const RealMatrix& coarse) const;
  // Sigmoid of Forward without recording a graph; values in (0, 1).
  RealMatrix Predict(const RealMatrix& coarse) const;

  const SsrnConfig& config() const { return config_; }
  nn::ParameterSet& params() { return *params_; }
  const nn::ParameterSet& params() const { return *params_; }

 private:
  SsrnConfig config_;
  std::unique_ptr<nn::ParameterSet> params_;
  nn::Conv1d in_;
  std::vector<nn::HighwayConv1d> pre_;
  std::vector<nn::Linear> upsample_;
  std::vector<std::vector<nn::HighwayConv1d>> post_upsample_;
  nn::Conv1d widen_;
  std::vector<nn::HighwayConv1d> wide_;
  nn::Conv1d to_bins_;
  std::vector<nn::Conv1d> head_;
  nn::Conv1d out_;
};

void SaveSsrn(const std::filesystem::path& path, const Ssrn& model, const SsrnAssets& assets,
              nn::Adam* optimizer = nullptr, std::int64_t step = 0);

struct LoadedSsrn {
  std::unique_ptr<Ssrn> model;
  SsrnAssets assets;
  std::int64_t step = 0;
};

LoadedSsrn LoadSsrn(const std::filesystem::path& path);

}  // namespace bgmtts::ssrn

#endif  // BGMTTS_SSRN_SSRN_H_
