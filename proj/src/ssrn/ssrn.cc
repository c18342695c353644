// Copyright 2026 The bgmtts Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "bgmtts/ssrn/ssrn.h"

#include <string>

#include "bgmtts/base/error.h"
#include "bgmtts/nn/checkpoint.h"

namespace bgmtts::ssrn {

namespace {

constexpr const char* kSsrnCheckpointKind = "ssrn";

std::string Name(const std::string& block, std::size_t i) {
  return block + "." + std::to_string(i);
}

}  // namespace

SsrnConfig SsrnConfig::Micro(int n_mels, int num_bins) {
  SsrnConfig c;
  c.n_mels = n_mels;
  c.hidden = 3;
  c.factor = 4;
  c.num_bins = num_bins;
  return c;
}

int SsrnConfig::upsample_blocks() const {
  int blocks = 0;
  for (int f = factor; f > 1; f /= 2) ++blocks;
  return blocks;
}

void SsrnConfig::Validate() const {
  if (n_mels < 1 || hidden < 1 || num_bins < 1) throw ArgumentError("SSRN widths must be positive");
  if (factor < 1 || (factor & (factor - 1)) != 0)
    throw ArgumentError("SSRN upsampling factor must be a power of two");
}

void to_json(nlohmann::json& j, const SsrnConfig& c) {
  j = {{"n_mels", c.n_mels}, {"hidden", c.hidden}, {"factor", c.factor}, {"num_bins", c.num_bins}};
}

void from_json(const nlohmann::json& j, SsrnConfig& c) {
  const SsrnConfig d;
  c.n_mels = j.value("n_mels", d.n_mels);
  c.hidden = j.value("hidden", d.hidden);
  c.factor = j.value("factor", d.factor);
  c.num_bins = j.value("num_bins", d.num_bins);
}

Ssrn::Ssrn(const SsrnConfig& config, std::uint64_t seed)
    : config_(config), params_(std::make_unique<nn::ParameterSet>(seed)) {
  config_.Validate();
  nn::ParameterSet& p = *params_;
  const int c = config_.hidden;
  in_ = nn::Conv1d(p, "in", config_.n_mels, c, 1, 1, false);
  pre_.emplace_back(p, "pre.0", c, 3, 1, false);
  pre_.emplace_back(p, "pre.1", c, 3, 3, false);
  for (int b = 0; b < config_.upsample_blocks(); ++b) {
    upsample_.emplace_back(p, Name("up", b), c, 2 * c);
    post_upsample_.emplace_back();
    post_upsample_.back().emplace_back(p, Name("up", b) + ".hc.0", c, 3, 1, false);
    post_upsample_.back().emplace_back(p, Name("up", b) + ".hc.1", c, 3, 3, false);
  }
  widen_ = nn::Conv1d(p, "widen", c, 2 * c, 1, 1, false);
  wide_.emplace_back(p, "wide.0", 2 * c, 3, 1, false);
  wide_.emplace_back(p, "wide.1", 2 * c, 3, 1, false);
  to_bins_ = nn::Conv1d(p, "bins", 2 * c, config_.num_bins, 1, 1, false);
  head_.emplace_back(p, "head.0", config_.num_bins, config_.num_bins, 1, 1, false);
  out_ = nn::Conv1d(p, "out", config_.num_bins, config_.num_bins, 1, 1, false);
}

nn::Var Ssrn::Forward(const RealMatrix& coarse) const {
  if (coarse.rows() < 1) throw ArgumentError("SSRN input has no frames");
  if (coarse.cols() != config_.n_mels) throw ArgumentError("SSRN input width does not match n_mels");
  const int c = config_.hidden;
  nn::Var x = in_(nn::Constant(coarse));
  for (const auto& hc : pre_) x = hc(x);
  for (std::size_t b = 0; b < upsample_.size(); ++b) {
    // Kernel-2 stride-2 transposed conv: each frame emits two frames.
    x = upsample_[b](x);
    x = nn::Reshape(x, 2 * x.rows(), c);
    for (const auto& hc : post_upsample_[b]) x = hc(x);
  }
  x = widen_(x);
  for (const auto& hc : wide_) x = hc(x);
  x = to_bins_(x);
  for (const auto& conv : head_) x = nn::Relu(conv(x));
  return out_(x);
}

RealMatrix Ssrn::Predict(const RealMatrix& coarse) const {
  nn::NoGradGuard no_grad;
  return nn::Sigmoid(Forward(coarse)).value();
}

void SaveSsrn(const std::filesystem::path& path, const Ssrn& model, const SsrnAssets& assets,
              nn::Adam* optimizer, std::int64_t step) {
  nlohmann::json header = {{"kind", kSsrnCheckpointKind},
                           {"config", model.config()},
                           {"step", step},
                           {"features", assets.features},
                           {"mel_normalizer", assets.mel_normalizer},
                           {"magnitude_normalizer", assets.magnitude_normalizer}};
  nn::WriteCheckpoint(path, nn::PackModel(header, model.params(), optimizer));
}

LoadedSsrn LoadSsrn(const std::filesystem::path& path) {
  const nn::CheckpointData data = nn::ReadCheckpoint(path);
  const SsrnConfig config = data.header.at("config").get<SsrnConfig>();
  nn::CheckHeader(data, kSsrnCheckpointKind, nlohmann::json(config));
  LoadedSsrn out;
  out.model = std::make_unique<Ssrn>(config, 0);
  nn::UnpackModel(data, out.model->params(), nullptr);
  out.assets.features = data.header.at("features").get<dsp::FeatureConfig>();
  out.assets.mel_normalizer = data.header.at("mel_normalizer").get<dsp::LogRangeNormalizer>();
  out.assets.magnitude_normalizer =
      data.header.at("magnitude_normalizer").get<dsp::LogRangeNormalizer>();
  out.step = data.header.value("step", std::int64_t{0});
  return out;
}

}  // namespace bgmtts::ssrn
