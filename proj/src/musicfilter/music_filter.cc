// Copyright 2026 The bgmtts Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "bgmtts/musicfilter/music_filter.h"

#include "bgmtts/base/error.h"
#include "bgmtts/nn/checkpoint.h"

namespace bgmtts::musicfilter {

MusicFilterConfig MusicFilterConfig::Desk() {
  MusicFilterConfig c;
  c.convs = {{1, 7, 1, 1, 16}, {7, 1, 1, 1, 16}, {5, 5, 1, 1, 16},
             {5, 5, 2, 1, 16}, {5, 5, 4, 1, 16}, {1, 1, 1, 1, 4}};
  return c;
}

MusicFilterConfig MusicFilterConfig::Toy() {
  MusicFilterConfig c;
  c.convs = {{1, 7, 1, 1, 6}, {7, 1, 1, 1, 6}, {5, 5, 1, 1, 6},
             {5, 5, 2, 1, 6}, {5, 5, 4, 1, 6}, {1, 1, 1, 1, 2}};
  c.lstm_hidden = 64;
  c.fc_hidden = 128;
  return c;
}

MusicFilterConfig MusicFilterConfig::Micro(int num_bins) {
  MusicFilterConfig c;
  c.num_bins = num_bins;
  c.convs = {{1, 3, 1, 1, 2}, {3, 1, 1, 1, 2}, {3, 3, 2, 1, 1}};
  c.lstm_hidden = 3;
  c.fc_hidden = 4;
  return c;
}

void to_json(nlohmann::json& j, const MusicFilterConfig& c) {
  nlohmann::json convs = nlohmann::json::array();
  for (const auto& s : c.convs)
    convs.push_back({{"kernel", {s.kernel_t, s.kernel_f}},
                     {"dilation", {s.dilation_t, s.dilation_f}},
                     {"channels", s.channels}});
  j = {{"num_bins", c.num_bins},       {"convs", convs},
       {"lstm_hidden", c.lstm_hidden}, {"fc_hidden", c.fc_hidden},
       {"batch_norm", c.batch_norm}};
}

void from_json(const nlohmann::json& j, MusicFilterConfig& c) {
  c = MusicFilterConfig();
  c.num_bins = j.value("num_bins", c.num_bins);
  c.lstm_hidden = j.value("lstm_hidden", c.lstm_hidden);
  c.fc_hidden = j.value("fc_hidden", c.fc_hidden);
  c.batch_norm = j.value("batch_norm", c.batch_norm);
  c.convs.clear();
  for (const auto& s : j.at("convs")) {
    ConvSpec spec;
    spec.kernel_t = s.at("kernel").at(0);
    spec.kernel_f = s.at("kernel").at(1);
    spec.dilation_t = s.at("dilation").at(0);
    spec.dilation_f = s.at("dilation").at(1);
    spec.channels = s.at("channels");
    c.convs.push_back(spec);
  }
}

MusicFilter::MusicFilter(const MusicFilterConfig& config, std::uint64_t seed)
    : config_(config), params_(std::make_unique<nn::ParameterSet>(seed)) {
  if (config_.convs.empty()) throw ArgumentError("music filter needs at least one conv layer");
  stft_.Validate();
  if (config_.num_bins < 1) throw ArgumentError("music filter needs at least one bin");
  int in = 1;
  for (std::size_t i = 0; i < config_.convs.size(); ++i) {
    const ConvSpec& s = config_.convs[i];
    convs_.emplace_back(*params_, "conv" + std::to_string(i), in, s.channels, s.kernel_t,
                        s.kernel_f, 1, 1, s.dilation_t, s.dilation_f, config_.batch_norm);
    in = s.channels;
  }
  lstm_ = nn::BiLstm(*params_, "lstm", in * config_.num_bins, config_.lstm_hidden);
  fc_ = nn::Linear(*params_, "fc", 2 * config_.lstm_hidden, config_.fc_hidden);
  out_ = nn::Linear(*params_, "mask", config_.fc_hidden, config_.num_bins);
}

nn::Var MusicFilter::Forward(const RealMatrix& noisy, int batch, int steps,
                             bool training) const {
  const int bins = config_.num_bins;
  if (noisy.cols() != bins || noisy.rows() != static_cast<Eigen::Index>(batch) * steps)
    throw ArgumentError("music filter input must be [batch*steps x " + std::to_string(bins) +
                        "]");
  const RealMatrix features = noisy.array().log1p().matrix();
  nn::Var x = nn::Constant(Eigen::Map<const RealMatrix>(features.data(), 1, features.size()));
  int height = steps, width = bins;
  for (const auto& conv : convs_) x = nn::Relu(conv.Forward(x, batch, &height, &width, training));
  x = nn::ChannelsToFrames(x, batch, steps, bins);
  x = lstm_(x, batch, steps);
  x = nn::Relu(fc_(x));
  return nn::Sigmoid(out_(x));
}

nn::Var MusicFilter::Loss(const RealMatrix& noisy, const RealMatrix& clean, int batch,
                          int steps, const RealMatrix* valid, bool training) const {
  if (clean.rows() != noisy.rows() || clean.cols() != noisy.cols())
    throw ArgumentError("noisy and clean spectrograms differ in shape");
  const nn::Var mask = Forward(noisy, batch, steps, training);
  const nn::Var diff = nn::Sub(nn::Mul(mask, nn::Constant(noisy)), nn::Constant(clean));
  const nn::Var sq = nn::Mul(diff, diff);
  if (!valid) return nn::Mean(sq);
  if (valid->rows() != noisy.rows() || valid->cols() != 1)
    throw ArgumentError("validity mask must be [batch*steps x 1]");
  const double count = valid->sum();
  if (count <= 0.0) throw ArgumentError("validity mask selects no frames");
  RealMatrix weights = valid->replicate(1, noisy.cols());
  weights *= static_cast<double>(noisy.rows()) / count;
  return nn::WeightedMean(sq, weights);
}

dsp::Mask MusicFilter::PredictMask(const dsp::MagnitudeSpectrogram& noisy) const {
  nn::NoGradGuard no_grad;
  const int frames = static_cast<int>(noisy.num_frames());
  return dsp::Mask{Forward(noisy.values, 1, frames, false).value()};
}

dsp::Waveform MusicFilter::Filter(const dsp::Waveform& noisy) const {
  return FilterWithMask(noisy, stft_,
                        [this](const dsp::MagnitudeSpectrogram& m) { return PredictMask(m); });
}

void MusicFilter::Save(const std::filesystem::path& path, nn::Adam* optimizer,
                       std::int64_t step) const {
  nlohmann::json header = {
      {"kind", kFilterCheckpointKind},
      {"config", config_},
      {"step", step},
      {"input_feature", "log1p_magnitude"},
      {"stft",
       {{"fft_size", stft_.fft_size}, {"win_size", stft_.win_size},
        {"hop_size", stft_.hop_size}, {"window", dsp::WindowName(stft_.window)}}}};
  nn::WriteCheckpoint(path, nn::PackModel(header, *params_, optimizer));
}

std::unique_ptr<MusicFilter> MusicFilter::Load(const std::filesystem::path& path,
                                               std::int64_t* step) {
  const nn::CheckpointData data = nn::ReadCheckpoint(path);
  const MusicFilterConfig config = data.header.at("config").get<MusicFilterConfig>();
  nn::CheckHeader(data, kFilterCheckpointKind, nlohmann::json(config));
  auto model = std::make_unique<MusicFilter>(config, 0);
  nn::UnpackModel(data, *model->params_, nullptr);
  if (step) *step = data.header.value("step", std::int64_t{0});
  return model;
}

std::unique_ptr<MusicFilter> MusicFilter::Load(const std::filesystem::path& path,
                                               const MusicFilterConfig& expected) {
  const nn::CheckpointData data = nn::ReadCheckpoint(path);
  nn::CheckHeader(data, kFilterCheckpointKind, nlohmann::json(expected));
  auto model = std::make_unique<MusicFilter>(expected, 0);
  nn::UnpackModel(data, *model->params_, nullptr);
  return model;
}

dsp::Waveform FilterWithMask(const dsp::Waveform& noisy, const dsp::StftParams& params,
                             const MaskFunction& mask_fn) {
  noisy.Validate();
  if (noisy.sample_rate != dsp::kDefaultSampleRate)
    throw DataError("music filter expects " + std::to_string(dsp::kDefaultSampleRate) +
                    " Hz audio, got " + std::to_string(noisy.sample_rate));
  const dsp::ComplexSpectrogram spec = dsp::Stft(noisy, params);
  const dsp::MagnitudeSpectrogram mag = dsp::Magnitude(spec);
  const dsp::MagnitudeSpectrogram masked = dsp::ApplyMask(mag, mask_fn(mag));
  dsp::Waveform out = dsp::Istft(dsp::Polar(masked, dsp::Phase(spec), spec.signal_length));
  out.sample_rate = noisy.sample_rate;
  return out;
}

}  // namespace bgmtts::musicfilter
