// Copyright 2026 The bgmtts Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "bgmtts/gsttts/model.h"

#include <cmath>
#include <string>

#include "bgmtts/base/error.h"

namespace bgmtts::gsttts {

namespace {

std::string Name(const std::string& block, std::size_t i) {
  return block + "." + std::to_string(i);
}

}  // namespace

Text2Mel::Text2Mel(const Text2MelConfig& config, std::uint64_t seed)
    : config_(config), params_(std::make_unique<nn::ParameterSet>(seed)) {
  config_.Validate();
  nn::ParameterSet& p = *params_;
  const int e = config_.embed_dim, d = config_.hidden, m = config_.n_mels;

  std::normal_distribution<double> gauss(0.0, 0.3);
  RealMatrix table(config_.vocab_size, e);
  for (Eigen::Index i = 0; i < table.size(); ++i) table.data()[i] = gauss(p.rng());
  embedding_ = p.Add("text.embedding", table);
  text_in_.emplace_back(p, "text.in.0", e, 2 * d, 1, 1, false);
  text_in_.emplace_back(p, "text.in.1", 2 * d, 2 * d, 1, 1, false);
  for (std::size_t i = 0; i < config_.text_dilations.size(); ++i)
    text_highway_.emplace_back(p, Name("text.hc", i), 2 * d, 3, config_.text_dilations[i], false);
  for (int i = 0; i < config_.text_pointwise_layers; ++i)
    text_highway_.emplace_back(p, Name("text.hc1", i), 2 * d, 1, 1, false);

  audio_in_.emplace_back(p, "audio.in.0", m, d, 1, 1, true);
  audio_in_.emplace_back(p, "audio.in.1", d, d, 1, 1, true);
  audio_in_.emplace_back(p, "audio.in.2", d, d, 1, 1, true);
  for (std::size_t i = 0; i < config_.audio_dilations.size(); ++i)
    audio_highway_.emplace_back(p, Name("audio.hc", i), d, 3, config_.audio_dilations[i], true);

  dec_in_ = nn::Conv1d(p, "dec.in", 2 * d + config_.quality_dim, d, 1, 1, true);
  for (std::size_t i = 0; i < config_.decoder_dilations.size(); ++i)
    dec_highway_.emplace_back(p, Name("dec.hc", i), d, 3, config_.decoder_dilations[i], true);
  for (int i = 0; i < config_.decoder_pointwise_layers; ++i)
    dec_pointwise_.emplace_back(p, Name("dec.pw", i), d, d, 1, 1, true);
  dec_out_ = nn::Conv1d(p, "dec.out", d, m, 1, 1, true);

  int in = 1, width = m;
  for (std::size_t i = 0; i < config_.ref_channels.size(); ++i) {
    ref_convs_.emplace_back(p, Name("ref.conv", i), in, config_.ref_channels[i], 3, 3, 2, 2, 1,
                            1, false);
    in = config_.ref_channels[i];
    width = (width + 1) / 2;
  }
  ref_lstm_ = nn::Lstm(p, "ref.lstm", in * width, config_.ref_hidden);

  const int n = config_.n_tokens, td = config_.token_dim, q = config_.quality_dim;
  RealMatrix tokens(n, td);
  std::normal_distribution<double> token_init(0.0, 0.5);
  for (Eigen::Index i = 0; i < tokens.size(); ++i) tokens.data()[i] = token_init(p.rng());
  tokens_ = p.Add("gst.tokens", tokens);
  query_proj_ = p.AddXavier("gst.query", config_.ref_hidden, q, config_.ref_hidden, q);
  key_proj_ = p.AddXavier("gst.key", td, q, td, q);
  value_proj_ = p.AddXavier("gst.value", td, q, td, q);

  aqc_hidden_ = nn::Linear(p, std::string(kAqcPrefix) + "hidden", q, config_.aqc_hidden);
  aqc_out_ = nn::Linear(p, std::string(kAqcPrefix) + "out", config_.aqc_hidden, 2);
}

TextEncoding Text2Mel::EncodeText(const std::vector<int>& ids) const {
  if (ids.empty()) throw ArgumentError("text sequence is empty");
  for (int id : ids)
    if (id < 0 || id >= config_.vocab_size) throw ArgumentError("text id outside the vocabulary");
  nn::Var x = nn::GatherRows(embedding_, ids);
  x = nn::Relu(text_in_[0](x));
  x = text_in_[1](x);
  for (const auto& hc : text_highway_) x = hc(x);
  const int d = config_.hidden;
  return {nn::SliceCols(x, 0, d), nn::SliceCols(x, d, d)};
}

std::vector<TextEncoding> Text2Mel::EncodeTextBatch(
    const std::vector<std::vector<int>>& batch) const {
  std::vector<TextEncoding> out;
  out.reserve(batch.size());
  for (const auto& ids : batch) out.push_back(EncodeText(ids));
  return out;
}

nn::Var Text2Mel::EncodeReference(const RealMatrix& ref_mel) const {
  if (ref_mel.rows() < 1) throw ArgumentError("reference has no frames");
  if (ref_mel.cols() != config_.n_mels)
    throw ArgumentError("reference mel width does not match n_mels");
  nn::Var x = nn::Constant(Eigen::Map<const RealMatrix>(ref_mel.data(), 1, ref_mel.size()));
  int height = static_cast<int>(ref_mel.rows()), width = config_.n_mels;
  for (const auto& conv : ref_convs_) x = nn::Relu(conv.Forward(x, 1, &height, &width, true));
  x = nn::ChannelsToFrames(x, 1, height, width);
  const nn::Var states = ref_lstm_(x, 1, height);
  return nn::SliceRows(states, height - 1, 1);
}

StyleOutput Text2Mel::QualityEmbed(const nn::Var& reference) const {
  if (reference.cols() != config_.ref_hidden || reference.rows() != 1)
    throw ArgumentError("reference embedding has the wrong size");
  const int heads = config_.n_heads;
  const int dh = config_.quality_dim / heads;
  const double scale = 1.0 / std::sqrt(static_cast<double>(dh));
  const nn::Var query = nn::MatMul(reference, query_proj_);  // [1 x q]
  const nn::Var keys = nn::MatMul(nn::Tanh(tokens_), key_proj_);  // [n x q]
  const nn::Var values = TokenValues();
  std::vector<nn::Var> scores;
  for (int h = 0; h < heads; ++h)
    scores.push_back(nn::Scale(
        nn::MatMulTransposeB(nn::SliceCols(query, h * dh, dh), nn::SliceCols(keys, h * dh, dh)),
        scale));
  const nn::Var weights = nn::SoftmaxRows(nn::ConcatRows(scores));  // [heads x n]
  std::vector<nn::Var> heads_out;
  for (int h = 0; h < heads; ++h)
    heads_out.push_back(
        nn::MatMul(nn::SliceRows(weights, h, 1), nn::SliceCols(values, h * dh, dh)));
  return {nn::ConcatCols(heads_out), weights};
}

nn::Var Text2Mel::TokenValues() const { return nn::MatMul(nn::Tanh(tokens_), value_proj_); }

nn::Var Text2Mel::CombineTokens(const RealMatrix& weights) const {
  const int heads = config_.n_heads;
  if (weights.rows() != heads || weights.cols() != config_.n_tokens)
    throw ArgumentError("token weights must be [n_heads x n_tokens]");
  const int dh = config_.quality_dim / heads;
  const nn::Var values = TokenValues();
  const nn::Var w = nn::Constant(weights);
  std::vector<nn::Var> heads_out;
  for (int h = 0; h < heads; ++h)
    heads_out.push_back(nn::MatMul(nn::SliceRows(w, h, 1), nn::SliceCols(values, h * dh, dh)));
  return nn::ConcatCols(heads_out);
}

nn::Var Text2Mel::ClassifyQuality(const nn::Var& quality) const {
  return aqc_out_(nn::Relu(aqc_hidden_(quality)));
}

nn::Var Text2Mel::EncodeAudio(const RealMatrix& mel_in) const {
  if (mel_in.cols() != config_.n_mels || mel_in.rows() < 1)
    throw ArgumentError("audio encoder input must be [frames x n_mels]");
  nn::Var x = nn::Constant(mel_in);
  x = nn::Relu(audio_in_[0](x));
  x = nn::Relu(audio_in_[1](x));
  x = audio_in_[2](x);
  for (const auto& hc : audio_highway_) x = hc(x);
  return x;
}

std::pair<nn::Var, nn::Var> Text2Mel::Attend(const TextEncoding& text,
                                             const nn::Var& queries) const {
  const double scale = 1.0 / std::sqrt(static_cast<double>(config_.hidden));
  const nn::Var attention =
      nn::SoftmaxRows(nn::Scale(nn::MatMulTransposeB(queries, text.keys), scale));
  return {attention, nn::MatMul(attention, text.values)};
}

nn::Var Text2Mel::Decode(const nn::Var& context, const nn::Var& queries,
                         const nn::Var& quality) const {
  nn::Var x = nn::ConcatCols({context, queries, nn::BroadcastRows(quality, context.rows())});
  x = dec_in_(x);
  for (const auto& hc : dec_highway_) x = hc(x);
  for (const auto& pw : dec_pointwise_) x = nn::Relu(pw(x));
  return dec_out_(x);
}

Text2MelOutput Text2Mel::Forward(const std::vector<int>& ids, const RealMatrix& mel_in,
                                 const RealMatrix& ref_mel, bool stop_aqc_gradient) const {
  Text2MelOutput out;
  const TextEncoding text = EncodeText(ids);
  const nn::Var queries = EncodeAudio(mel_in);
  auto [attention, context] = Attend(text, queries);
  out.attention = attention;
  out.style = QualityEmbed(EncodeReference(ref_mel));
  out.logits = Decode(context, queries, out.style.embedding);
  const nn::Var aqc_in =
      stop_aqc_gradient ? nn::Constant(out.style.embedding.value()) : out.style.embedding;
  out.aqc_logits = ClassifyQuality(aqc_in);
  return out;
}

}  // namespace bgmtts::gsttts
