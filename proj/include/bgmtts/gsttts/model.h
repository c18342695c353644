// Copyright 2026 The bgmtts Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef BGMTTS_GSTTTS_MODEL_H_
#define BGMTTS_GSTTTS_MODEL_H_

#include <cstdint>
#include <memory>
#include <utility>
#include <vector>

#include "bgmtts/gsttts/config.h"
#include "bgmtts/nn/layers.h"

namespace bgmtts::gsttts {

// Quality-embedding output of the token layer.
struct StyleOutput {
  nn::Var embedding;  // [1 x quality_dim]
  nn::Var weights;    // [n_heads x n_tokens], rows sum to 1
};

struct TextEncoding {
  nn::Var keys;    // [text_len x hidden]
  nn::Var values;  // [text_len x hidden]
};

// One teacher-forced pass over an utterance.
struct Text2MelOutput {
  nn::Var logits;     // [frames x n_mels], pre-sigmoid
  nn::Var attention;  // [frames x text_len], rows sum to 1
  StyleOutput style;
  nn::Var aqc_logits;  // [1 x 2], class 0 clean, 1 degraded
};

class Text2Mel {
 public:
  Text2Mel(const Text2MelConfig& config, std::uint64_t seed);
  Text2Mel(const Text2Mel&) = delete;
  Text2Mel& operator=(const Text2Mel&) = delete;

  // Throws ArgumentError on an empty sequence or ids outside the vocabulary.
  TextEncoding EncodeText(const std::vector<int>& ids) const;
  std::vector<TextEncoding> EncodeTextBatch(const std::vector<std::vector<int>>& batch) const;

  // ref_mel: [frames x n_mels] -> [1 x ref_hidden], final LSTM state.
  nn::Var EncodeReference(const RealMatrix& ref_mel) const;
  StyleOutput QualityEmbed(const nn::Var& reference) const;
  // Embedding for externally fixed token weights [n_heads x n_tokens].
  nn::Var CombineTokens(const RealMatrix& weights) const;
  // Projected token values [n_tokens x quality_dim] (head h owns columns
  // h*dh .. (h+1)*dh - 1).
  nn::Var TokenValues() const;
  nn::Var ClassifyQuality(const nn::Var& quality) const;  // [1 x 2] logits

  // Causal in time: row t depends on input rows <= t only.
  nn::Var EncodeAudio(const RealMatrix& mel_in) const;  // [frames x hidden]
  // Returns (attention [frames x text_len], context [frames x hidden]).
  std::pair<nn::Var, nn::Var> Attend(const TextEncoding& text, const nn::Var& queries) const;
  nn::Var Decode(const nn::Var& context, const nn::Var& queries, const nn::Var& quality) const;

  // mel_in is the target shifted right by one frame (first row zero).
  // With stop_aqc_gradient the classifier sees a detached embedding.
  Text2MelOutput Forward(const std::vector<int>& ids, const RealMatrix& mel_in,
                         const RealMatrix& ref_mel, bool stop_aqc_gradient = false) const;

  const Text2MelConfig& config() const { return config_; }
  nn::ParameterSet& params() { return *params_; }
  const nn::ParameterSet& params() const { return *params_; }

 private:
  Text2MelConfig config_;
  std::unique_ptr<nn::ParameterSet> params_;

  nn::Var embedding_;
  std::vector<nn::Conv1d> text_in_;
  std::vector<nn::HighwayConv1d> text_highway_;

  std::vector<nn::Conv1d> audio_in_;
  std::vector<nn::HighwayConv1d> audio_highway_;

  nn::Conv1d dec_in_;
  std::vector<nn::HighwayConv1d> dec_highway_;
  std::vector<nn::Conv1d> dec_pointwise_;
  nn::Conv1d dec_out_;

  std::vector<nn::Conv2dLayer> ref_convs_;
  nn::Lstm ref_lstm_;

  nn::Var tokens_, query_proj_, key_proj_, value_proj_;

  nn::Linear aqc_hidden_, aqc_out_;
};

// Prefix of every classifier parameter name.
inline constexpr const char* kAqcPrefix = "aqc.";

}  // namespace bgmtts::gsttts

#endif  // BGMTTS_GSTTTS_MODEL_H_
