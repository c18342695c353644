// Copyright 2026 The bgmtts Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef BGMTTS_GSTTTS_CONFIG_H_
#define BGMTTS_GSTTTS_CONFIG_H_

#include <vector>

#include <nlohmann/json.hpp>

namespace bgmtts::gsttts {

// Convolutional Text2Mel with a style-token layer and a quality classifier.
// Dilation lists describe the kernel-3 highway stacks of each block.
struct Text2MelConfig {
  int vocab_size = 0;
  int embed_dim = 64;
  int hidden = 64;
  int n_mels = 80;
  int reduction = 4;  // mel frames per decoder frame

  std::vector<int> text_dilations = {1, 3, 9, 27, 1, 3, 9, 27, 1, 1};
  int text_pointwise_layers = 2;
  std::vector<int> audio_dilations = {1, 3, 9, 27, 1, 3, 9, 27, 3, 3};
  std::vector<int> decoder_dilations = {1, 3, 9, 27, 1, 1};
  int decoder_pointwise_layers = 3;

  // Reference encoder: one 3x3 stride-2 conv per entry, then an LSTM.
  std::vector<int> ref_channels = {16, 16, 32, 32};
  int ref_hidden = 64;

  int n_tokens = 10;
  int n_heads = 4;
  int token_dim = 32;
  int quality_dim = 32;  // divisible by n_heads

  int aqc_hidden = 256;

  static Text2MelConfig Desk(int vocab_size);
  // Tiny widths for finite-difference checks (token, head and AQC sizes
  // unchanged).
  static Text2MelConfig Micro(int vocab_size);

  void Validate() const;
  bool operator==(const Text2MelConfig&) const = default;
};

void to_json(nlohmann::json& j, const Text2MelConfig& c);
void from_json(const nlohmann::json& j, Text2MelConfig& c);

// Clean-cell weights: 0.001 when the clean share is at most 10%, else 0.01.
double DefaultAqcWeight(double clean_fraction);

}  // namespace bgmtts::gsttts

#endif  // BGMTTS_GSTTTS_CONFIG_H_
