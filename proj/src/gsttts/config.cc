// Copyright 2026 The bgmtts Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "bgmtts/gsttts/config.h"

#include "bgmtts/base/error.h"

namespace bgmtts::gsttts {

Text2MelConfig Text2MelConfig::Desk(int vocab_size) {
  Text2MelConfig c;
  c.vocab_size = vocab_size;
  return c;
}

Text2MelConfig Text2MelConfig::Micro(int vocab_size) {
  Text2MelConfig c;
  c.vocab_size = vocab_size;
  c.embed_dim = 3;
  c.hidden = 4;
  c.n_mels = 6;
  c.text_dilations = {1, 2};
  c.text_pointwise_layers = 1;
  c.audio_dilations = {1, 2};
  c.decoder_dilations = {1};
  c.decoder_pointwise_layers = 1;
  c.ref_channels = {2, 2, 2, 2};
  c.ref_hidden = 3;
  c.token_dim = 4;
  c.quality_dim = 8;
  return c;
}

void Text2MelConfig::Validate() const {
  if (vocab_size < 3) throw ArgumentError("vocabulary needs at least one character");
  if (embed_dim < 1 || hidden < 1 || n_mels < 1 || reduction < 1)
    throw ArgumentError("Text2Mel widths must be positive");
  if (ref_channels.size() != 4) throw ArgumentError("reference encoder has four conv layers");
  if (n_tokens < 1 || n_heads < 1 || quality_dim % n_heads != 0)
    throw ArgumentError("quality_dim must be divisible by n_heads");
  if (aqc_hidden < 1) throw ArgumentError("AQC hidden width must be positive");
}

void to_json(nlohmann::json& j, const Text2MelConfig& c) {
  j = {{"vocab_size", c.vocab_size},
       {"embed_dim", c.embed_dim},
       {"hidden", c.hidden},
       {"n_mels", c.n_mels},
       {"reduction", c.reduction},
       {"text_dilations", c.text_dilations},
       {"text_pointwise_layers", c.text_pointwise_layers},
       {"audio_dilations", c.audio_dilations},
       {"decoder_dilations", c.decoder_dilations},
       {"decoder_pointwise_layers", c.decoder_pointwise_layers},
       {"ref_channels", c.ref_channels},
       {"ref_hidden", c.ref_hidden},
       {"n_tokens", c.n_tokens},
       {"n_heads", c.n_heads},
       {"token_dim", c.token_dim},
       {"quality_dim", c.quality_dim},
       {"aqc_hidden", c.aqc_hidden}};
}

void from_json(const nlohmann::json& j, Text2MelConfig& c) {
  Text2MelConfig d;
  c.vocab_size = j.value("vocab_size", d.vocab_size);
  c.embed_dim = j.value("embed_dim", d.embed_dim);
  c.hidden = j.value("hidden", d.hidden);
  c.n_mels = j.value("n_mels", d.n_mels);
  c.reduction = j.value("reduction", d.reduction);
  c.text_dilations = j.value("text_dilations", d.text_dilations);
  c.text_pointwise_layers = j.value("text_pointwise_layers", d.text_pointwise_layers);
  c.audio_dilations = j.value("audio_dilations", d.audio_dilations);
  c.decoder_dilations = j.value("decoder_dilations", d.decoder_dilations);
  c.decoder_pointwise_layers = j.value("decoder_pointwise_layers", d.decoder_pointwise_layers);
  c.ref_channels = j.value("ref_channels", d.ref_channels);
  c.ref_hidden = j.value("ref_hidden", d.ref_hidden);
  c.n_tokens = j.value("n_tokens", d.n_tokens);
  c.n_heads = j.value("n_heads", d.n_heads);
  c.token_dim = j.value("token_dim", d.token_dim);
  c.quality_dim = j.value("quality_dim", d.quality_dim);
  c.aqc_hidden = j.value("aqc_hidden", d.aqc_hidden);
}

double DefaultAqcWeight(double clean_fraction) {
  return clean_fraction <= 0.1 + 1e-9 ? 0.001 : 0.01;
}

}  // namespace bgmtts::gsttts
