// Copyright 2026 The bgmtts Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef BGMTTS_GSTTTS_SYNTHESIZE_H_
#define BGMTTS_GSTTTS_SYNTHESIZE_H_

#include <vector>

#include "bgmtts/gsttts/model.h"

namespace bgmtts::gsttts {

struct SynthesisOptions {
  int max_frames = 200;  // decoder (coarse) frames
  // Attention peaks outside [prev - 1, prev + 3] are replaced by a one-hot
  // at prev + 1.
  bool force_monotonic = true;
  int extra_frames = 1;  // frames kept after attention reaches the last symbol
};

struct SynthesisResult {
  RealMatrix mel;        // normalized coarse mel in (0, 1), [frames x n_mels]
  RealMatrix attention;  // [frames x text_len], rows sum to 1
  RealMatrix quality;    // [1 x quality_dim]
  bool completed = false;  // attention reached the final text position
};

// Autoregressive decoding that feeds each predicted frame back as input.
// Read-only on the model. Throws ArgumentError on max_frames < 1.
SynthesisResult Synthesize(const Text2Mel& model, const std::vector<int>& text,
                           const RealMatrix& ref_mel, const SynthesisOptions& options = {});

SynthesisResult SynthesizeWithQuality(const Text2Mel& model, const std::vector<int>& text,
                                      const RealMatrix& quality,
                                      const SynthesisOptions& options = {});

}  // namespace bgmtts::gsttts

#endif  // BGMTTS_GSTTTS_SYNTHESIZE_H_
