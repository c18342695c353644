// Copyright 2026 The bgmtts Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef BGMTTS_HARNESS_SYNTHESIS_H_
#define BGMTTS_HARNESS_SYNTHESIS_H_

#include <cstdint>
#include <string>

#include "bgmtts/dsp/waveform.h"
#include "bgmtts/gsttts/synthesize.h"
#include "bgmtts/gsttts/train.h"
#include "bgmtts/ssrn/ssrn.h"

namespace bgmtts::harness {

struct SpeechOptions {
  int max_frames = 200;
  int griffin_lim_iters = 60;
  std::uint64_t seed = 1;  // Griffin-Lim initial phase
  double peak = 0.95;      // output is scaled down if it would exceed this
};

struct SpeechResult {
  dsp::Waveform wave;
  gsttts::SynthesisResult decoder;
};

// Text -> coarse mel (conditioned on a clean reference) -> magnitude -> wave.
// Deterministic in options.seed.
SpeechResult SynthesizeSpeech(const gsttts::Text2Mel& text2mel, const gsttts::TtsAssets& tts_assets,
                              const ssrn::Ssrn& ssrn, const ssrn::SsrnAssets& ssrn_assets,
                              const std::string& text, const dsp::Waveform& reference,
                              const SpeechOptions& options = {});

}  // namespace bgmtts::harness

#endif  // BGMTTS_HARNESS_SYNTHESIS_H_
