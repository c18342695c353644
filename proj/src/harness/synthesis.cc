// Copyright 2026 The bgmtts Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "bgmtts/harness/synthesis.h"

#include <algorithm>
#include <cmath>

#include "bgmtts/base/error.h"
#include "bgmtts/dsp/griffin_lim.h"
#include "bgmtts/ssrn/train.h"

namespace bgmtts::harness {

SpeechResult SynthesizeSpeech(const gsttts::Text2Mel& text2mel, const gsttts::TtsAssets& tts_assets,
                              const ssrn::Ssrn& ssrn, const ssrn::SsrnAssets& ssrn_assets,
                              const std::string& text, const dsp::Waveform& reference,
                              const SpeechOptions& options) {
  if (!(options.peak > 0.0 && options.peak <= 1.0))
    throw ArgumentError("peak must lie in (0, 1]");
  if (!(ssrn_assets.features == tts_assets.features))
    throw DataError("SSRN and Text2Mel checkpoints use different feature settings");
  if (reference.sample_rate != dsp::kDefaultSampleRate)
    throw DataError("reference sample rate does not match the model");

  SpeechResult out;
  gsttts::SynthesisOptions so;
  so.max_frames = options.max_frames;
  out.decoder = gsttts::Synthesize(text2mel, tts_assets.vocabulary.Encode(text),
                                   gsttts::NormalizedMel(reference, tts_assets), so);
  const dsp::MagnitudeSpectrogram mag =
      ssrn::PredictMagnitude(ssrn, ssrn_assets, out.decoder.mel, tts_assets.mel_normalizer);
  out.wave = dsp::GriffinLim(mag, options.griffin_lim_iters, options.seed).wave;
  double peak = 0.0;
  for (double s : out.wave.samples) peak = std::max(peak, std::abs(s));
  if (!std::isfinite(peak)) throw NumericalError("synthesized waveform is not finite");
  if (peak > options.peak)
    for (double& s : out.wave.samples) s *= options.peak / peak;
  return out;
}

}  // namespace bgmtts::harness
