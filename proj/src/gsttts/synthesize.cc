// Copyright 2026 The bgmtts Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "bgmtts/gsttts/synthesize.h"

#include <algorithm>
#include <cmath>

#include "bgmtts/base/error.h"

namespace bgmtts::gsttts {

SynthesisResult Synthesize(const Text2Mel& model, const std::vector<int>& text,
                           const RealMatrix& ref_mel, const SynthesisOptions& options) {
  nn::NoGradGuard no_grad;
  const RealMatrix quality = model.QualityEmbed(model.EncodeReference(ref_mel)).embedding.value();
  return SynthesizeWithQuality(model, text, quality, options);
}

SynthesisResult SynthesizeWithQuality(const Text2Mel& model, const std::vector<int>& text,
                                      const RealMatrix& quality,
                                      const SynthesisOptions& options) {
  if (options.max_frames < 1) throw ArgumentError("max_frames must be positive");
  if (quality.rows() != 1 || quality.cols() != model.config().quality_dim)
    throw ArgumentError("quality embedding has the wrong size");
  nn::NoGradGuard no_grad;
  const int n_mels = model.config().n_mels;
  const int last = static_cast<int>(text.size()) - 1;
  const TextEncoding enc = model.EncodeText(text);
  const nn::Var q = nn::Constant(quality);

  SynthesisResult out;
  out.quality = quality;
  RealMatrix mel_in = RealMatrix::Zero(options.max_frames, n_mels);
  RealMatrix attention = RealMatrix::Zero(options.max_frames, text.size());
  RealMatrix mel(options.max_frames, n_mels);
  int prev = -1, frames = 0, remaining = -1;
  for (int t = 0; t < options.max_frames; ++t) {
    // Causal encoders: rows < t are unchanged by extending the input.
    const nn::Var queries = model.EncodeAudio(mel_in.topRows(t + 1));
    const nn::Var natural = model.Attend(enc, nn::SliceRows(queries, t, 1)).first;
    RealMatrix row = natural.value();
    Eigen::Index peak = 0;
    row.row(0).maxCoeff(&peak);
    if (options.force_monotonic && prev >= 0 && (peak < prev - 1 || peak > prev + 3)) {
      peak = std::min(prev + 1, last);
      row.setZero();
      row(0, peak) = 1.0;
    }
    attention.row(t) = row.row(0);
    prev = static_cast<int>(peak);

    const nn::Var context =
        nn::MatMul(nn::Constant(attention.topRows(t + 1)), enc.values);
    const nn::Var logits = model.Decode(context, queries, q);
    mel.row(t) = logits.value().row(t).unaryExpr([](double z) { return 1.0 / (1.0 + std::exp(-z)); });
    if (t + 1 < options.max_frames) mel_in.row(t + 1) = mel.row(t);
    frames = t + 1;

    if (!out.completed && prev == last) {
      out.completed = true;
      remaining = options.extra_frames;
    }
    if (out.completed && remaining-- <= 0) break;
  }
  out.mel = mel.topRows(frames);
  out.attention = attention.topRows(frames);
  return out;
}

}  // namespace bgmtts::gsttts
