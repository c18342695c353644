// Copyright 2026 The bgmtts Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "bgmtts/gsttts/losses.h"

#include <cmath>

#include "bgmtts/base/error.h"

namespace bgmtts::gsttts {

nlohmann::json ToJson(const LossBundle& b) {
  return {{"l1", b.l1},         {"d_bd", b.d_bd},           {"l_tts", b.l_tts},
          {"l_aux", b.l_aux},   {"lambda", b.lambda},       {"l_total", b.l_total},
          {"l_ga", b.l_ga},     {"ga_weight", b.ga_weight}, {"objective", b.objective}};
}

TtsLossTerms TtsLoss(const nn::Var& logits, const RealMatrix& target) {
  if (logits.rows() != target.rows() || logits.cols() != target.cols())
    throw ArgumentError("prediction and target shapes differ");
  if (target.size() && (target.minCoeff() < 0.0 || target.maxCoeff() > 1.0))
    throw ArgumentError("targets must lie in [0, 1]");
  return {nn::MeanAbsoluteError(nn::Sigmoid(logits), target),
          nn::BinaryDivergenceWithLogits(logits, target, kLogitClamp)};
}

RealMatrix GuidedAttentionWeights(Eigen::Index frames, Eigen::Index text_len, double g) {
  RealMatrix w(frames, text_len);
  for (Eigen::Index t = 0; t < frames; ++t)
    for (Eigen::Index n = 0; n < text_len; ++n) {
      const double diff = static_cast<double>(n) / text_len - static_cast<double>(t) / frames;
      w(t, n) = 1.0 - std::exp(-diff * diff / (2.0 * g * g));
    }
  return w;
}

nn::Var GuidedAttentionLoss(const nn::Var& attention, double g) {
  return nn::WeightedMean(attention, GuidedAttentionWeights(attention.rows(), attention.cols(), g));
}

nn::Var AqcLoss(const nn::Var& logits, const std::vector<int>& labels) {
  if (logits.cols() != 2) throw ArgumentError("AQC has two classes");
  for (int l : labels)
    if (l != 0 && l != 1) throw ArgumentError("AQC labels must be 0 (clean) or 1");
  return nn::SoftmaxCrossEntropy(logits, labels);
}

TotalLoss CombineLosses(const nn::Var& l1, const nn::Var& d_bd, const nn::Var& l_aux,
                        double lambda, const nn::Var& l_ga, double ga_weight) {
  if (!(lambda >= 0.0)) throw ArgumentError("lambda must be non-negative");
  if (!(ga_weight >= 0.0)) throw ArgumentError("guided-attention weight must be non-negative");
  TotalLoss out;
  const nn::Var l_tts = nn::Add(l1, d_bd);
  out.l_total = nn::Add(l_tts, nn::Scale(l_aux, lambda));
  out.objective = nn::Add(out.l_total, nn::Scale(l_ga, ga_weight));
  out.bundle = MakeLossBundle(l1.scalar(), d_bd.scalar(), l_aux.scalar(), lambda, l_ga.scalar(),
                              ga_weight);
  return out;
}

LossBundle MakeLossBundle(double l1, double d_bd, double l_aux, double lambda, double l_ga,
                          double ga_weight) {
  if (!(lambda >= 0.0)) throw ArgumentError("lambda must be non-negative");
  LossBundle b;
  b.l1 = l1;
  b.d_bd = d_bd;
  b.l_aux = l_aux;
  b.lambda = lambda;
  b.l_ga = l_ga;
  b.ga_weight = ga_weight;
  b.l_tts = b.l1 + b.d_bd;
  b.l_total = b.l_tts + b.lambda * b.l_aux;
  b.objective = b.l_total + b.ga_weight * b.l_ga;
  return b;
}

}  // namespace bgmtts::gsttts
