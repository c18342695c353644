// Copyright 2026 The bgmtts Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef BGMTTS_GSTTTS_LOSSES_H_
#define BGMTTS_GSTTTS_LOSSES_H_

#include <vector>

#include <nlohmann/json.hpp>

#include "bgmtts/nn/ops.h"

namespace bgmtts::gsttts {

inline constexpr double kLogitClamp = 15.0;

// Named scalars of one evaluation. Invariants, exact in this evaluation
// order: l_tts = l1 + d_bd; l_total = l_tts + lambda * l_aux;
// objective = l_total + ga_weight * l_ga.
struct LossBundle {
  double l1 = 0.0;
  double d_bd = 0.0;
  double l_tts = 0.0;
  double l_aux = 0.0;
  double lambda = 0.0;
  double l_total = 0.0;
  double l_ga = 0.0;
  double ga_weight = 0.0;
  double objective = 0.0;
};

nlohmann::json ToJson(const LossBundle& b);

struct TtsLossTerms {
  nn::Var l1;    // mean |sigmoid(logits) - target|
  nn::Var d_bd;  // mean binary divergence, from clamped logits
};

// Throws ArgumentError on shape mismatch or targets outside [0, 1].
TtsLossTerms TtsLoss(const nn::Var& logits, const RealMatrix& target);

// W[t, n] = 1 - exp(-(n/N - t/T)^2 / (2 g^2)) over [frames x text_len].
RealMatrix GuidedAttentionWeights(Eigen::Index frames, Eigen::Index text_len, double g);
// mean(attention .* W)
nn::Var GuidedAttentionLoss(const nn::Var& attention, double g);

// Softmax cross entropy of [n x 2] classifier logits.
nn::Var AqcLoss(const nn::Var& logits, const std::vector<int>& labels);

struct TotalLoss {
  LossBundle bundle;
  nn::Var l_total;
  nn::Var objective;
};

// Builds l_tts, l_total and the training objective as graph nodes. The
// bundle holds their values. Throws ArgumentError for lambda < 0.
TotalLoss CombineLosses(const nn::Var& l1, const nn::Var& d_bd, const nn::Var& l_aux,
                        double lambda, const nn::Var& l_ga, double ga_weight);

// Scalar-only version of the same algebra.
LossBundle MakeLossBundle(double l1, double d_bd, double l_aux, double lambda,
                          double l_ga = 0.0, double ga_weight = 0.0);

}  // namespace bgmtts::gsttts

#endif  // BGMTTS_GSTTTS_LOSSES_H_
