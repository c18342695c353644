// Copyright 2026 The bgmtts Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "bgmtts/gsttts/train.h"

#include <cmath>
#include <fstream>
#include <numeric>
#include <random>

#include "bgmtts/base/error.h"
#include "bgmtts/nn/checkpoint.h"

namespace bgmtts::gsttts {

namespace {

constexpr const char* kTtsCheckpointKind = "gsttts.text2mel";

int LabelOf(corpus::Quality q) { return q == corpus::Quality::kClean ? 0 : 1; }

RealMatrix ShiftRight(const RealMatrix& m) {
  RealMatrix out = RealMatrix::Zero(m.rows(), m.cols());
  if (m.rows() > 1) out.bottomRows(m.rows() - 1) = m.topRows(m.rows() - 1);
  return out;
}

int ArgMax(const RealMatrix& row) {
  Eigen::Index i = 0;
  row.row(0).maxCoeff(&i);
  return static_cast<int>(i);
}

}  // namespace

TtsAssets FitAssets(const corpus::Manifest& manifest, const dsp::FeatureConfig& features) {
  if (manifest.records.empty()) throw DataError("manifest is empty");
  TtsAssets a;
  a.features = features;
  std::vector<std::string> transcripts;
  bool first = true;
  for (const auto& rec : manifest.records) {
    transcripts.push_back(rec.transcript);
    const dsp::UtteranceFeatures f = dsp::ComputeFeatures(manifest.Load(rec), features);
    a.mel_normalizer.Accumulate(f.mel.values, first);
    first = false;
  }
  a.vocabulary = corpus::CharVocabulary::FromTranscripts(transcripts);
  return a;
}

RealMatrix NormalizedMel(const dsp::Waveform& wave, const TtsAssets& assets) {
  const dsp::MagnitudeSpectrogram mag = dsp::Magnitude(dsp::Stft(wave, assets.features.stft));
  return assets.mel_normalizer.Normalize(
      dsp::MelProject(mag, assets.features.n_mels, assets.features.fmin_hz,
                      assets.features.fmax_hz)
          .values);
}

TtsExample MakeExample(const std::string& id, const std::string& transcript,
                       const dsp::Waveform& wave, corpus::Quality quality,
                       const TtsAssets& assets) {
  TtsExample ex;
  ex.id = id;
  ex.text = assets.vocabulary.Encode(transcript);
  ex.mel = NormalizedMel(wave, assets);
  const int r = assets.features.reduction;
  const Eigen::Index coarse_frames = (ex.mel.rows() + r - 1) / r;
  ex.coarse.resize(coarse_frames, ex.mel.cols());
  for (Eigen::Index t = 0; t < coarse_frames; ++t) ex.coarse.row(t) = ex.mel.row(t * r);
  ex.quality = quality;
  ex.label = LabelOf(quality);
  return ex;
}

std::vector<TtsExample> MakeExamples(const corpus::Manifest& manifest,
                                     const std::vector<std::string>& ids,
                                     const TtsAssets& assets) {
  std::vector<TtsExample> out;
  bool noisy = false, filtered = false;
  for (const auto& id : ids) {
    const corpus::UtteranceRecord* rec = manifest.Find(id);
    if (!rec) throw DataError("utterance " + id + " is not in the manifest");
    noisy |= rec->quality == corpus::Quality::kNoisy;
    filtered |= rec->quality == corpus::Quality::kFiltered;
    out.push_back(MakeExample(rec->id, rec->transcript, manifest.Load(*rec), rec->quality, assets));
  }
  if (noisy && filtered)
    throw DataError("degraded records must be all noisy or all filtered, not both");
  return out;
}

TotalLoss ExampleLoss(const Text2Mel& model, const TtsExample& ex, double lambda,
                      double ga_weight, double ga_width, bool stop_aqc_gradient,
                      nn::Var* aqc_logits) {
  const Text2MelOutput out =
      model.Forward(ex.text, ShiftRight(ex.coarse), ex.mel, stop_aqc_gradient);
  const TtsLossTerms tts = TtsLoss(out.logits, ex.coarse);
  const nn::Var l_aux = AqcLoss(out.aqc_logits, {ex.label});
  const nn::Var l_ga = ga_weight > 0.0 ? GuidedAttentionLoss(out.attention, ga_width)
                                       : nn::Constant(RealMatrix::Zero(1, 1));
  if (aqc_logits) *aqc_logits = out.aqc_logits;
  return CombineLosses(tts.l1, tts.d_bd, l_aux, lambda, l_ga, ga_weight);
}

TtsTrainResult TrainTts(Text2Mel& model, const TtsAssets& assets,
                        const std::vector<TtsExample>& examples, const TtsTrainOptions& options) {
  if (examples.empty()) throw DataError("no training examples");
  if (options.steps < 1 || options.batch_size < 1)
    throw ArgumentError("steps and batch_size must be positive");
  if (!(options.lambda >= 0.0)) throw ArgumentError("lambda must be non-negative");
  for (const auto& ex : examples)
    if (ex.label != 0 && ex.label != 1) throw DataError("example " + ex.id + " has no valid label");

  std::mt19937_64 rng(options.seed);
  std::uniform_int_distribution<std::size_t> pick(0, examples.size() - 1);
  nn::Adam adam(model.params(), options.adam);
  std::ofstream log;
  if (!options.log_path.empty()) {
    if (options.log_path.has_parent_path())
      std::filesystem::create_directories(options.log_path.parent_path());
    log.open(options.log_path);
  }
  const nlohmann::json training = {{"lambda", options.lambda},
                                   {"ga_weight", options.ga_weight},
                                   {"stop_aqc_gradient", options.stop_aqc_gradient},
                                   {"seed", options.seed}};

  TtsTrainResult result;
  const double inv_batch = 1.0 / options.batch_size;
  for (int step = 1; step <= options.steps; ++step) {
    model.params().ZeroGrad();
    double l1 = 0.0, d_bd = 0.0, l_aux = 0.0, l_ga = 0.0;
    int correct = 0;
    for (int b = 0; b < options.batch_size; ++b) {
      const TtsExample& ex = examples[pick(rng)];
      nn::Var logits;
      const TotalLoss loss = ExampleLoss(model, ex, options.lambda, options.ga_weight,
                                         options.ga_width, options.stop_aqc_gradient, &logits);
      if (!std::isfinite(loss.bundle.objective))
        throw NumericalError("TTS loss became non-finite at step " + std::to_string(step));
      nn::Backward(nn::Scale(loss.objective, inv_batch));
      l1 += loss.bundle.l1;
      d_bd += loss.bundle.d_bd;
      l_aux += loss.bundle.l_aux;
      l_ga += loss.bundle.l_ga;
      correct += ArgMax(logits.value()) == ex.label;
    }
    if (!model.params().AllFinite() || !std::isfinite(model.params().GradNorm()))
      throw NumericalError("TTS gradients became non-finite at step " + std::to_string(step));
    adam.Step(model.params());

    TtsStepRecord record;
    record.step = step;
    record.losses = MakeLossBundle(l1 * inv_batch, d_bd * inv_batch, l_aux * inv_batch,
                                   options.lambda, l_ga * inv_batch, options.ga_weight);
    record.aqc_accuracy = correct * inv_batch;
    result.history.push_back(record);
    if (log.is_open()) {
      nlohmann::json line = ToJson(record.losses);
      line["step"] = step;
      line["aqc_accuracy"] = record.aqc_accuracy;
      log << line.dump() << '\n' << std::flush;
    }
    const bool periodic = options.checkpoint_every > 0 && step % options.checkpoint_every == 0;
    if (!options.checkpoint_path.empty() && (periodic || step == options.steps))
      SaveTts(options.checkpoint_path, model, assets, &adam, step, training);
    if (options.on_step && !options.on_step(step, record.losses)) {
      result.stopped_early = true;
      break;
    }
  }
  return result;
}

QualityEvaluation EvaluateQuality(const Text2Mel& model, const std::vector<TtsExample>& examples) {
  if (examples.empty()) throw DataError("no evaluation examples");
  nn::NoGradGuard no_grad;
  QualityEvaluation e;
  e.embeddings.resize(static_cast<Eigen::Index>(examples.size()), model.config().quality_dim);
  int correct = 0;
  for (std::size_t i = 0; i < examples.size(); ++i) {
    const TtsExample& ex = examples[i];
    const StyleOutput style = model.QualityEmbed(model.EncodeReference(ex.mel));
    e.embeddings.row(static_cast<Eigen::Index>(i)) = style.embedding.value().row(0);
    const int predicted = ArgMax(model.ClassifyQuality(style.embedding).value());
    e.ids.push_back(ex.id);
    e.labels.push_back(ex.label);
    e.predictions.push_back(predicted);
    correct += predicted == ex.label;
  }
  e.accuracy = static_cast<double>(correct) / static_cast<double>(examples.size());
  return e;
}

void SaveTts(const std::filesystem::path& path, const Text2Mel& model, const TtsAssets& assets,
             nn::Adam* optimizer, std::int64_t step, const nlohmann::json& training) {
  nlohmann::json header = {{"kind", kTtsCheckpointKind},
                           {"config", model.config()},
                           {"step", step},
                           {"vocabulary", assets.vocabulary.ToJson()},
                           {"features", assets.features},
                           {"mel_normalizer", assets.mel_normalizer},
                           {"training", training}};
  nn::WriteCheckpoint(path, nn::PackModel(header, model.params(), optimizer));
}

LoadedTts LoadTts(const std::filesystem::path& path) {
  const nn::CheckpointData data = nn::ReadCheckpoint(path);
  const Text2MelConfig config = data.header.at("config").get<Text2MelConfig>();
  nn::CheckHeader(data, kTtsCheckpointKind, nlohmann::json(config));
  LoadedTts out;
  out.model = std::make_unique<Text2Mel>(config, 0);
  nn::UnpackModel(data, out.model->params(), nullptr);
  out.assets.vocabulary = corpus::CharVocabulary::FromJson(data.header.at("vocabulary"));
  out.assets.features = data.header.at("features").get<dsp::FeatureConfig>();
  out.assets.mel_normalizer = data.header.at("mel_normalizer").get<dsp::LogRangeNormalizer>();
  out.step = data.header.value("step", std::int64_t{0});
  out.training = data.header.value("training", nlohmann::json::object());
  if (out.assets.vocabulary.size() != config.vocab_size)
    throw DataError("checkpoint vocabulary does not match its config");
  return out;
}

}  // namespace bgmtts::gsttts
