// Copyright 2026 The bgmtts Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

// End-to-end acceptance run on the toy corpora. Prints one PASS/FAIL line per
// criterion and exits non-zero if any fails. Usage: acceptance [work_dir].

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "grad_check.h"
#include "gsttts_fixtures.h"
#include "test_util.h"

#include "bgmtts/corpus/build.h"
#include "bgmtts/dsp/griffin_lim.h"
#include "bgmtts/dsp/mix.h"
#include "bgmtts/dsp/stft.h"
#include "bgmtts/gsttts/losses.h"
#include "bgmtts/harness/experiment.h"
#include "bgmtts/harness/synthesis.h"
#include "bgmtts/ssrn/train.h"

namespace bgmtts {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string Fmt(const char* format, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), format, a, b, c);
  return buf;
}

// ---------------------------------------------------------------------------
// 1. Signal processing.

Outcome DspSuite() {
  const dsp::StftParams params;
  double worst_roundtrip = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const dsp::Waveform w = testing::WhiteNoise(4000 + 997 * trial, 500 + trial);
    worst_roundtrip = std::max(
        worst_roundtrip, testing::RelativeL2(w.samples, dsp::Istft(dsp::Stft(w, params)).samples));
  }
  const dsp::Waveform tone = testing::Sine(440.0, 1.0);
  worst_roundtrip = std::max(
      worst_roundtrip, testing::RelativeL2(tone.samples, dsp::Istft(dsp::Stft(tone, params)).samples));

  double worst_snr = 0.0;
  const dsp::Waveform music = testing::WhiteNoise(48000, 77, 0.05);
  for (double snr : {0.0, 5.0, 10.0, 15.0, 20.0})
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      const dsp::Waveform speech = testing::SpeechLike(2000 + seed);
      const dsp::MixResult r = dsp::MixAtSnr(speech, music, snr, seed);
      const double got = testing::OracleSnrDb(speech.samples, r.scaled_music.samples, 16000);
      worst_snr = std::isfinite(got) ? std::max(worst_snr, std::abs(got - snr))
                                     : std::numeric_limits<double>::infinity();
    }

  // Tonal magnitudes: a pure tone and a three-partial harmonic tone.
  dsp::Waveform chord = testing::Sine(220.0, 1.0, 0.3);
  const dsp::Waveform h2 = testing::Sine(440.0, 1.0, 0.15), h3 = testing::Sine(660.0, 1.0, 0.1);
  for (std::size_t i = 0; i < chord.size(); ++i) chord.samples[i] += h2.samples[i] + h3.samples[i];
  double worst_final = 0.0;
  bool monotone = true;
  for (const dsp::Waveform* w : {&tone, static_cast<const dsp::Waveform*>(&chord)}) {
    const dsp::GriffinLimResult r = dsp::GriffinLim(dsp::Magnitude(dsp::Stft(*w, params)), 60, 1);
    for (std::size_t k = 1; k < r.residuals.size(); ++k)
      monotone &= r.residuals[k] <= r.residuals[k - 1] + 1e-7;
    worst_final = std::max(worst_final, r.residuals.back());
  }
  Outcome o;
  o.pass = worst_roundtrip < 1e-6 && worst_snr < 0.1 && monotone && worst_final < 0.1;
  o.detail = Fmt("round trip %.2e (< 1e-6), SNR error %.4f dB (< 0.1), Griffin-Lim final %.4f (< 0.1)",
                 worst_roundtrip, worst_snr, worst_final) +
             (monotone ? ", monotone" : ", NOT monotone");
  return o;
}

// ---------------------------------------------------------------------------
// 2. Gradients on micro configurations.

Outcome GradientSuite() {
  using testing::MaxGradientError;
  using testing::RandomMat;
  std::mt19937_64 rng(31);
  std::vector<std::pair<std::string, double>> errors;

  {
    musicfilter::MusicFilter filter(musicfilter::MusicFilterConfig::Micro(6), 10);
    std::uniform_real_distribution<double> u(0.0, 2.0);
    const RealMatrix noisy = RealMatrix::NullaryExpr(10, 6, [&] { return u(rng); });
    const RealMatrix clean = RealMatrix::NullaryExpr(10, 6, [&] { return u(rng); });
    errors.emplace_back("filter mse", MaxGradientError(
        [&] { return filter.Loss(noisy, clean, 2, 5, nullptr, true); },
        testing::AllParameters(filter.params())));
  }
  {
    nn::Var logits(RandomMat(5, 4, rng, 2.0), true);
    const RealMatrix target = testing::RandomUnit(5, 4, rng);
    errors.emplace_back("l1", MaxGradientError(
        [&] { return gsttts::TtsLoss(logits, target).l1; }, {logits}));
    errors.emplace_back("d_bd", MaxGradientError(
        [&] { return gsttts::TtsLoss(logits, target).d_bd; }, {logits}));
    nn::Var aqc(RandomMat(4, 2, rng), true);
    errors.emplace_back("aqc bce", MaxGradientError(
        [&] { return gsttts::AqcLoss(aqc, {0, 1, 1, 0}); }, {aqc}));
    nn::Var scores(RandomMat(6, 4, rng), true);
    errors.emplace_back("guided attention", MaxGradientError(
        [&] { return gsttts::GuidedAttentionLoss(nn::SoftmaxRows(scores), 0.2); }, {scores}));
  }
  {
    gsttts::Text2Mel model(gsttts::Text2MelConfig::Micro(7), 12);
    const gsttts::TtsExample ex = testing::MicroExample(model.config(), 1, rng);
    testing::MoveOffKinks(model, ex, rng);
    const auto leaves = testing::AllParameters(model.params());
    for (double lambda : {0.0, 0.01, 0.5})
      errors.emplace_back(Fmt("total (lambda %g)", lambda), MaxGradientError(
          [&] { return gsttts::ExampleLoss(model, ex, lambda, 1.0, 0.2, false).objective; },
          leaves));
    errors.emplace_back("aqc bce through the model", MaxGradientError(
        [&] { return gsttts::AqcLoss(model.Forward(ex.text, ex.coarse, ex.mel).aqc_logits, {1}); },
        leaves));
  }
  Outcome o;
  o.pass = true;
  double worst = 0.0;
  std::string worst_name;
  for (const auto& [name, err] : errors) {
    o.pass &= err < 1e-4;
    if (!(err <= worst)) {
      worst = err;
      worst_name = name;
    }
  }
  o.detail = Fmt("%g losses checked, worst relative error %.2e", errors.size(), worst) + " (" +
             worst_name + ", < 1e-4)";
  return o;
}

// ---------------------------------------------------------------------------
// 3. Loss algebra.

Outcome LossAlgebra() {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> u(0.0, 3.0);
  bool exact = true;
  for (int trial = 0; trial < 10000; ++trial) {
    const double l1 = u(rng), d_bd = u(rng), l_aux = u(rng);
    const double lambda = trial % 4 == 0 ? 0.0 : u(rng) / 10.0;
    const gsttts::LossBundle b = gsttts::MakeLossBundle(l1, d_bd, l_aux, lambda);
    const gsttts::TotalLoss g = gsttts::CombineLosses(
        nn::Constant(RealMatrix::Constant(1, 1, l1)), nn::Constant(RealMatrix::Constant(1, 1, d_bd)),
        nn::Constant(RealMatrix::Constant(1, 1, l_aux)), lambda,
        nn::Constant(RealMatrix::Zero(1, 1)), 0.0);
    exact &= b.l_tts == l1 + d_bd && b.l_total == b.l_tts + lambda * l_aux &&
             g.l_total.scalar() == b.l_total;
  }

  std::mt19937_64 mrng(42);
  gsttts::Text2Mel model(gsttts::Text2MelConfig::Micro(7), 43);
  const gsttts::TtsExample ex = testing::MicroExample(model.config(), 1, mrng);
  model.params().ZeroGrad();
  nn::Backward(gsttts::ExampleLoss(model, ex, 0.0, 1.0, 0.2, false).l_total);
  double aqc_grad = 0.0;
  int aqc_params = 0;
  for (const auto& p : model.params().parameters())
    if (p.name.rfind(gsttts::kAqcPrefix, 0) == 0) {
      ++aqc_params;
      if (p.var.grad().size()) aqc_grad = std::max(aqc_grad, p.var.grad().cwiseAbs().maxCoeff());
    }
  Outcome o;
  o.pass = exact && aqc_params > 0 && aqc_grad == 0.0;
  o.detail = std::string(exact ? "10000 random bundles exact" : "bundle algebra NOT exact") +
             Fmt(", max |grad| over %g classifier tensors at lambda=0: %g", aqc_params, aqc_grad);
  return o;
}

// ---------------------------------------------------------------------------
// Shared toy study for criteria 4-8.

struct Study {
  harness::PipelineConfig config = harness::PipelineConfig::Defaults();
  fs::path root;
  harness::ToyWorkspace ws;
  std::unique_ptr<musicfilter::MusicFilter> filter;
  corpus::Manifest filtered;
  harness::CellInputs inputs;
  std::vector<std::string> test_ids;
};

constexpr double kCleanRatio = 0.3;

harness::ExperimentSpec CellSpec(const Study& s, harness::Variant v, const std::string& tag,
                                 double lr_scale = 1.0) {
  harness::ExperimentSpec spec;
  spec.variant = v;
  spec.clean_ratio = kCleanRatio;
  spec.seed = s.config.seed;
  spec.lambda = harness::UsesAux(v) ? gsttts::DefaultAqcWeight(kCleanRatio) : 0.0;
  spec.filter_checkpoint = s.root / "filter.ckpt";
  spec.lr_scale = lr_scale;
  spec.out_dir = s.root / "cells" / tag;
  return spec;
}

Outcome FilterEfficacy(Study& s) {
  s.filter = harness::TrainToyFilter(s.ws, s.config, s.root / "filter.ckpt");
  std::vector<dsp::Waveform> speech;
  for (const auto& id : s.test_ids) speech.push_back(s.ws.target_clean.Load(*s.ws.target_clean.Find(id)));
  const auto grid = harness::EvaluateFilterGrid(*s.filter, s.config.features.stft, speech,
                                                s.ws.target_music_dir, {0, 5, 10, 15, 20},
                                                s.config.seed);
  std::ofstream(s.root / "filter_grid.json") << harness::FilterGridJson(grid, s.config.seed).dump(2);
  bool lsd_ok = true;
  for (const auto& p : grid) lsd_ok &= p.lsd_filtered < p.lsd_noisy;
  const double gain0 = grid[0].si_snr_filtered - grid[0].si_snr_noisy;
  Outcome o;
  o.pass = gain0 >= 5.0 && lsd_ok;
  o.detail = Fmt("SI-SNR gain at 0 dB %.2f dB (>= 5) over %g held-out utterances", gain0, grid[0].count) +
             (lsd_ok ? ", LSD lower at every SNR" : ", LSD NOT lower at every SNR");
  for (const auto& p : grid)
    o.detail += Fmt(" [%g dB: %+.2f dB", p.snr_db, p.si_snr_filtered - p.si_snr_noisy) +
                Fmt(", LSD %.2f->%.2f]", p.lsd_noisy, p.lsd_filtered);
  return o;
}

Outcome SynthesisSmoke(Study& s, const fs::path& tts_checkpoint) {
  const auto t0 = std::chrono::steady_clock::now();
  ssrn::SsrnAssets assets = ssrn::FitSsrnAssets(s.ws.universal_clean, s.config.features);
  ssrn::Ssrn net(s.config.ssrn, s.config.seed);
  ssrn::SsrnTrainOptions opt = s.config.ssrn_train;
  opt.seed = s.config.seed;
  opt.checkpoint_path = s.root / "ssrn.ckpt";
  ssrn::TrainSsrn(net, assets, ssrn::MakeSsrnExamples(s.ws.universal_clean, assets), opt);
  const auto t1 = std::chrono::steady_clock::now();

  const gsttts::LoadedTts tts = gsttts::LoadTts(tts_checkpoint);
  const ssrn::LoadedSsrn loaded = ssrn::LoadSsrn(s.root / "ssrn.ckpt");
  const corpus::UtteranceRecord& ref_rec = *s.ws.target_clean.Find(s.test_ids.front());
  const corpus::UtteranceRecord& text_rec = *s.ws.target_clean.Find(s.test_ids.back());
  const dsp::Waveform ref = s.ws.target_clean.Load(ref_rec);
  harness::SpeechOptions so;
  so.max_frames = s.config.max_frames;
  so.griffin_lim_iters = s.config.griffin_lim_iters;
  so.seed = s.config.seed;
  const harness::SpeechResult a = harness::SynthesizeSpeech(
      *tts.model, tts.assets, *loaded.model, loaded.assets, text_rec.transcript, ref, so);
  const harness::SpeechResult b = harness::SynthesizeSpeech(
      *tts.model, tts.assets, *loaded.model, loaded.assets, text_rec.transcript, ref, so);
  dsp::WriteWav(s.root / "synth.wav", a.wave);
  const dsp::Waveform back = dsp::ReadWav(s.root / "synth.wav");
  const auto t2 = std::chrono::steady_clock::now();

  double peak = 0.0;
  for (double x : back.samples) peak = std::isfinite(x) ? std::max(peak, std::abs(x)) : 2.0;
  const double synth_seconds = std::chrono::duration<double>(t2 - t1).count();
  Outcome o;
  o.pass = back.sample_rate == 16000 && !back.samples.empty() && peak > 0.0 && peak <= 1.0 &&
           a.wave.samples == b.wave.samples && a.decoder.completed && synth_seconds < 60.0;
  o.detail = Fmt("%.2f s of audio at %g Hz, peak %.3f", back.duration_s(), back.sample_rate, peak) +
             (a.wave.samples == b.wave.samples ? ", deterministic" : ", NOT deterministic") +
             (a.decoder.completed ? ", attention reached the last symbol" : ", attention did NOT complete") +
             Fmt(", %.1f s post-training (< 60; SSRN training %.0f s)", synth_seconds,
                 std::chrono::duration<double>(t1 - t0).count());
  return o;
}

int Main(int argc, char** argv) {
  const fs::path root = argc > 1 ? fs::path(argv[1]) : fs::temp_directory_path() / "bgmtts_acceptance";
  std::vector<std::pair<std::string, Outcome>> results;
  auto timed = [&](const std::string& name, const std::function<Outcome()>& fn) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    o.detail += Fmt(" (%.0f s)", std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    std::printf("[%s] %s: %s\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str());
    std::fflush(stdout);
    results.emplace_back(name, o);
  };

  timed("1 dsp suite", DspSuite);
  timed("2 gradient suite", GradientSuite);
  timed("3 loss algebra", LossAlgebra);

  Study s;
  s.root = root;
  bool ready = false;
  try {
    s.ws = harness::BuildToyWorkspace(root / "data", s.config);
    const double total_h = s.ws.target_clean.TotalSeconds() / 3600.0;
    s.test_ids = corpus::PartitionByCleanHours(s.ws.target_clean, kCleanRatio * total_h, total_h,
                                               s.config.seed, s.config.data.test_fraction)
                     .test_ids;
    ready = true;
  } catch (const std::exception& e) {
    std::printf("toy corpus generation failed: %s\n", e.what());
  }

  harness::CellReport aux, plain, destabilized, aux_again;
  timed("4 music-filter efficacy", [&] {
    if (!ready) throw std::runtime_error("no toy corpus");
    Outcome o = FilterEfficacy(s);
    s.filtered = harness::FilterManifest(s.ws.target_noisy, *s.filter, s.config.features.stft,
                                         root / "data" / "target" / "filtered");
    s.inputs.clean = &s.ws.target_clean;
    s.inputs.noisy = &s.ws.target_noisy;
    s.inputs.filtered = &s.filtered;
    s.inputs.assets = gsttts::FitAssets(s.ws.target_clean, s.config.features);
    return o;
  });
  const bool have_filter = s.inputs.filtered != nullptr;

  timed("5 classifier efficacy", [&] {
    if (!have_filter) throw std::runtime_error("no filtered corpus");
    aux = harness::RunCell(CellSpec(s, harness::Variant::kGstMfAux, "aux"), s.inputs, s.config);
    Outcome o;
    o.pass = aux.status == harness::CellStatus::kOk && aux.aqc_accuracy >= 0.95;
    o.detail = "GST+MF+Aux " + harness::CellStatusName(aux.status) +
               Fmt(", held-out accuracy %.3f (>= 0.95) on %g utterances, lambda %g",
                   aux.aqc_accuracy, 2.0 * aux.test_ids.size(), aux.spec.lambda);
    return o;
  });

  timed("6 embedding clustering ranking", [&] {
    if (!have_filter) throw std::runtime_error("no filtered corpus");
    plain = harness::RunCell(CellSpec(s, harness::Variant::kGstMf, "plain"), s.inputs, s.config);
    Outcome o;
    o.pass = aux.status == harness::CellStatus::kOk && plain.status == harness::CellStatus::kOk &&
             aux.silhouette >= 0.5 && aux.silhouette > plain.silhouette;
    o.detail = Fmt("silhouette GST+MF+Aux %.3f (>= 0.5) vs GST+MF %.3f", aux.silhouette,
                   plain.silhouette);
    return o;
  });

  timed("7 end-to-end synthesis", [&] {
    if (aux.status != harness::CellStatus::kOk) throw std::runtime_error("no trained model");
    return SynthesisSmoke(s, aux.spec.out_dir / "tts.ckpt");
  });

  timed("8 divergence handling", [&] {
    if (!have_filter) throw std::runtime_error("no filtered corpus");
    destabilized = harness::RunCell(CellSpec(s, harness::Variant::kGstMfAux, "lr_x100", 100.0),
                                    s.inputs, s.config);
    aux_again = harness::RunCell(CellSpec(s, harness::Variant::kGstMfAux, "aux_again"), s.inputs,
                                 s.config);
    const bool isolated = aux_again.status == aux.status && aux_again.loss_curve == aux.loss_curve &&
                          aux_again.silhouette == aux.silhouette &&
                          aux_again.aqc_accuracy == aux.aqc_accuracy;
    Outcome o;
    o.pass = destabilized.status == harness::CellStatus::kDiverged &&
             aux.status == harness::CellStatus::kOk && plain.status == harness::CellStatus::kOk &&
             isolated;
    o.detail = "lr x100 run " + harness::CellStatusName(destabilized.status) + " after " +
               std::to_string(destabilized.steps_completed) + " steps (" + destabilized.message +
               "); siblings " + harness::CellStatusName(aux.status) + "/" +
               harness::CellStatusName(plain.status) +
               (isolated ? ", rerun after it is bit-identical" : ", rerun after it DIFFERS");
    return o;
  });

  harness::EvalReport report;
  for (const auto* c : {&aux, &plain, &destabilized, &aux_again})
    if (c->steps_completed > 0 || !c->message.empty()) report.cells.push_back(*c);
  fs::create_directories(root);
  std::ofstream(root / "acceptance_report.json") << harness::ToJson(report).dump(2);

  int failed = 0;
  for (const auto& [name, o] : results) failed += !o.pass;
  std::printf("%d of %zu criteria passed\n", static_cast<int>(results.size()) - failed,
              results.size());
  return failed ? 1 : 0;
}

}  // namespace
}  // namespace bgmtts

int main(int argc, char** argv) { return bgmtts::Main(argc, argv); }
