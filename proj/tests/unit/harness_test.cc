// Copyright 2026 The bgmtts Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include <Eigen/SVD>

#include "doctest.h"
#include "test_util.h"

#include "bgmtts/base/error.h"
#include "bgmtts/harness/analysis.h"
#include "bgmtts/harness/config.h"
#include "bgmtts/harness/experiment.h"
#include "bgmtts/harness/synthesis.h"

namespace bgmtts::harness {
namespace {

using nlohmann::json;

RealMatrix Gaussian(int n, int d, std::mt19937_64& rng, double sigma = 1.0) {
  std::normal_distribution<double> g(0.0, sigma);
  RealMatrix m(n, d);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = g(rng);
  return m;
}

std::string ReadFile(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Small enough that a whole cell trains in about a second.
PipelineConfig MicroPipeline() {
  PipelineConfig c = PipelineConfig::Defaults();
  c.data.utterances = 20;
  c.data.universal_utterances = 12;
  c.data.universal_speakers = 2;
  c.data.filter_music_files = 2;
  c.data.target_music_files = 2;
  c.data.music_seconds = 3.0;
  c.filter = musicfilter::MusicFilterConfig::Micro(513);
  c.filter_train.steps = 2;
  c.tts.hidden = 8;
  c.tts.embed_dim = 8;
  c.tts.ref_hidden = 8;
  c.tts.quality_dim = 4;
  c.tts.token_dim = 4;
  c.tts.aqc_hidden = 8;
  c.tts_train.steps = 4;
  c.tts_train.batch_size = 2;
  c.divergence.reference_step = 2;
  c.ssrn.hidden = 4;
  c.ssrn_train.steps = 2;
  return c;
}

TEST_CASE("pca agrees with the singular value decomposition and projection is idempotent") {
  std::mt19937_64 rng(1);
  RealMatrix x = Gaussian(40, 5, rng);
  x.col(0) *= 4.0;
  x.col(2) *= 2.0;
  x.rowwise() += RealVector::LinSpaced(5, 1.0, 5.0).transpose();
  const PcaResult pca = Pca(x, 2);

  const RealMatrix centred = x.rowwise() - x.colwise().mean();
  Eigen::JacobiSVD<RealMatrix> svd(centred, Eigen::ComputeThinV);
  const RealVector s2 = svd.singularValues().array().square();
  for (int k = 0; k < 2; ++k) {
    CHECK(pca.explained_variance_ratio(k) == doctest::Approx(s2(k) / s2.sum()).epsilon(1e-10));
    const double overlap = std::abs(pca.components.row(k).dot(svd.matrixV().col(k)));
    CHECK(overlap == doctest::Approx(1.0).epsilon(1e-9));
    Eigen::Index arg;
    pca.components.row(k).cwiseAbs().maxCoeff(&arg);
    CHECK(pca.components(k, arg) > 0.0);
  }
  CHECK((pca.components * pca.components.transpose() - RealMatrix::Identity(2, 2)).norm() < 1e-12);
  CHECK((Project(pca, x) - pca.projected).norm() < 1e-12);

  // Reconstruct inside the 2-D subspace, then project and reconstruct again.
  const RealMatrix once =
      (pca.projected * pca.components).rowwise() + pca.mean.transpose();
  const RealMatrix twice = (Project(pca, once) * pca.components).rowwise() + pca.mean.transpose();
  CHECK((twice - once).norm() < 1e-10);
  CHECK((Project(pca, once) - pca.projected).norm() < 1e-10);

  CHECK_THROWS_AS(Pca(x.topRows(2), 1), DataError);
  CHECK_THROWS_AS(Pca(x, 0), ArgumentError);
  CHECK_THROWS_AS(Pca(x, 6), ArgumentError);
}

TEST_CASE("pca sign convention is independent of the input sign") {
  std::mt19937_64 rng(2);
  const RealMatrix x = Gaussian(30, 4, rng) * RealVector::LinSpaced(4, 4.0, 1.0).asDiagonal();
  const PcaResult a = Pca(x, 3);
  const PcaResult b = Pca(-x, 3);
  CHECK((a.components - b.components).norm() < 1e-10);
}

// Expected silhouette of two isotropic 2-D Gaussian clusters (unit sigma)
// whose means are `sep` apart, to first order 1 - E[a] / E[b]: within-cluster
// distances are Rayleigh with scale sqrt(2), cross-cluster distances Rice
// with nu = sep and the same scale.
double TwoClusterSilhouetteOracle(double sep) {
  const double s = std::sqrt(2.0);
  const double within = s * std::sqrt(std::numbers::pi / 2.0);
  const double x = -sep * sep / (2.0 * s * s);
  // Laguerre function L_{1/2}(x); I_k stays finite for sep up to about 50.
  const double laguerre =
      std::exp(x / 2.0) * ((1.0 - x) * std::cyl_bessel_i(0.0, -x / 2.0) -
                           x * std::cyl_bessel_i(1.0, -x / 2.0));
  const double across = s * std::sqrt(std::numbers::pi / 2.0) * laguerre;
  return 1.0 - within / across;
}

TEST_CASE("silhouette of well separated clusters") {
  for (double sep : {10.0, 25.0}) {
    std::mt19937_64 rng(3);
    RealMatrix x = Gaussian(200, 8, rng);
    std::vector<int> labels(200, 0);
    for (int i = 100; i < 200; ++i) {
      x(i, 0) += sep;
      labels[i] = 1;
    }
    const PcaResult pca = Pca(x, 2);
    const double got = Silhouette(pca.projected, labels);
    CHECK(got == doctest::Approx(TwoClusterSilhouetteOracle(sep)).epsilon(0.03));
    if (sep == 25.0) CHECK(got > 0.9);
  }

  // Hand-computed: clusters {0, 1} and {4}; point 0: a = 1, b = 4 -> 0.75;
  // point 1: a = 1, b = 3 -> 2/3; the singleton scores 0.
  RealMatrix line(3, 1);
  line << 0.0, 1.0, 4.0;
  CHECK(Silhouette(line, {0, 0, 1}) == doctest::Approx((0.75 + 2.0 / 3.0) / 3.0));
  CHECK_THROWS_AS(Silhouette(line, {0, 0, 0}), ArgumentError);
  CHECK_THROWS_AS(Silhouette(line, {0, 1}), ArgumentError);
}

TEST_CASE("embedding csv is deterministic and complete") {
  const auto dir = testing::ScratchDir("embed_csv");
  std::mt19937_64 rng(4);
  const RealMatrix e = Gaussian(5, 3, rng);
  const PcaResult pca = Pca(e, 2);
  const std::vector<std::string> ids = {"a", "b", "c", "d", "e"};
  const std::vector<std::string> labels = {"clean", "filtered", "clean", "filtered", "clean"};
  WriteEmbeddingCsv(dir / "one.csv", ids, labels, e, pca);
  WriteEmbeddingCsv(dir / "two.csv", ids, labels, e, pca);
  const std::string text = ReadFile(dir / "one.csv");
  CHECK(text == ReadFile(dir / "two.csv"));
  CHECK(text.rfind("utterance_id,label,e0,e1,e2,pc1,pc2\n", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == 6);
  const json summary = json::parse(ReadFile(dir / "one.csv.json"));
  CHECK(summary["explained_variance_ratio"].size() == 2);
}

TEST_CASE("config round trip and rejection of unknown keys") {
  PipelineConfig c = PipelineConfig::Defaults();
  c.seed = 9;
  c.lambda = 0.02;
  c.clean_ratios = {0.2};
  c.tts.hidden = 32;
  const json j = c;
  const PipelineConfig back = j.get<PipelineConfig>();
  CHECK(json(back) == j);
  CHECK(back.lambda == 0.02);

  PipelineConfig patched = PipelineConfig::Defaults();
  from_json(json{{"tts_train", {{"steps", 7}}}}, patched);
  CHECK(patched.tts_train.steps == 7);
  CHECK(patched.tts_train.batch_size == PipelineConfig::Defaults().tts_train.batch_size);
  CHECK(!patched.lambda.has_value());

  PipelineConfig bad;
  CHECK_THROWS_AS(from_json(json{{"tts_trian", {{"steps", 7}}}}, bad), ArgumentError);
  CHECK_THROWS_AS(from_json(json{{"data", {{"utterance", 7}}}}, bad), ArgumentError);
}

TEST_CASE("divergence monitor") {
  DivergenceConfig cfg{3, 100.0};
  SUBCASE("healthy run") {
    DivergenceMonitor m(cfg);
    for (int s = 1; s <= 10; ++s) CHECK(m.Observe(s, 1.0 / s));
    CHECK(!m.diverged());
  }
  SUBCASE("non-finite loss") {
    DivergenceMonitor m(cfg);
    CHECK(m.Observe(1, 1.0));
    CHECK(!m.Observe(2, std::numeric_limits<double>::quiet_NaN()));
    CHECK(m.diverged());
    CHECK(!m.reason().empty());
  }
  SUBCASE("growth beyond the factor after the reference step") {
    DivergenceMonitor m(cfg);
    CHECK(m.Observe(1, 2.0));
    CHECK(m.Observe(3, 0.5));
    CHECK(m.Observe(4, 50.0));
    CHECK(!m.Observe(5, 50.01));
    CHECK(!m.Observe(6, 0.1));  // stays flagged
  }
  SUBCASE("a run that never descends") {
    DivergenceMonitor m(cfg);
    CHECK(m.Observe(1, 1.0));
    CHECK(m.Observe(2, 7.0));
    CHECK(!m.Observe(3, 6.0));
  }
  SUBCASE("growth before the reference step is not judged") {
    DivergenceMonitor m(cfg);
    CHECK(m.Observe(1, 1.0));
    CHECK(m.Observe(2, 500.0));
    CHECK(!m.diverged());
  }
}

TEST_CASE("experiment spec validation") {
  ExperimentSpec s;
  s.variant = Variant::kGstMfAux;
  s.lambda = 0.01;
  CHECK_THROWS_AS(s.Validate(), ArgumentError);  // no filter checkpoint
  s.filter_checkpoint = "f.ckpt";
  CHECK_NOTHROW(s.Validate());
  s.lambda = 0.0;
  CHECK_THROWS_AS(s.Validate(), ArgumentError);
  s.variant = Variant::kGstMf;
  CHECK_NOTHROW(s.Validate());
  s.lambda = 0.1;
  CHECK_THROWS_AS(s.Validate(), ArgumentError);
  s.variant = Variant::kGst;
  s.lambda = 0.0;
  s.filter_checkpoint.clear();
  CHECK_NOTHROW(s.Validate());
  s.clean_ratio = 1.0;
  CHECK_THROWS_AS(s.Validate(), ArgumentError);
  for (Variant v : {Variant::kTts, Variant::kGst, Variant::kGstAux, Variant::kGstMf,
                    Variant::kGstMfAux})
    CHECK(ParseVariant(VariantName(v)) == v);
  CHECK_THROWS_AS(ParseVariant("GST+MF+aux"), ArgumentError);
}

struct MicroFixture {
  PipelineConfig config = MicroPipeline();
  std::filesystem::path root = testing::ScratchDir("harness_micro");
  ToyWorkspace ws = BuildToyWorkspace(root / "data", config);
  std::unique_ptr<musicfilter::MusicFilter> filter =
      TrainToyFilter(ws, config, root / "filter.ckpt");
  corpus::Manifest filtered =
      FilterManifest(ws.target_noisy, *filter, config.features.stft, root / "filtered");
  CellInputs inputs;

  MicroFixture() {
    inputs.clean = &ws.target_clean;
    inputs.noisy = &ws.target_noisy;
    inputs.filtered = &filtered;
    inputs.assets = gsttts::FitAssets(ws.target_clean, config.features);
  }

  ExperimentSpec Spec(Variant v, double lambda) const {
    ExperimentSpec s;
    s.variant = v;
    s.lambda = lambda;
    s.clean_ratio = 0.3;
    if (UsesFilter(v)) s.filter_checkpoint = root / "filter.ckpt";
    return s;
  }
};

TEST_CASE("cells report finite metrics, and failures stay inside their cell") {
  const MicroFixture f;
  const CellReport a = RunCell(f.Spec(Variant::kGstMfAux, 0.01), f.inputs, f.config);
  REQUIRE(a.status == CellStatus::kOk);
  CHECK(a.steps_completed == f.config.tts_train.steps);
  CHECK(std::isfinite(a.aqc_accuracy));
  CHECK(std::isfinite(a.silhouette));
  CHECK(!a.test_ids.empty());

  ExperimentSpec broken = f.Spec(Variant::kGstMf, 0.0);
  broken.filter_checkpoint.clear();
  const CellReport b = RunCell(broken, f.inputs, f.config);
  CHECK(b.status == CellStatus::kFailed);
  CHECK(!b.message.empty());
  const json jb = ToJson(b);
  CHECK(jb["status"] == "FAILED");
  CHECK(jb["aqc_accuracy"].is_null());

  const CellReport again = RunCell(f.Spec(Variant::kGstMfAux, 0.01), f.inputs, f.config);
  CHECK(again.loss_curve == a.loss_curve);
  CHECK(again.silhouette == a.silhouette);

  // Every variant runs on the same inputs; the held-out set uses its own
  // degraded stream.
  for (Variant v : {Variant::kTts, Variant::kGst, Variant::kGstAux}) {
    const CellReport r = RunCell(f.Spec(v, UsesAux(v) ? 0.01 : 0.0), f.inputs, f.config);
    CHECK(r.status == CellStatus::kOk);
    CHECK(r.test_ids == a.test_ids);
  }
  CHECK(HeldOutExamples(f.inputs, Variant::kGst, a.test_ids).back().quality ==
        corpus::Quality::kNoisy);
  CHECK(HeldOutExamples(f.inputs, Variant::kGstMf, a.test_ids).back().quality ==
        corpus::Quality::kFiltered);
}

TEST_CASE("untrained models give a complete, finite evaluation") {
  const MicroFixture f;
  const musicfilter::MusicFilter untrained_filter(f.config.filter, 5);
  std::vector<dsp::Waveform> speech;
  for (int i = 0; i < 3; ++i) speech.push_back(f.ws.target_clean.Load(f.ws.target_clean.records[i]));
  const auto grid = EvaluateFilterGrid(untrained_filter, f.config.features.stft, speech,
                                       f.ws.target_music_dir, {0, 10, 20}, 1);
  REQUIRE(grid.size() == 3);
  for (const auto& p : grid) {
    CHECK(p.count == 3);
    CHECK(std::isfinite(p.si_snr_noisy));
    CHECK(std::isfinite(p.si_snr_filtered));
    CHECK(std::isfinite(p.lsd_filtered));
  }
  CHECK(grid[2].si_snr_noisy > grid[0].si_snr_noisy);

  gsttts::Text2MelConfig tc = f.config.tts;
  tc.vocab_size = f.inputs.assets.vocabulary.size();
  const gsttts::Text2Mel model(tc, 6);
  std::vector<std::string> ids;
  for (int i = 0; i < 4; ++i) ids.push_back(f.ws.target_clean.records[i].id);
  const auto held_out = HeldOutExamples(f.inputs, Variant::kGstMf, ids);
  const gsttts::QualityEvaluation e = gsttts::EvaluateQuality(model, held_out);
  CHECK(std::isfinite(e.accuracy));
  CHECK(std::isfinite(Silhouette(e.embeddings, e.labels)));

  EvalReport report;
  report.filter_grid = grid;
  report.filter_seed = 1;
  const json j = ToJson(report);
  CHECK(j["filter"]["grid"].size() == 3);
  CHECK(j["filter"]["split"] == "test");
  CHECK(j.contains("proxy_metrics"));
}

TEST_CASE("speech synthesis is bounded and deterministic") {
  const MicroFixture f;
  gsttts::Text2MelConfig tc = f.config.tts;
  tc.vocab_size = f.inputs.assets.vocabulary.size();
  const gsttts::Text2Mel t2m(tc, 7);
  const ssrn::SsrnAssets sa = ssrn::FitSsrnAssets(f.ws.universal_clean, f.config.features);
  const ssrn::Ssrn net(f.config.ssrn, 8);
  const dsp::Waveform ref = f.ws.target_clean.Load(f.ws.target_clean.records[0]);
  SpeechOptions opt;
  opt.max_frames = 12;
  opt.griffin_lim_iters = 4;
  const SpeechResult a = SynthesizeSpeech(t2m, f.inputs.assets, net, sa, "salam", ref, opt);
  const SpeechResult b = SynthesizeSpeech(t2m, f.inputs.assets, net, sa, "salam", ref, opt);
  CHECK(a.wave.samples == b.wave.samples);
  CHECK(a.wave.sample_rate == 16000);
  CHECK(!a.wave.samples.empty());
  double peak = 0.0;
  for (double s : a.wave.samples) peak = std::max(peak, std::abs(s));
  CHECK(peak <= opt.peak);
  CHECK(a.wave.samples.size() ==
        static_cast<std::size_t>((a.decoder.mel.rows() * 4 - 1) * f.config.features.stft.hop_size));

  dsp::Waveform wrong_rate = ref;
  wrong_rate.sample_rate = 22050;
  CHECK_THROWS_AS(SynthesizeSpeech(t2m, f.inputs.assets, net, sa, "salam", wrong_rate, opt),
                  DataError);
}

}  // namespace
}  // namespace bgmtts::harness
