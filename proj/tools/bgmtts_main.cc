// Copyright 2026 The bgmtts Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

// Command-line front end. Exit codes: 0 success, 1 usage, 2 data or
// argument error, 3 numerical failure.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "bgmtts/base/error.h"
#include "bgmtts/corpus/build.h"
#include "bgmtts/harness/analysis.h"
#include "bgmtts/harness/config.h"
#include "bgmtts/harness/experiment.h"
#include "bgmtts/harness/synthesis.h"
#include "bgmtts/musicfilter/train.h"
#include "bgmtts/ssrn/train.h"

namespace bgmtts {
namespace {

namespace fs = std::filesystem;
using harness::PipelineConfig;
using nlohmann::json;

void WriteJson(const fs::path& path, const json& j) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  out << j.dump(2) << "\n";
}

void Print(const json& j) { std::cout << j.dump(2) << std::endl; }

std::vector<std::string> IdsOf(const corpus::Manifest& m, std::optional<corpus::Split> split) {
  std::vector<std::string> ids;
  for (const auto& r : m.records)
    if (!split || r.split == *split) ids.push_back(r.id);
  return ids;
}

// Examples from every manifest, optionally restricted to the held-out ids of
// a merged manifest.
std::vector<gsttts::TtsExample> LoadExamples(const std::vector<std::string>& manifests,
                                             const std::string& held_out_from,
                                             const gsttts::TtsAssets& assets) {
  std::optional<std::set<std::string>> keep;
  if (!held_out_from.empty()) {
    const auto ids = IdsOf(corpus::ReadManifest(held_out_from), corpus::Split::kTest);
    keep.emplace(ids.begin(), ids.end());
  }
  std::vector<gsttts::TtsExample> out;
  for (const auto& path : manifests) {
    const corpus::Manifest m = corpus::ReadManifest(path);
    std::vector<std::string> ids;
    for (const auto& r : m.records)
      if (!keep || keep->count(r.id)) ids.push_back(r.id);
    const auto part = gsttts::MakeExamples(m, ids, assets);
    out.insert(out.end(), part.begin(), part.end());
  }
  if (out.empty()) throw DataError("no utterances selected");
  return out;
}

struct Cli {
  CLI::App app{"Music-robust style-token TTS toolkit", "bgmtts"};
  std::uint64_t seed = 1;
  std::optional<std::uint64_t> seed_flag;
  std::string config_path;
  bool print_config = false;
  PipelineConfig config = PipelineConfig::Defaults();

  // Applies --config and --seed; returns true when the run should only print.
  bool Prepare() {
    if (!config_path.empty()) config = harness::LoadPipelineConfig(config_path);
    if (seed_flag) config.seed = *seed_flag;
    seed = config.seed;
    if (print_config) Print(json(config));
    return print_config;
  }
};

void AddMakeToy(Cli& cli) {
  auto* sub = cli.app.add_subcommand("make-toy", "Generate the synthetic speech and music corpora");
  static std::string out;
  sub->add_option("--out", out, "Output directory")->required();
  sub->callback([&cli] {
    if (cli.Prepare()) return;
    const harness::ToyWorkspace ws = harness::BuildToyWorkspace(out, cli.config);
    Print({{"target_clean", (fs::path(out) / "target/clean/manifest.jsonl").string()},
           {"target_noisy", (fs::path(out) / "target/noisy/manifest.jsonl").string()},
           {"universal_clean", (fs::path(out) / "universal/clean/manifest.jsonl").string()},
           {"universal_noisy", (fs::path(out) / "universal/noisy/manifest.jsonl").string()},
           {"filter_music", (fs::path(out) / "music/filter").string()},
           {"target_music", ws.target_music_dir.string()},
           {"target_utterances", ws.target_clean.records.size()}});
  });
}

void AddMix(Cli& cli) {
  auto* sub = cli.app.add_subcommand("mix", "Mix clean speech with music at random SNRs");
  static std::string clean, music, out;
  static std::optional<double> lo, hi;
  sub->add_option("--clean", clean, "Clean manifest")->required();
  sub->add_option("--music-dir", music, "Directory of music WAVs")->required();
  sub->add_option("--out", out, "Output directory")->required();
  sub->add_option("--snr-lo", lo, "Lowest SNR in dB (default from config)");
  sub->add_option("--snr-hi", hi, "Highest SNR in dB (default from config)");
  sub->callback([&cli] {
    if (cli.Prepare()) return;
    const corpus::Manifest m = corpus::BuildMixedCorpus(
        corpus::ReadManifest(clean), music, lo.value_or(cli.config.data.snr_lo_db),
        hi.value_or(cli.config.data.snr_hi_db), cli.seed, out);
    Print({{"manifest", (fs::path(out) / "manifest.jsonl").string()},
           {"utterances", m.records.size()}});
  });
}

void AddTrainFilter(Cli& cli) {
  auto* sub = cli.app.add_subcommand("train-filter", "Train the music filter on noisy/clean pairs");
  static std::string noisy, clean, out;
  static std::optional<int> steps;
  sub->add_option("--noisy", noisy, "Noisy manifest")->required();
  sub->add_option("--clean", clean, "Clean manifest with the same ids")->required();
  sub->add_option("--out", out, "Checkpoint path")->required();
  sub->add_option("--steps", steps, "Training steps; 0 saves the initial model");
  sub->callback([&cli] {
    if (cli.Prepare()) return;
    musicfilter::MusicFilter model(cli.config.filter, cli.seed);
    musicfilter::FilterTrainOptions opt = cli.config.filter_train;
    opt.steps = steps.value_or(opt.steps);
    if (opt.steps == 0) {
      model.Save(out, nullptr, 0);
      Print({{"checkpoint", out}, {"steps", 0}});
      return;
    }
    opt.seed = cli.seed;
    opt.checkpoint_path = out;
    opt.log_path = out + ".log.jsonl";
    const auto pairs = musicfilter::LoadSpectrogramPairs(
        corpus::ReadManifest(noisy), corpus::ReadManifest(clean), cli.config.features.stft);
    const auto result = musicfilter::TrainFilter(model, pairs, opt);
    Print({{"checkpoint", out}, {"steps", opt.steps}, {"final_loss", result.losses.back()}});
  });
}

void AddFilter(Cli& cli) {
  auto* sub = cli.app.add_subcommand("filter", "Remove music from a noisy corpus");
  static std::string checkpoint, manifest, out;
  sub->add_option("--checkpoint", checkpoint, "Music-filter checkpoint")->required();
  sub->add_option("--manifest", manifest, "Noisy manifest")->required();
  sub->add_option("--out", out, "Output directory")->required();
  sub->callback([&cli] {
    if (cli.Prepare()) return;
    const auto model = musicfilter::MusicFilter::Load(checkpoint);
    const corpus::Manifest m = harness::FilterManifest(corpus::ReadManifest(manifest), *model,
                                                       model->stft(), out);
    Print({{"manifest", (fs::path(out) / "manifest.jsonl").string()},
           {"utterances", m.records.size()}});
  });
}

void AddMerge(Cli& cli) {
  auto* sub = cli.app.add_subcommand(
      "merge", "Build a training manifest with a given clean share and a held-out test split");
  static std::string clean, degraded, out;
  static double ratio = 0.3;
  sub->add_option("--clean", clean, "Clean manifest")->required();
  sub->add_option("--degraded", degraded, "Noisy or filtered manifest with the same ids")
      ->required();
  sub->add_option("--clean-ratio", ratio, "Share of the training audio kept clean")
      ->check(CLI::Range(0.0, 1.0));
  sub->add_option("--out", out, "Output manifest path")->required();
  sub->callback([&cli] {
    if (cli.Prepare()) return;
    const corpus::Manifest c = corpus::ReadManifest(clean);
    const double total_h = c.TotalSeconds() / 3600.0;
    const corpus::CleanPartition part = corpus::PartitionByCleanHours(
        c, ratio * total_h, total_h, cli.seed, cli.config.data.test_fraction);
    const fs::path path(out);
    const fs::path base = path.has_parent_path() ? path.parent_path() : fs::path(".");
    fs::create_directories(base);
    const corpus::Manifest merged =
        corpus::MergeQualityStreams(part, c, corpus::ReadManifest(degraded), base);
    corpus::WriteManifest(path, merged);
    Print({{"manifest", out},
           {"clean", part.clean_ids.size()},
           {"degraded", part.degraded_ids.size()},
           {"test", part.test_ids.size()}});
  });
}

void AddTrainTts(Cli& cli) {
  auto* sub = cli.app.add_subcommand("train-tts", "Train Text2Mel with the quality embedding");
  static std::string manifest, out;
  static std::optional<double> lambda;
  static std::optional<int> steps;
  static double lr_scale = 1.0;
  sub->add_option("--manifest", manifest, "Merged manifest; its train split is used")->required();
  sub->add_option("--out", out, "Checkpoint path")->required();
  sub->add_option("--lambda", lambda, "Classifier loss weight (default from config)");
  sub->add_option("--steps", steps, "Training steps; 0 saves the initial model");
  sub->add_option("--lr-scale", lr_scale, "Multiplier on the learning rate");
  sub->callback([&cli] {
    if (cli.Prepare()) return;
    const corpus::Manifest m = corpus::ReadManifest(manifest);
    const gsttts::TtsAssets assets = gsttts::FitAssets(m, cli.config.features);
    gsttts::Text2MelConfig tc = cli.config.tts;
    tc.vocab_size = assets.vocabulary.size();
    gsttts::Text2Mel model(tc, cli.seed);
    gsttts::TtsTrainOptions opt = cli.config.tts_train;
    opt.steps = steps.value_or(opt.steps);
    if (lambda) opt.lambda = *lambda;
    else if (cli.config.lambda) opt.lambda = *cli.config.lambda;
    if (opt.steps == 0) {
      gsttts::SaveTts(out, model, assets);
      Print({{"checkpoint", out}, {"steps", 0}});
      return;
    }
    opt.seed = cli.seed;
    opt.adam.lr *= lr_scale;
    opt.checkpoint_path = out;
    opt.log_path = out + ".log.jsonl";
    harness::DivergenceMonitor monitor(cli.config.divergence);
    opt.on_step = [&](int step, const gsttts::LossBundle& b) { return monitor.Observe(step, b.l_total); };
    const auto examples =
        gsttts::MakeExamples(m, IdsOf(m, corpus::Split::kTrain), assets);
    const auto result = gsttts::TrainTts(model, assets, examples, opt);
    if (monitor.diverged()) throw NumericalError("training diverged: " + monitor.reason());
    Print({{"checkpoint", out},
           {"steps", result.history.size()},
           {"final_losses", gsttts::ToJson(result.history.back().losses)}});
  });
}

void AddTrainSsrn(Cli& cli) {
  auto* sub = cli.app.add_subcommand("train-ssrn", "Train the spectrogram super-resolution net");
  static std::string manifest, out;
  static std::optional<int> steps;
  sub->add_option("--manifest", manifest, "Clean multi-speaker manifest")->required();
  sub->add_option("--out", out, "Checkpoint path")->required();
  sub->add_option("--steps", steps, "Training steps; 0 saves the initial model");
  sub->callback([&cli] {
    if (cli.Prepare()) return;
    const corpus::Manifest m = corpus::ReadManifest(manifest);
    const ssrn::SsrnAssets assets = ssrn::FitSsrnAssets(m, cli.config.features);
    ssrn::Ssrn model(cli.config.ssrn, cli.seed);
    ssrn::SsrnTrainOptions opt = cli.config.ssrn_train;
    opt.steps = steps.value_or(opt.steps);
    if (opt.steps == 0) {
      ssrn::SaveSsrn(out, model, assets);
      Print({{"checkpoint", out}, {"steps", 0}});
      return;
    }
    opt.seed = cli.seed;
    opt.checkpoint_path = out;
    opt.log_path = out + ".log.jsonl";
    const auto losses = ssrn::TrainSsrn(model, assets, ssrn::MakeSsrnExamples(m, assets), opt);
    Print({{"checkpoint", out}, {"steps", losses.size()}, {"final_loss", losses.back()}});
  });
}

void AddSynth(Cli& cli) {
  auto* sub = cli.app.add_subcommand("synth", "Synthesize speech conditioned on a clean reference");
  static std::string tts, ssrn_path, text, ref, out;
  sub->add_option("--tts", tts, "Text2Mel checkpoint")->required();
  sub->add_option("--ssrn", ssrn_path, "SSRN checkpoint")->required();
  sub->add_option("--text", text, "Text to speak")->required();
  sub->add_option("--ref", ref, "Clean reference WAV")->required();
  sub->add_option("--out", out, "Output WAV")->required();
  sub->callback([&cli] {
    if (cli.Prepare()) return;
    const gsttts::LoadedTts t = gsttts::LoadTts(tts);
    const ssrn::LoadedSsrn s = ssrn::LoadSsrn(ssrn_path);
    harness::SpeechOptions opt;
    opt.max_frames = cli.config.max_frames;
    opt.griffin_lim_iters = cli.config.griffin_lim_iters;
    opt.seed = cli.seed;
    const harness::SpeechResult r = harness::SynthesizeSpeech(
        *t.model, t.assets, *s.model, s.assets, text, dsp::ReadWav(ref, dsp::kDefaultSampleRate),
        opt);
    if (fs::path(out).has_parent_path()) fs::create_directories(fs::path(out).parent_path());
    dsp::WriteWav(out, r.wave);
    Print({{"wav", out},
           {"decoder_frames", r.decoder.mel.rows()},
           {"seconds", r.wave.duration_s()},
           {"completed", r.decoder.completed}});
  });
}

void AddEmbedExport(Cli& cli) {
  auto* sub = cli.app.add_subcommand("embed-export", "Export quality embeddings and their PCA");
  static std::string checkpoint, held_out_from, out;
  static std::vector<std::string> manifests;
  sub->add_option("--checkpoint", checkpoint, "Text2Mel checkpoint")->required();
  sub->add_option("--manifest", manifests, "Manifest(s) to embed; repeat for several")->required();
  sub->add_option("--held-out-from", held_out_from,
                  "Keep only the test-split ids of this merged manifest");
  sub->add_option("--out", out, "CSV path (PCA summary goes to <out>.json)")->required();
  sub->callback([&cli] {
    if (cli.Prepare()) return;
    const gsttts::LoadedTts t = gsttts::LoadTts(checkpoint);
    const auto examples = LoadExamples(manifests, held_out_from, t.assets);
    const gsttts::QualityEvaluation e = gsttts::EvaluateQuality(*t.model, examples);
    std::vector<std::string> labels;
    for (const auto& ex : examples) labels.push_back(corpus::QualityName(ex.quality));
    const harness::PcaResult pca = harness::Pca(e.embeddings, 2);
    harness::WriteEmbeddingCsv(out, e.ids, labels, e.embeddings, pca);
    Print({{"csv", out},
           {"utterances", examples.size()},
           {"explained_variance_ratio", std::vector<double>(pca.explained_variance_ratio.begin(),
                                                            pca.explained_variance_ratio.end())}});
  });
}

void AddEval(Cli& cli) {
  auto* sub = cli.app.add_subcommand("eval", "Proxy-metric report for trained or untrained models");
  static std::string tts, held_out_from, filter, speech, music, out;
  static std::vector<std::string> manifests;
  sub->add_option("--tts", tts, "Text2Mel checkpoint")->required();
  sub->add_option("--manifest", manifests, "Clean and degraded manifests; repeat")->required();
  sub->add_option("--held-out-from", held_out_from,
                  "Keep only the test-split ids of this merged manifest");
  sub->add_option("--filter", filter, "Music-filter checkpoint for the SNR grid");
  sub->add_option("--speech", speech, "Clean manifest for the filter grid");
  sub->add_option("--music-dir", music, "Music held out from filter training");
  sub->add_option("--out", out, "Report path")->required();
  sub->callback([&cli] {
    if (cli.Prepare()) return;
    if (!filter.empty() && (speech.empty() || music.empty()))
      throw ArgumentError("--filter needs --speech and --music-dir");
    const gsttts::LoadedTts t = gsttts::LoadTts(tts);
    const auto examples = LoadExamples(manifests, held_out_from, t.assets);
    const gsttts::QualityEvaluation e = gsttts::EvaluateQuality(*t.model, examples);
    const double silhouette = harness::Silhouette(e.embeddings, e.labels);
    const std::string split = held_out_from.empty() ? "all" : "test";
    json report = {{"schema", "bgmtts.eval_report/1"},
                   {"proxy_metrics", harness::ProxyMetricsJson()},
                   {"tts",
                    {{"checkpoint", tts},
                     {"step", t.step},
                     {"training", t.training},
                     {"seed", cli.seed},
                     {"split", split},
                     {"utterances", examples.size()},
                     {"aqc_accuracy", e.accuracy},
                     {"silhouette", silhouette}}}};
    if (!filter.empty()) {
      const auto model = musicfilter::MusicFilter::Load(filter);
      const corpus::Manifest m = corpus::ReadManifest(speech);
      std::vector<dsp::Waveform> waves;
      std::optional<std::set<std::string>> keep;
      if (!held_out_from.empty()) {
        const auto ids = IdsOf(corpus::ReadManifest(held_out_from), corpus::Split::kTest);
        keep.emplace(ids.begin(), ids.end());
      }
      for (const auto& r : m.records)
        if (!keep || keep->count(r.id)) waves.push_back(m.Load(r));
      report["filter"] = harness::FilterGridJson(
          harness::EvaluateFilterGrid(*model, model->stft(), waves, music, {0, 5, 10, 15, 20},
                                      cli.seed),
          cli.seed);
      report["filter"]["split"] = split;
    }
    WriteJson(out, report);
    Print(report);
  });
}

void AddAblate(Cli& cli) {
  auto* sub = cli.app.add_subcommand("ablate", "Run the full toy study: every variant x clean share");
  static std::string out;
  sub->add_option("--out", out, "Working directory")->required();
  sub->callback([&cli] {
    if (cli.Prepare()) return;
    const json report = harness::ToJson(harness::RunAblation(out, cli.config));
    WriteJson(fs::path(out) / "report.json", report);
    for (const auto& c : report["cells"])
      std::printf("%-11s clean=%.2f  %-8s acc=%s  silhouette=%s\n",
                  c["variant"].get<std::string>().c_str(), c["clean_ratio"].get<double>(),
                  c["status"].get<std::string>().c_str(), c["aqc_accuracy"].dump().c_str(),
                  c["silhouette"].dump().c_str());
  });
}

int Main(int argc, char** argv) {
  Cli cli;
  cli.app.require_subcommand(0, 1);
  cli.app.fallthrough();
  cli.app.add_option("--seed", cli.seed_flag, "Random seed (overrides the config)");
  cli.app.add_option("--config", cli.config_path, "JSON file overriding the defaults")
      ->check(CLI::ExistingFile);
  cli.app.add_flag("--print-config", cli.print_config, "Print the effective config and exit");
  AddMakeToy(cli);
  AddMix(cli);
  AddTrainFilter(cli);
  AddFilter(cli);
  AddMerge(cli);
  AddTrainTts(cli);
  AddTrainSsrn(cli);
  AddSynth(cli);
  AddEmbedExport(cli);
  AddEval(cli);
  AddAblate(cli);
  try {
    cli.app.parse(argc, argv);
    if (cli.app.get_subcommands().empty()) {
      if (cli.Prepare()) return 0;
      std::cerr << cli.app.help();
      return 1;
    }
  } catch (const CLI::ParseError& e) {
    const int code = cli.app.exit(e);
    return code == 0 ? 0 : 1;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}

}  // namespace
}  // namespace bgmtts

int main(int argc, char** argv) { return bgmtts::Main(argc, argv); }
