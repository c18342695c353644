// Copyright 2026 The bgmtts Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "bgmtts/harness/experiment.h"

#include <algorithm>
#include <cstdio>
#include <sstream>

#include "bgmtts/base/error.h"
#include "bgmtts/corpus/build.h"
#include "bgmtts/corpus/toy.h"
#include "bgmtts/dsp/mix.h"
#include "bgmtts/harness/analysis.h"

namespace bgmtts::harness {

namespace {

using nlohmann::json;

json NumberOrNull(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

std::vector<dsp::Waveform> ReadMusicDir(const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir))
    if (entry.path().extension() == ".wav") files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  if (files.empty()) throw DataError("no music files in " + dir.string());
  std::vector<dsp::Waveform> out;
  for (const auto& f : files) out.push_back(dsp::ReadWav(f, dsp::kDefaultSampleRate));
  return out;
}

std::string CellName(const ExperimentSpec& spec) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "_%02d", static_cast<int>(std::lround(spec.clean_ratio * 100)));
  std::string name = VariantName(spec.variant);
  std::replace(name.begin(), name.end(), '+', '_');
  return name + buf;
}

}  // namespace

std::string VariantName(Variant v) {
  switch (v) {
    case Variant::kTts: return "TTS";
    case Variant::kGst: return "GST";
    case Variant::kGstAux: return "GST+Aux";
    case Variant::kGstMf: return "GST+MF";
    case Variant::kGstMfAux: return "GST+MF+Aux";
  }
  return "?";
}

Variant ParseVariant(const std::string& name) {
  for (Variant v : {Variant::kTts, Variant::kGst, Variant::kGstAux, Variant::kGstMf,
                    Variant::kGstMfAux})
    if (VariantName(v) == name) return v;
  throw ArgumentError("unknown model variant '" + name + "'");
}

bool UsesFilter(Variant v) { return v == Variant::kGstMf || v == Variant::kGstMfAux; }
bool UsesAux(Variant v) { return v == Variant::kGstAux || v == Variant::kGstMfAux; }

void ExperimentSpec::Validate() const {
  if (!(clean_ratio > 0.0 && clean_ratio < 1.0))
    throw ArgumentError("clean_ratio must lie in (0, 1)");
  if (UsesFilter(variant) && filter_checkpoint.empty())
    throw ArgumentError(VariantName(variant) + " requires a music-filter checkpoint");
  if (UsesAux(variant) && !(lambda > 0.0))
    throw ArgumentError(VariantName(variant) + " requires lambda > 0");
  if (!UsesAux(variant) && lambda != 0.0)
    throw ArgumentError(VariantName(variant) + " trains without the classifier; lambda must be 0");
  if (!(lr_scale > 0.0)) throw ArgumentError("lr_scale must be positive");
}

bool DivergenceMonitor::Observe(int step, double loss) {
  if (diverged_) return false;
  std::ostringstream why;
  if (!std::isfinite(loss)) {
    why << "loss is not finite at step " << step;
  } else {
    if (!first_) first_ = loss;
    if (step == config_.reference_step) {
      reference_ = loss;
      if (loss > *first_)
        why << "loss at step " << step << " (" << loss << ") is above its first-step value ("
            << *first_ << ")";
    } else if (reference_ && loss > config_.factor * *reference_) {
      why << "loss " << loss << " at step " << step << " exceeds " << config_.factor
          << "x its step-" << config_.reference_step << " value " << *reference_;
    }
  }
  reason_ = why.str();
  diverged_ = !reason_.empty();
  return !diverged_;
}

ToyWorkspace BuildToyWorkspace(const std::filesystem::path& root, const PipelineConfig& config) {
  const ToyDataConfig& d = config.data;
  const std::uint64_t seed = config.seed;
  ToyWorkspace ws;
  ws.root = root;
  std::filesystem::remove_all(root);

  corpus::ToyCorpusConfig target;
  target.num_utterances = d.utterances;
  target.num_speakers = 1;
  target.seed = seed;
  target.id_prefix = "utt";
  ws.target_clean = corpus::MakeToySpeechCorpus(root / "target" / "clean", target);

  corpus::ToyCorpusConfig universal;
  universal.num_utterances = d.universal_utterances;
  universal.num_speakers = d.universal_speakers;
  universal.seed = seed + 1;
  universal.id_prefix = "uni";
  ws.universal_clean = corpus::MakeToySpeechCorpus(root / "universal" / "clean", universal);

  corpus::MakeToyMusicDir(root / "music" / "filter", d.filter_music_files, d.music_seconds, seed + 2);
  ws.target_music_dir = root / "music" / "target";
  corpus::MakeToyMusicDir(ws.target_music_dir, d.target_music_files, d.music_seconds, seed + 3);

  ws.universal_noisy = corpus::BuildMixedCorpus(ws.universal_clean, root / "music" / "filter",
                                                d.snr_lo_db, d.snr_hi_db, seed + 4,
                                                root / "universal" / "noisy");
  ws.target_noisy = corpus::BuildMixedCorpus(ws.target_clean, ws.target_music_dir, d.snr_lo_db,
                                             d.snr_hi_db, seed + 5, root / "target" / "noisy");
  return ws;
}

std::unique_ptr<musicfilter::MusicFilter> TrainToyFilter(const ToyWorkspace& ws,
                                                         const PipelineConfig& config,
                                                         const std::filesystem::path& checkpoint) {
  const auto pairs =
      musicfilter::LoadSpectrogramPairs(ws.universal_noisy, ws.universal_clean, config.features.stft);
  auto model = std::make_unique<musicfilter::MusicFilter>(config.filter, config.seed);
  musicfilter::FilterTrainOptions opt = config.filter_train;
  opt.seed = config.seed;
  opt.checkpoint_path = checkpoint;
  if (!checkpoint.empty()) opt.log_path = checkpoint.string() + ".log.jsonl";
  musicfilter::TrainFilter(*model, pairs, opt);
  return model;
}

corpus::Manifest FilterManifest(const corpus::Manifest& noisy, const musicfilter::MusicFilter& filter,
                                const dsp::StftParams& stft, const std::filesystem::path& out_dir) {
  const musicfilter::MaskFunction mask = [&](const dsp::MagnitudeSpectrogram& m) {
    return filter.PredictMask(m);
  };
  return corpus::FilterCorpus(
      noisy, [&](const dsp::Waveform& w) { return musicfilter::FilterWithMask(w, stft, mask); },
      out_dir);
}

std::vector<FilterGridPoint> EvaluateFilterGrid(const musicfilter::MusicFilter& filter,
                                                const dsp::StftParams& stft,
                                                const std::vector<dsp::Waveform>& speech,
                                                const std::filesystem::path& music_dir,
                                                const std::vector<double>& snrs_db,
                                                std::uint64_t seed) {
  if (speech.empty()) throw DataError("no held-out speech for the filter evaluation");
  const std::vector<dsp::Waveform> music = ReadMusicDir(music_dir);
  const musicfilter::MaskFunction mask = [&](const dsp::MagnitudeSpectrogram& m) {
    return filter.PredictMask(m);
  };
  std::vector<FilterGridPoint> out;
  for (std::size_t k = 0; k < snrs_db.size(); ++k) {
    std::vector<musicfilter::WavePair> pairs;
    for (std::size_t i = 0; i < speech.size(); ++i) {
      const dsp::MixResult mix =
          dsp::MixAtSnr(speech[i], music[i % music.size()], snrs_db[k], seed + 1000 * k + i);
      pairs.push_back({speech[i], mix.mixture});
    }
    const musicfilter::FilterEvaluation e = musicfilter::EvaluateFilter(mask, stft, pairs);
    out.push_back({snrs_db[k], e.si_snr_noisy, e.si_snr_filtered, e.lsd_noisy, e.lsd_filtered,
                   e.count});
  }
  return out;
}

std::string CellStatusName(CellStatus s) {
  switch (s) {
    case CellStatus::kOk: return "OK";
    case CellStatus::kDiverged: return "DIVERGED";
    case CellStatus::kFailed: return "FAILED";
  }
  return "?";
}

std::vector<gsttts::TtsExample> HeldOutExamples(const CellInputs& inputs, Variant variant,
                                                const std::vector<std::string>& test_ids) {
  const corpus::Manifest* degraded = UsesFilter(variant) ? inputs.filtered : inputs.noisy;
  if (!degraded) throw DataError("no degraded stream for the held-out set");
  std::vector<gsttts::TtsExample> out = gsttts::MakeExamples(*inputs.clean, test_ids, inputs.assets);
  const auto bad = gsttts::MakeExamples(*degraded, test_ids, inputs.assets);
  out.insert(out.end(), bad.begin(), bad.end());
  return out;
}

CellReport RunCell(const ExperimentSpec& spec, const CellInputs& inputs,
                   const PipelineConfig& config) {
  CellReport r;
  r.spec = spec;
  try {
    spec.Validate();
    if (!inputs.clean || !inputs.noisy) throw ArgumentError("clean and noisy streams are required");
    if (UsesFilter(spec.variant) && !inputs.filtered)
      throw ArgumentError(VariantName(spec.variant) + " requires the filtered stream");
    const corpus::Manifest& clean = *inputs.clean;
    const double total_h = clean.TotalSeconds() / 3600.0;
    const corpus::CleanPartition part = corpus::PartitionByCleanHours(
        clean, spec.clean_ratio * total_h, total_h, spec.seed, config.data.test_fraction);
    r.test_ids = part.test_ids;

    std::vector<gsttts::TtsExample> train =
        gsttts::MakeExamples(clean, part.clean_ids, inputs.assets);
    if (spec.variant != Variant::kTts) {
      const corpus::Manifest& degraded =
          UsesFilter(spec.variant) ? *inputs.filtered : *inputs.noisy;
      const auto extra = gsttts::MakeExamples(degraded, part.degraded_ids, inputs.assets);
      train.insert(train.end(), extra.begin(), extra.end());
    }

    gsttts::Text2MelConfig tc = config.tts;
    tc.vocab_size = inputs.assets.vocabulary.size();
    gsttts::Text2Mel model(tc, spec.seed);
    gsttts::TtsTrainOptions opt = config.tts_train;
    opt.lambda = spec.lambda;
    opt.seed = spec.seed;
    opt.adam.lr *= spec.lr_scale;
    if (!spec.out_dir.empty()) {
      opt.log_path = spec.out_dir / "train.jsonl";
      opt.checkpoint_path = spec.out_dir / "tts.ckpt";
    }
    DivergenceMonitor monitor(config.divergence);
    opt.on_step = [&](int step, const gsttts::LossBundle& b) {
      r.loss_curve.emplace_back(step, b.l_total);
      r.final_losses = b;
      r.steps_completed = step;
      return monitor.Observe(step, b.l_total);
    };
    try {
      gsttts::TrainTts(model, inputs.assets, train, opt);
    } catch (const NumericalError& e) {
      r.status = CellStatus::kDiverged;
      r.message = e.what();
      return r;
    }
    if (monitor.diverged()) {
      r.status = CellStatus::kDiverged;
      r.message = monitor.reason();
      return r;
    }

    const auto held_out = HeldOutExamples(inputs, spec.variant, part.test_ids);
    const gsttts::QualityEvaluation e = gsttts::EvaluateQuality(model, held_out);
    r.aqc_accuracy = e.accuracy;
    r.silhouette = Silhouette(e.embeddings, e.labels);
  } catch (const std::exception& e) {
    r.status = CellStatus::kFailed;
    r.message = e.what();
  }
  return r;
}

json ToJson(const CellReport& r) {
  json curve = json::array();
  for (const auto& [step, loss] : r.loss_curve) curve.push_back({step, NumberOrNull(loss)});
  json losses = gsttts::ToJson(r.final_losses);
  for (auto& [key, value] : losses.items())
    if (value.is_number() && !std::isfinite(value.get<double>())) value = nullptr;
  return {{"variant", VariantName(r.spec.variant)},
          {"clean_ratio", r.spec.clean_ratio},
          {"lambda", r.spec.lambda},
          {"seed", r.spec.seed},
          {"lr_scale", r.spec.lr_scale},
          {"split", "test"},
          {"status", CellStatusName(r.status)},
          {"message", r.message},
          {"steps_completed", r.steps_completed},
          {"aqc_accuracy", NumberOrNull(r.aqc_accuracy)},
          {"silhouette", NumberOrNull(r.silhouette)},
          {"final_losses", losses},
          {"test_utterances", r.test_ids.size()},
          {"loss_curve", curve}};
}

json FilterGridJson(const std::vector<FilterGridPoint>& grid_points, std::uint64_t seed) {
  json grid = json::array();
  for (const auto& p : grid_points)
    grid.push_back({{"snr_db", p.snr_db},
                    {"si_snr_noisy_db", NumberOrNull(p.si_snr_noisy)},
                    {"si_snr_filtered_db", NumberOrNull(p.si_snr_filtered)},
                    {"si_snr_improvement_db", NumberOrNull(p.si_snr_filtered - p.si_snr_noisy)},
                    {"lsd_noisy_db", NumberOrNull(p.lsd_noisy)},
                    {"lsd_filtered_db", NumberOrNull(p.lsd_filtered)},
                    {"count", p.count}});
  return {{"seed", seed}, {"split", "test"}, {"grid", grid}};
}

json ProxyMetricsJson() {
  return {{"filter_quality", "SI-SNR improvement and log-spectral distance of filtered vs noisy "
                             "speech stand in for PESQ"},
          {"quality_disentanglement",
           "held-out classifier accuracy and clean/degraded silhouette of the quality "
           "embedding stand in for the PCA plots"},
          {"synthesis_quality", "not measured: intelligibility and listening tests are out of scope"}};
}

json ToJson(const EvalReport& r) {
  json cells = json::array();
  for (const auto& c : r.cells) cells.push_back(ToJson(c));
  return {{"schema", "bgmtts.eval_report/1"},
          {"proxy_metrics", ProxyMetricsJson()},
          {"filter", FilterGridJson(r.filter_grid, r.filter_seed)},
          {"cells", cells}};
}

EvalReport RunAblation(const std::filesystem::path& root, const PipelineConfig& config) {
  const ToyWorkspace ws = BuildToyWorkspace(root / "data", config);
  const std::filesystem::path filter_ckpt = root / "models" / "filter.ckpt";
  std::filesystem::create_directories(filter_ckpt.parent_path());
  const auto filter = TrainToyFilter(ws, config, filter_ckpt);
  const corpus::Manifest filtered =
      FilterManifest(ws.target_noisy, *filter, config.features.stft, root / "data" / "target" / "filtered");

  CellInputs inputs;
  inputs.clean = &ws.target_clean;
  inputs.noisy = &ws.target_noisy;
  inputs.filtered = &filtered;
  inputs.assets = gsttts::FitAssets(ws.target_clean, config.features);

  EvalReport report;
  report.filter_seed = config.seed;
  {
    const double total_h = ws.target_clean.TotalSeconds() / 3600.0;
    const corpus::CleanPartition part = corpus::PartitionByCleanHours(
        ws.target_clean, 0.5 * total_h, total_h, config.seed, config.data.test_fraction);
    std::vector<dsp::Waveform> speech;
    for (const auto& id : part.test_ids)
      speech.push_back(ws.target_clean.Load(*ws.target_clean.Find(id)));
    report.filter_grid = EvaluateFilterGrid(*filter, config.features.stft, speech,
                                            ws.target_music_dir, {0, 5, 10, 15, 20}, config.seed);
  }

  for (const auto& name : config.variants) {
    const Variant v = ParseVariant(name);
    for (double ratio : config.clean_ratios) {
      ExperimentSpec spec;
      spec.variant = v;
      spec.clean_ratio = ratio;
      spec.seed = config.seed;
      spec.lambda = UsesAux(v) ? config.lambda.value_or(gsttts::DefaultAqcWeight(ratio)) : 0.0;
      if (UsesFilter(v)) spec.filter_checkpoint = filter_ckpt;
      spec.out_dir = root / "cells" / CellName(spec);
      report.cells.push_back(RunCell(spec, inputs, config));
    }
  }
  return report;
}

}  // namespace bgmtts::harness
