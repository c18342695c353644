// Copyright 2026 The bgmtts Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "bgmtts/corpus/build.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include "bgmtts/base/error.h"
#include "bgmtts/dsp/mix.h"

namespace bgmtts::corpus {

namespace {

std::vector<std::filesystem::path> ListWavs(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir))
    throw DataError("music directory " + dir.string() + " does not exist");
  std::vector<std::filesystem::path> out;
  for (const auto& entry : std::filesystem::directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ".wav")
      out.push_back(entry.path());
  std::sort(out.begin(), out.end());
  if (out.empty()) throw DataError("no .wav files in music directory " + dir.string());
  return out;
}

std::string Relative(const std::filesystem::path& target, const std::filesystem::path& base) {
  return std::filesystem::absolute(target)
      .lexically_normal()
      .lexically_relative(std::filesystem::absolute(base).lexically_normal())
      .generic_string();
}

}  // namespace

Manifest BuildMixedCorpus(const Manifest& clean, const std::filesystem::path& music_dir,
                          double snr_lo, double snr_hi, std::uint64_t seed,
                          const std::filesystem::path& out_dir) {
  if (!(snr_lo <= snr_hi) || !std::isfinite(snr_lo) || !std::isfinite(snr_hi))
    throw ArgumentError("SNR range must satisfy lo <= hi and be finite");
  const auto music_files = ListWavs(music_dir);
  std::map<std::size_t, dsp::Waveform> music_cache;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> snr_dist(snr_lo, snr_hi);
  std::uniform_int_distribution<std::size_t> pick(0, music_files.size() - 1);

  std::filesystem::create_directories(out_dir / "wav");
  Manifest out;
  out.base_dir = out_dir;
  for (const auto& rec : clean.records) {
    const double snr = snr_lo == snr_hi ? snr_lo : snr_dist(rng);
    const std::size_t which = pick(rng);
    const std::uint64_t mix_seed = rng();
    auto it = music_cache.find(which);
    if (it == music_cache.end())
      it = music_cache.emplace(which, dsp::ReadWav(music_files[which], dsp::kDefaultSampleRate))
               .first;
    const dsp::Waveform speech = clean.Load(rec);
    dsp::MixResult mix = dsp::MixAtSnr(speech, it->second, snr, mix_seed);
    double peak = 0.0;
    for (double s : mix.mixture.samples) peak = std::max(peak, std::abs(s));
    if (peak > 0.99)
      for (double& s : mix.mixture.samples) s *= 0.99 / peak;

    UtteranceRecord r = rec;
    r.quality = Quality::kNoisy;
    r.snr_db = dsp::MeasureSnrDb(speech, mix.scaled_music);
    r.audio_path = "wav/" + rec.id + ".wav";
    r.duration_s = mix.mixture.duration_s();
    dsp::WriteWav(out_dir / r.audio_path, mix.mixture);
    out.records.push_back(std::move(r));
  }
  WriteManifest(out_dir / "manifest.jsonl", out);
  return out;
}

CleanPartition PartitionByCleanHours(const Manifest& manifest, double clean_hours,
                                     double total_hours, std::uint64_t seed,
                                     double test_fraction) {
  if (!(clean_hours > 0.0) || !(clean_hours < total_hours))
    throw ArgumentError("clean_hours must satisfy 0 < clean_hours < total_hours");
  if (!(test_fraction >= 0.0 && test_fraction < 1.0))
    throw ArgumentError("test_fraction must lie in [0, 1)");
  const double total_s = total_hours * 3600.0;
  if (manifest.TotalSeconds() < total_s * (1.0 - 1e-9))
    throw DataError("manifest holds less audio than the requested total_hours");

  std::vector<const UtteranceRecord*> order;
  for (const auto& r : manifest.records) order.push_back(&r);
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);

  std::vector<const UtteranceRecord*> pool;
  double pool_s = 0.0;
  for (const auto* r : order) {
    if (pool_s >= total_s * (1.0 - 1e-9)) break;
    pool.push_back(r);
    pool_s += r->duration_s;
  }
  std::size_t n_test = 0;
  if (test_fraction > 0.0)
    n_test = std::max<std::size_t>(1, static_cast<std::size_t>(
                                          std::lround(test_fraction * pool.size())));
  if (n_test + 2 > pool.size()) throw DataError("too few utterances to partition");

  CleanPartition out;
  for (std::size_t i = 0; i < n_test; ++i) {
    out.test_ids.push_back(pool[i]->id);
    out.test_seconds += pool[i]->duration_s;
  }
  double train_s = 0.0;
  for (std::size_t i = n_test; i < pool.size(); ++i) train_s += pool[i]->duration_s;
  const double clean_target = train_s * clean_hours / total_hours;
  for (std::size_t i = n_test; i < pool.size(); ++i) {
    if (out.clean_seconds < clean_target) {
      out.clean_ids.push_back(pool[i]->id);
      out.clean_seconds += pool[i]->duration_s;
    } else {
      out.degraded_ids.push_back(pool[i]->id);
      out.degraded_seconds += pool[i]->duration_s;
    }
  }
  if (out.clean_ids.empty() || out.degraded_ids.empty())
    throw DataError("partition left the clean or degraded stream empty");
  return out;
}

Manifest MergeQualityStreams(const CleanPartition& partition, const Manifest& clean,
                             const Manifest& degraded, const std::filesystem::path& base_dir) {
  Manifest out;
  out.base_dir = base_dir;
  auto take = [&](const Manifest& src, const std::string& id, Split split) {
    const UtteranceRecord* r = src.Find(id);
    if (!r) throw DataError("utterance " + id + " missing from a quality stream");
    UtteranceRecord copy = *r;
    copy.audio_path = Relative(src.AudioPath(*r), base_dir);
    copy.split = split;
    out.records.push_back(std::move(copy));
  };
  for (const auto& id : partition.clean_ids) take(clean, id, Split::kTrain);
  for (const auto& id : partition.degraded_ids) take(degraded, id, Split::kTrain);
  for (const auto& id : partition.test_ids) take(clean, id, Split::kTest);
  out.Validate();
  return out;
}

Manifest FilterCorpus(const Manifest& noisy, const WaveFilter& filter,
                      const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir / "wav");
  Manifest out;
  out.base_dir = out_dir;
  for (const auto& rec : noisy.records) {
    if (!rec.snr_db) throw DataError("record " + rec.id + " is not a noisy record");
    dsp::Waveform w = filter(noisy.Load(rec));
    double peak = 0.0;
    for (double s : w.samples) peak = std::max(peak, std::abs(s));
    if (peak > 0.999)
      for (double& s : w.samples) s *= 0.999 / peak;
    UtteranceRecord r = rec;
    r.quality = Quality::kFiltered;
    r.audio_path = "wav/" + rec.id + ".wav";
    r.duration_s = w.duration_s();
    dsp::WriteWav(out_dir / r.audio_path, w);
    out.records.push_back(std::move(r));
  }
  WriteManifest(out_dir / "manifest.jsonl", out);
  return out;
}

}  // namespace bgmtts::corpus
