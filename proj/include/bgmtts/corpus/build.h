// Copyright 2026 The bgmtts Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef BGMTTS_CORPUS_BUILD_H_
#define BGMTTS_CORPUS_BUILD_H_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "bgmtts/corpus/manifest.h"
#include "bgmtts/dsp/waveform.h"

namespace bgmtts::corpus {

// Mixes every clean record with a seeded random music file at an SNR drawn
// uniformly from [snr_lo, snr_hi]. Writes <out_dir>/wav/<id>.wav and
// <out_dir>/manifest.jsonl. Records keep id, transcript and split; snr_db
// is the SNR realized by the mix. A mixture that would clip is scaled as a
// whole, which leaves the speech-to-music ratio unchanged.
Manifest BuildMixedCorpus(const Manifest& clean, const std::filesystem::path& music_dir,
                          double snr_lo, double snr_hi, std::uint64_t seed,
                          const std::filesystem::path& out_dir);

// Which utterances are used clean, which degraded and which are held out.
struct CleanPartition {
  std::vector<std::string> clean_ids;
  std::vector<std::string> degraded_ids;
  std::vector<std::string> test_ids;
  double clean_seconds = 0.0;
  double degraded_seconds = 0.0;
  double test_seconds = 0.0;
};

// Shuffles the manifest by seed, takes `total_hours` of it, holds out
// `test_fraction` of the utterances and marks clean a share
// clean_hours / total_hours of the remaining duration (overshooting by at
// most one utterance). Requires 0 < clean_hours < total_hours.
CleanPartition PartitionByCleanHours(const Manifest& manifest, double clean_hours,
                                     double total_hours, std::uint64_t seed,
                                     double test_fraction = 0.01);

// Training manifest for one cell: clean ids from `clean`, degraded ids from
// `degraded` (noisy or filtered), test ids from `clean` with split TEST.
// Audio paths are rewritten relative to base_dir.
Manifest MergeQualityStreams(const CleanPartition& partition, const Manifest& clean,
                             const Manifest& degraded, const std::filesystem::path& base_dir);

using WaveFilter = std::function<dsp::Waveform(const dsp::Waveform&)>;

// Runs `filter` over every record; outputs are FILTERED and keep the
// noisy input's id, transcript, split and snr_db.
Manifest FilterCorpus(const Manifest& noisy, const WaveFilter& filter,
                      const std::filesystem::path& out_dir);

}  // namespace bgmtts::corpus

#endif  // BGMTTS_CORPUS_BUILD_H_
