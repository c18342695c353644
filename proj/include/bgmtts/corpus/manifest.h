// Copyright 2026 The bgmtts Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef BGMTTS_CORPUS_MANIFEST_H_
#define BGMTTS_CORPUS_MANIFEST_H_

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "bgmtts/dsp/waveform.h"

namespace bgmtts::corpus {

enum class Quality { kClean, kNoisy, kFiltered };
enum class Split { kTrain, kTest };

const char* QualityName(Quality q);  // "clean" | "noisy" | "filtered"
Quality ParseQuality(const std::string& name);
const char* SplitName(Split s);  // "train" | "test"
Split ParseSplit(const std::string& name);

// Invariants: snr_db is set iff quality != kClean; duration_s > 0.
struct UtteranceRecord {
  std::string id;
  std::string audio_path;  // relative to the manifest directory
  std::string transcript;
  Quality quality = Quality::kClean;
  std::optional<double> snr_db;
  double duration_s = 0.0;
  Split split = Split::kTrain;

  bool operator==(const UtteranceRecord&) const = default;
};

// One JSON object per line with exactly the record fields.
std::string ToJsonLine(const UtteranceRecord& r);
UtteranceRecord ParseJsonLine(const std::string& line);

struct Manifest {
  std::vector<UtteranceRecord> records;
  std::filesystem::path base_dir;  // audio paths resolve against this

  std::filesystem::path AudioPath(const UtteranceRecord& r) const {
    return base_dir / r.audio_path;
  }
  dsp::Waveform Load(const UtteranceRecord& r) const;
  const UtteranceRecord* Find(const std::string& id) const;
  double TotalSeconds() const;
  std::vector<UtteranceRecord> Select(Split split) const;
  // Throws DataError on duplicate ids or a broken record invariant.
  void Validate() const;
};

// Reads a JSON Lines manifest; base_dir becomes the file's directory.
Manifest ReadManifest(const std::filesystem::path& path);
// Writes the records; base_dir must be the target directory so that the
// relative paths stay valid.
void WriteManifest(const std::filesystem::path& path, const Manifest& m);

}  // namespace bgmtts::corpus

#endif  // BGMTTS_CORPUS_MANIFEST_H_
