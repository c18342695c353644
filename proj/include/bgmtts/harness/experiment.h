// Copyright 2026 The bgmtts Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef BGMTTS_HARNESS_EXPERIMENT_H_
#define BGMTTS_HARNESS_EXPERIMENT_H_

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "bgmtts/corpus/manifest.h"
#include "bgmtts/gsttts/train.h"
#include "bgmtts/harness/config.h"
#include "bgmtts/musicfilter/music_filter.h"

namespace bgmtts::harness {

enum class Variant { kTts, kGst, kGstAux, kGstMf, kGstMfAux };

std::string VariantName(Variant v);
Variant ParseVariant(const std::string& name);  // ArgumentError if unknown
bool UsesFilter(Variant v);
bool UsesAux(Variant v);

struct ExperimentSpec {
  Variant variant = Variant::kGstMfAux;
  double clean_ratio = 0.3;  // share of the training audio kept clean
  double lambda = 0.0;
  std::uint64_t seed = 1;
  std::filesystem::path filter_checkpoint;  // required by MF variants
  std::filesystem::path out_dir;            // optional: checkpoint and log
  double lr_scale = 1.0;

  // MF variants need a filter checkpoint; Aux variants need lambda > 0 and
  // the others lambda == 0.
  void Validate() const;
};

// Flags a run whose loss is non-finite or exceeds `factor` times its value
// at `reference_step`. A run whose loss at the reference step is still above
// its first-step loss never descended and is flagged as well, since a
// clamped, bounded loss cannot grow by `factor` once it has saturated.
class DivergenceMonitor {
 public:
  explicit DivergenceMonitor(DivergenceConfig config = {}) : config_(config) {}
  // Returns false once the run has diverged.
  bool Observe(int step, double loss);
  bool diverged() const { return diverged_; }
  const std::string& reason() const { return reason_; }

 private:
  DivergenceConfig config_;
  std::optional<double> first_;
  std::optional<double> reference_;
  bool diverged_ = false;
  std::string reason_;
};

// Generated corpora of one experiment.
struct ToyWorkspace {
  std::filesystem::path root;
  corpus::Manifest target_clean;
  corpus::Manifest target_noisy;
  corpus::Manifest universal_clean;
  corpus::Manifest universal_noisy;
  std::filesystem::path target_music_dir;
};

// Deterministic in config.seed; rebuilds everything under `root`.
ToyWorkspace BuildToyWorkspace(const std::filesystem::path& root, const PipelineConfig& config);

std::unique_ptr<musicfilter::MusicFilter> TrainToyFilter(const ToyWorkspace& ws,
                                                         const PipelineConfig& config,
                                                         const std::filesystem::path& checkpoint);

corpus::Manifest FilterManifest(const corpus::Manifest& noisy, const musicfilter::MusicFilter& filter,
                                const dsp::StftParams& stft, const std::filesystem::path& out_dir);

struct FilterGridPoint {
  double snr_db = 0.0;
  double si_snr_noisy = 0.0, si_snr_filtered = 0.0;
  double lsd_noisy = 0.0, lsd_filtered = 0.0;
  int count = 0;
};

// Held-out speech mixed with held-out music at each grid SNR.
std::vector<FilterGridPoint> EvaluateFilterGrid(const musicfilter::MusicFilter& filter,
                                                const dsp::StftParams& stft,
                                                const std::vector<dsp::Waveform>& speech,
                                                const std::filesystem::path& music_dir,
                                                const std::vector<double>& snrs_db,
                                                std::uint64_t seed);

// Inputs shared by every cell of a grid.
struct CellInputs {
  const corpus::Manifest* clean = nullptr;
  const corpus::Manifest* noisy = nullptr;
  const corpus::Manifest* filtered = nullptr;  // required by MF variants
  gsttts::TtsAssets assets;
};

enum class CellStatus { kOk, kDiverged, kFailed };
std::string CellStatusName(CellStatus s);

struct CellReport {
  ExperimentSpec spec;
  CellStatus status = CellStatus::kOk;
  std::string message;
  int steps_completed = 0;
  double aqc_accuracy = NAN;  // held-out
  double silhouette = NAN;    // held-out clean vs degraded embeddings
  gsttts::LossBundle final_losses;
  std::vector<std::pair<int, double>> loss_curve;  // (step, l_total)
  std::vector<std::string> test_ids;
};

nlohmann::json ToJson(const CellReport& r);

// Never throws for training failures: they are reported through status.
CellReport RunCell(const ExperimentSpec& spec, const CellInputs& inputs,
                   const PipelineConfig& config);

// Clean and degraded versions of the held-out utterances of a partition.
std::vector<gsttts::TtsExample> HeldOutExamples(const CellInputs& inputs, Variant variant,
                                                const std::vector<std::string>& test_ids);

struct EvalReport {
  std::vector<FilterGridPoint> filter_grid;
  std::uint64_t filter_seed = 0;
  std::vector<CellReport> cells;
};

nlohmann::json ToJson(const EvalReport& r);
nlohmann::json FilterGridJson(const std::vector<FilterGridPoint>& grid, std::uint64_t seed);
// Mapping from the proxy metrics to the quantities they stand in for.
nlohmann::json ProxyMetricsJson();

// Full toy study: corpora, filter, every variant x clean ratio.
EvalReport RunAblation(const std::filesystem::path& root, const PipelineConfig& config);

}  // namespace bgmtts::harness

#endif  // BGMTTS_HARNESS_EXPERIMENT_H_
