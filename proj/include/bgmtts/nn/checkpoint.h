// Copyright 2026 The bgmtts Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef BGMTTS_NN_CHECKPOINT_H_
#define BGMTTS_NN_CHECKPOINT_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "bgmtts/nn/optim.h"
#include "bgmtts/nn/parameters.h"

namespace bgmtts::nn {

// Single-file container shared by every model:
//   8 bytes  magic "BGMTTSCK"
//   8 bytes  little-endian header length
//   header   UTF-8 JSON {format_version, kind, config, step, tensors, ...}
//   payload  float64 little-endian tensors, in header order
inline constexpr int kCheckpointFormatVersion = 1;

struct CheckpointData {
  nlohmann::json header;
  std::vector<std::pair<std::string, Mat>> tensors;

  const Mat* Find(const std::string& name) const;
};

void WriteCheckpoint(const std::filesystem::path& path, const CheckpointData& data);
// Throws DataError on a missing file, bad magic or unsupported version.
CheckpointData ReadCheckpoint(const std::filesystem::path& path);

// Builds a container holding parameters, buffers and (optionally) Adam
// moments. `header` supplies kind, config and any extra fields.
CheckpointData PackModel(nlohmann::json header, const ParameterSet& params,
                         Adam* optimizer);

// Restores parameter and buffer values, checking names and shapes, and the
// optimizer state when present in both.
void UnpackModel(const CheckpointData& data, ParameterSet& params, Adam* optimizer);

// Throws DataError unless header["kind"] == kind and header["config"] ==
// config.
void CheckHeader(const CheckpointData& data, const std::string& kind,
                 const nlohmann::json& config);

}  // namespace bgmtts::nn

#endif  // BGMTTS_NN_CHECKPOINT_H_
