// Copyright 2026 The bgmtts Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef BGMTTS_HARNESS_ANALYSIS_H_
#define BGMTTS_HARNESS_ANALYSIS_H_

#include <filesystem>
#include <string>
#include <vector>

#include "bgmtts/base/types.h"

namespace bgmtts::harness {

struct PcaResult {
  RealVector mean;                   // [d]
  RealMatrix components;             // [k x d], orthonormal rows
  RealVector explained_variance_ratio;  // [k]
  RealMatrix projected;              // [n x k]
};

// Eigendecomposition of the centred covariance. Each component's
// largest-magnitude coordinate is made positive. Throws DataError for fewer
// than three points and ArgumentError unless 1 <= k <= d.
PcaResult Pca(const RealMatrix& points, int k);

// Coordinates of `points` in the component basis.
RealMatrix Project(const PcaResult& pca, const RealMatrix& points);

// Mean silhouette coefficient with Euclidean distances. Points in singleton
// clusters score 0. Throws ArgumentError with fewer than two clusters.
double Silhouette(const RealMatrix& points, const std::vector<int>& labels);

// Columns utterance_id,label,e0..e{d-1},pc1..pc{k}. Explained-variance
// ratios go to `<path>.json`.
void WriteEmbeddingCsv(const std::filesystem::path& path, const std::vector<std::string>& ids,
                       const std::vector<std::string>& labels, const RealMatrix& embeddings,
                       const PcaResult& pca);

}  // namespace bgmtts::harness

#endif  // BGMTTS_HARNESS_ANALYSIS_H_
