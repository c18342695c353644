// Copyright 2026 The bgmtts Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "bgmtts/harness/analysis.h"

#include <algorithm>
#include <fstream>
#include <limits>
#include <map>

#include <Eigen/Eigenvalues>
#include <nlohmann/json.hpp>

#include "bgmtts/base/error.h"

namespace bgmtts::harness {

PcaResult Pca(const RealMatrix& points, int k) {
  const Eigen::Index n = points.rows(), d = points.cols();
  if (n < 3) throw DataError("PCA needs at least three points");
  if (k < 1 || k > d) throw ArgumentError("PCA dimension must lie in [1, d]");
  PcaResult r;
  r.mean = points.colwise().mean().transpose();
  const RealMatrix centred = points.rowwise() - r.mean.transpose();
  const Eigen::MatrixXd cov = (centred.transpose() * centred) / static_cast<double>(n - 1);
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
  if (eig.info() != Eigen::Success) throw NumericalError("covariance eigendecomposition failed");
  // Eigen returns ascending eigenvalues.
  const Eigen::VectorXd values = eig.eigenvalues().cwiseMax(0.0);
  const double total = values.sum();
  r.components.resize(k, d);
  r.explained_variance_ratio.resize(k);
  for (int i = 0; i < k; ++i) {
    const Eigen::Index col = d - 1 - i;
    Eigen::VectorXd v = eig.eigenvectors().col(col);
    Eigen::Index largest = 0;
    v.cwiseAbs().maxCoeff(&largest);
    if (v(largest) < 0.0) v = -v;
    r.components.row(i) = v.transpose();
    r.explained_variance_ratio(i) = total > 0.0 ? values(col) / total : 0.0;
  }
  r.projected = Project(r, points);
  return r;
}

RealMatrix Project(const PcaResult& pca, const RealMatrix& points) {
  if (points.cols() != pca.mean.size()) throw ArgumentError("point dimension does not match PCA");
  return (points.rowwise() - pca.mean.transpose()) * pca.components.transpose();
}

double Silhouette(const RealMatrix& points, const std::vector<int>& labels) {
  const Eigen::Index n = points.rows();
  if (static_cast<Eigen::Index>(labels.size()) != n)
    throw ArgumentError("one label per point is required");
  std::map<int, int> sizes;
  for (int l : labels) ++sizes[l];
  if (sizes.size() < 2) throw ArgumentError("silhouette needs at least two clusters");

  double total = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    std::map<int, double> sum;
    for (Eigen::Index j = 0; j < n; ++j)
      if (j != i) sum[labels[j]] += (points.row(i) - points.row(j)).norm();
    const int own = labels[i];
    if (sizes[own] == 1) continue;
    const double a = sum[own] / (sizes[own] - 1);
    double b = std::numeric_limits<double>::infinity();
    for (const auto& [label, count] : sizes)
      if (label != own) b = std::min(b, sum[label] / count);
    const double denom = std::max(a, b);
    total += denom > 0.0 ? (b - a) / denom : 0.0;
  }
  return total / static_cast<double>(n);
}

void WriteEmbeddingCsv(const std::filesystem::path& path, const std::vector<std::string>& ids,
                       const std::vector<std::string>& labels, const RealMatrix& embeddings,
                       const PcaResult& pca) {
  const Eigen::Index n = embeddings.rows();
  if (static_cast<Eigen::Index>(ids.size()) != n || static_cast<Eigen::Index>(labels.size()) != n ||
      pca.projected.rows() != n)
    throw ArgumentError("ids, labels, embeddings and projections must align");
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  out.precision(17);
  out << "utterance_id,label";
  for (Eigen::Index c = 0; c < embeddings.cols(); ++c) out << ",e" << c;
  for (Eigen::Index c = 0; c < pca.projected.cols(); ++c) out << ",pc" << c + 1;
  out << '\n';
  for (Eigen::Index i = 0; i < n; ++i) {
    out << ids[i] << ',' << labels[i];
    for (Eigen::Index c = 0; c < embeddings.cols(); ++c) out << ',' << embeddings(i, c);
    for (Eigen::Index c = 0; c < pca.projected.cols(); ++c) out << ',' << pca.projected(i, c);
    out << '\n';
  }
  nlohmann::json meta = {{"explained_variance_ratio", std::vector<double>(
                              pca.explained_variance_ratio.data(),
                              pca.explained_variance_ratio.data() + pca.explained_variance_ratio.size())},
                         {"count", n}};
  std::ofstream(path.string() + ".json") << meta.dump(2) << '\n';
}

}  // namespace bgmtts::harness
