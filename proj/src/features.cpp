#include "hoalign/features.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hoalign/error.hpp"

namespace hoalign {

Eigen::Vector3d PCABasis::project(std::span<const float> feature) const {
  Eigen::Vector3d out = Eigen::Vector3d::Zero();
  for (Eigen::Index c = 0; c < mean.size(); ++c) {
    const double centered = feature[static_cast<std::size_t>(c)] - mean[c];
    out += components.col(c) * centered;
  }
  return out;
}

PCABasis pca_basis(std::span<const FeatureMap> maps) {
  if (maps.empty()) fail(ErrorKind::kInsufficientSamples, "no feature maps for the PCA basis");
  const int channels = maps.front().channels();
  if (channels < 3) fail(ErrorKind::kInsufficientSamples, "PCA basis needs at least 3 channels");
  for (const auto& m : maps) {
    if (m.channels() != channels) fail(ErrorKind::kInvalidArgument, "feature maps disagree on channel count");
  }

  const auto c = static_cast<Eigen::Index>(channels);
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(c);
  Eigen::MatrixXd outer = Eigen::MatrixXd::Zero(c, c);
  Eigen::VectorXd f(c);
  std::size_t n = 0;
  for (const auto& m : maps) {
    for (int row = 0; row < m.height(); ++row) {
      for (int col = 0; col < m.width(); ++col) {
        if (!m.mask().at(col, row)) continue;
        const auto feat = m.feature(col, row);
        for (Eigen::Index k = 0; k < c; ++k) f[k] = feat[static_cast<std::size_t>(k)];
        sum += f;
        outer.selfadjointView<Eigen::Lower>().rankUpdate(f);
        ++n;
      }
    }
  }
  if (n < 3) fail(ErrorKind::kInsufficientSamples, "PCA basis needs at least 3 masked-in pixels, got " + std::to_string(n));

  const double inv_n = 1.0 / static_cast<double>(n);
  PCABasis basis;
  basis.mean = sum * inv_n;
  Eigen::MatrixXd cov = outer.selfadjointView<Eigen::Lower>();
  cov = cov * inv_n - basis.mean * basis.mean.transpose();

  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
  if (eig.info() != Eigen::Success) fail(ErrorKind::kDegenerateGeometry, "PCA eigen decomposition failed");
  basis.components.resize(3, c);
  basis.total_variance = cov.trace();
  for (int k = 0; k < 3; ++k) {
    // Eigenvalues come in ascending order.
    const Eigen::Index src = c - 1 - k;
    Eigen::VectorXd v = eig.eigenvectors().col(src);
    Eigen::Index arg = 0;
    v.cwiseAbs().maxCoeff(&arg);
    if (v[arg] < 0.0) v = -v;
    basis.components.row(k) = v.transpose();
    basis.variances[k] = eig.eigenvalues()[src];
  }
  return basis;
}

double dino_similarity(const FeatureMap& rendered, const FeatureMap& image, const PCABasis& basis, double epsilon) {
  if (rendered.width() != image.width() || rendered.height() != image.height() ||
      rendered.channels() != image.channels()) {
    fail(ErrorKind::kSizeMismatch, "feature maps differ in shape");
  }
  if (static_cast<Eigen::Index>(image.channels()) != basis.mean.size()) {
    fail(ErrorKind::kSizeMismatch, "PCA basis channel count differs from the feature maps");
  }
  if (!(epsilon > 0.0)) fail(ErrorKind::kInvalidArgument, "epsilon must be positive");

  double dot = 0.0, norm_r = 0.0, norm_i = 0.0;
  std::size_t overlap = 0;
  for (int row = 0; row < image.height(); ++row) {
    for (int col = 0; col < image.width(); ++col) {
      if (!rendered.mask().at(col, row) || !image.mask().at(col, row)) continue;
      const Eigen::Vector3d a = basis.project(rendered.feature(col, row));
      const Eigen::Vector3d b = basis.project(image.feature(col, row));
      dot += a.dot(b);
      norm_r += a.squaredNorm();
      norm_i += b.squaredNorm();
      ++overlap;
    }
  }
  if (overlap == 0) fail(ErrorKind::kEmptyOverlap, "silhouettes do not overlap");
  const double cosine = dot / std::max(std::sqrt(norm_r) * std::sqrt(norm_i), epsilon);
  return std::clamp(1.0 - 0.5 * (cosine + 1.0), 0.0, 1.0);
}

}  // namespace hoalign
