#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "hoalign/geometry.hpp"
#include "hoalign/nn_index.hpp"

namespace hoalign {

inline constexpr double kSquaredMetersToSquaredCm = 1e4;

/// Symmetric mean squared nearest-neighbor distance, in cm^2. Both sets must have the same,
/// non-zero size (SizeMismatch / EmptyCloud otherwise).
double chamfer_distance(std::span<const Vec3> a, std::span<const Vec3> b);
double chamfer_distance(const PointCloud& a, const PointCloud& b);

struct FScore {
  double precision = 0.0;
  double recall = 0.0;
  double f = 0.0;
};

/// Harmonic mean of precision and recall at a distance threshold in meters; distances equal to
/// the threshold count as inliers.
FScore f_score(std::span<const Vec3> pred, std::span<const Vec3> gt, double threshold);
FScore f_score(const PointCloud& pred, const PointCloud& gt, double threshold);

struct MetricReport {
  double chamfer_cm2 = 0.0;
  double f5 = 0.0;
  double f10 = 0.0;
  double precision_5mm = 0.0;
  double recall_5mm = 0.0;
  double precision_10mm = 0.0;
  double recall_10mm = 0.0;

  bool operator==(const MetricReport&) const = default;
};

/// Chamfer distance plus F-scores at 5 mm and 10 mm.
MetricReport evaluate_point_sets(std::span<const Vec3> pred, std::span<const Vec3> gt);

/// Component-wise median; even counts take the lower middle value. Throws EmptyList.
MetricReport median_metrics(std::span<const MetricReport> reports);

/// Least-squares similarity (Umeyama) mapping src[i] onto dst[i]. Throws DegenerateGeometry
/// when the cross-covariance has rank < 2.
SimilarityTransform fit_similarity(std::span<const Vec3> src, std::span<const Vec3> dst);

enum class Correspondence {
  kNearest,  // classic ICP: nearest target point each iteration
  kIndex,    // source[i] pairs with target[i]; for registration with known matches
};

struct IcpOptions {
  std::size_t max_iters = 100;
  double tol = 1e-6;  // meters of RMS improvement
  Correspondence correspondence = Correspondence::kNearest;
};

struct IcpResult {
  SimilarityTransform transform;  // maps the source onto the target
  std::size_t iterations = 0;
  /// RMS correspondence distance before the first fit and after every iteration.
  std::vector<double> rms_history;
};

/// ICP with scaling from an identity start.
IcpResult icp_with_scaling(std::span<const Vec3> source, std::span<const Vec3> target, const IcpOptions& options = {});

}  // namespace hoalign
