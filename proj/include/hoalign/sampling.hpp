#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "hoalign/geometry.hpp"

namespace hoalign {

struct NormalizationParams {
  Vec3 mean = Vec3::Zero();
  /// Root-mean-square distance of the input points to `mean`.
  double sigma = 1.0;
  double s = 0.7;

  Vec3 normalize(const Vec3& p) const { return s * (p - mean) / sigma; }
  Vec3 denormalize(const Vec3& q) const { return q * sigma / s + mean; }
};

struct NormalizedPoints {
  std::vector<Vec3> points;
  NormalizationParams params;
};

/// Hand-normalized coordinates: s * (p - mean) / sigma. Throws DegenerateCloud when all points
/// coincide (sigma = 0) and InvalidArgument for s <= 0.
NormalizedPoints normalize_points(std::span<const Vec3> points, double s);

/// Area-weighted uniform surface samples. Throws ZeroArea for meshes without area.
PointCloud sample_mesh_surface(const TriangleMesh& mesh, std::size_t n, std::uint64_t seed);

/// Exactly n points: a uniform subset without replacement when n <= |cloud|, otherwise every
/// original point followed by uniform draws with replacement. Colors and labels travel along.
PointCloud resample_point_cloud(const PointCloud& cloud, std::size_t n, std::uint64_t seed);

}  // namespace hoalign
