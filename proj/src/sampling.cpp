#include "hoalign/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "hoalign/error.hpp"

namespace hoalign {

NormalizedPoints normalize_points(std::span<const Vec3> points, double s) {
  if (!(s > 0.0)) fail(ErrorKind::kInvalidArgument, "normalization constant s must be positive");
  if (points.empty()) fail(ErrorKind::kDegenerateCloud, "no points to normalize");
  NormalizationParams params;
  params.s = s;
  params.mean = mean_point(points);
  double sq = 0.0;
  for (const Vec3& p : points) sq += (p - params.mean).squaredNorm();
  params.sigma = std::sqrt(sq / static_cast<double>(points.size()));
  if (!(params.sigma > 0.0)) fail(ErrorKind::kDegenerateCloud, "all points coincide");

  NormalizedPoints out;
  out.params = params;
  out.points.reserve(points.size());
  for (const Vec3& p : points) out.points.push_back(params.normalize(p));
  return out;
}

PointCloud sample_mesh_surface(const TriangleMesh& mesh, std::size_t n, std::uint64_t seed) {
  if (n == 0) fail(ErrorKind::kInvalidArgument, "sample count must be at least 1");
  std::vector<double> cumulative(mesh.faces().size());
  double total = 0.0;
  for (std::size_t f = 0; f < mesh.faces().size(); ++f) {
    total += mesh.face_area(f);
    cumulative[f] = total;
  }
  if (!(total > 0.0)) fail(ErrorKind::kZeroArea, "mesh has zero surface area");

  std::mt19937_64 rng(seed);
  std::vector<Vec3> points;
  points.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double pick = unit_uniform(rng) * total;
    // upper_bound never lands on a zero-area face: its cumulative value equals its predecessor's.
    auto it = std::upper_bound(cumulative.begin(), cumulative.end(), pick);
    if (it == cumulative.end()) --it;
    const auto face = static_cast<std::size_t>(it - cumulative.begin());
    const auto tri = mesh.triangle(face);
    const double r1 = std::sqrt(unit_uniform(rng));
    const double r2 = unit_uniform(rng);
    points.emplace_back((1.0 - r1) * tri[0] + r1 * (1.0 - r2) * tri[1] + r1 * r2 * tri[2]);
  }
  return PointCloud(std::move(points));
}

PointCloud resample_point_cloud(const PointCloud& cloud, std::size_t n, std::uint64_t seed) {
  if (cloud.empty()) fail(ErrorKind::kEmptyCloud, "cannot resample an empty cloud");
  const std::size_t m = cloud.size();
  std::mt19937_64 rng(seed);
  std::vector<std::size_t> picks;
  picks.reserve(n);
  if (n <= m) {
    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), std::size_t{0});
    // Partial Fisher-Yates: the first n slots become a uniform subset.
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t j = i + static_cast<std::size_t>(unit_uniform(rng) * static_cast<double>(m - i));
      std::swap(order[i], order[std::min(j, m - 1)]);
    }
    picks.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n));
  } else {
    picks.resize(m);
    std::iota(picks.begin(), picks.end(), std::size_t{0});
    for (std::size_t i = m; i < n; ++i) {
      picks.push_back(std::min(m - 1, static_cast<std::size_t>(unit_uniform(rng) * static_cast<double>(m))));
    }
  }

  std::vector<Vec3> pts, cols;
  std::vector<PointLabel> labs;
  pts.reserve(n);
  for (std::size_t idx : picks) {
    pts.push_back(cloud.points()[idx]);
    if (cloud.has_colors()) cols.push_back(cloud.colors()[idx]);
    if (cloud.has_labels()) labs.push_back(cloud.labels()[idx]);
  }
  return PointCloud(std::move(pts), std::move(cols), std::move(labs));
}

}  // namespace hoalign
