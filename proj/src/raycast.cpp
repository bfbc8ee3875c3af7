#include "hoalign/raycast.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hoalign/error.hpp"

namespace hoalign {

std::optional<RayHit> ray_triangle_intersect(const Vec3& origin, const Vec3& direction,
                                             const std::array<Vec3, 3>& triangle) {
  const Vec3 e1 = triangle[1] - triangle[0];
  const Vec3 e2 = triangle[2] - triangle[0];
  const Vec3 normal = e1.cross(e2);
  const double area2 = normal.norm();
  if (!(area2 > 0.0)) return std::nullopt;

  const Vec3 pvec = direction.cross(e2);
  const double det = e1.dot(pvec);
  // Ray parallel to the triangle plane (relative to the triangle and ray scales).
  if (std::abs(det) <= 1e-14 * area2 * direction.norm()) return std::nullopt;
  const double inv_det = 1.0 / det;

  const Vec3 tvec = origin - triangle[0];
  const double u = tvec.dot(pvec) * inv_det;
  if (u < 0.0 || u > 1.0) return std::nullopt;
  const Vec3 qvec = tvec.cross(e1);
  const double v = direction.dot(qvec) * inv_det;
  if (v < 0.0 || u + v > 1.0) return std::nullopt;
  const double t = e2.dot(qvec) * inv_det;
  if (!(t > 0.0)) return std::nullopt;

  return RayHit{t, {1.0 - u - v, u, v}};
}

HandPointMap::HandPointMap(int width, int height)
    : width_(width),
      height_(height),
      points_(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), Vec3::Zero()),
      hit_(points_.size(), 0) {}

double HandPointMap::hit_fraction() const {
  if (hit_.empty()) return 0.0;
  const auto hits = std::count(hit_.begin(), hit_.end(), std::uint8_t{1});
  return static_cast<double>(hits) / static_cast<double>(hit_.size());
}

std::vector<Vec3> HandPointMap::hit_points() const {
  std::vector<Vec3> out;
  for (std::size_t i = 0; i < hit_.size(); ++i) {
    if (hit_[i]) out.push_back(points_[i]);
  }
  return out;
}

namespace {

// Screen-space candidate lists: faces fully in front of the camera are binned into the pixel
// rows they can cover; faces touching z <= 0 are tested against every pixel.
struct FaceBins {
  std::vector<std::vector<std::uint32_t>> rows;
  std::vector<std::uint32_t> everywhere;
  std::vector<std::array<int, 2>> col_range;
};

FaceBins bin_faces(const TriangleMesh& mesh, const Camera& camera) {
  FaceBins bins;
  bins.rows.resize(static_cast<std::size_t>(camera.height));
  bins.col_range.resize(mesh.faces().size());
  for (std::size_t f = 0; f < mesh.faces().size(); ++f) {
    const auto tri = mesh.triangle(f);
    if (tri[0].z() <= 0.0 || tri[1].z() <= 0.0 || tri[2].z() <= 0.0) {
      if (tri[0].z() > 0.0 || tri[1].z() > 0.0 || tri[2].z() > 0.0) {
        bins.everywhere.push_back(static_cast<std::uint32_t>(f));
        bins.col_range[f] = {0, camera.width - 1};
      }
      continue;
    }
    double umin = std::numeric_limits<double>::infinity(), umax = -umin;
    double vmin = umin, vmax = -umin;
    for (const Vec3& p : tri) {
      const double u = camera.fx * p.x() / p.z() + camera.cx;
      const double v = camera.fy * p.y() / p.z() + camera.cy;
      umin = std::min(umin, u);
      umax = std::max(umax, u);
      vmin = std::min(vmin, v);
      vmax = std::max(vmax, v);
    }
    // Pixel centers sit at integer + 0.5; pad by one pixel against rounding.
    const int c0 = std::max(0, static_cast<int>(std::floor(umin - 0.5)) - 1);
    const int c1 = std::min(camera.width - 1, static_cast<int>(std::ceil(umax - 0.5)) + 1);
    const int r0 = std::max(0, static_cast<int>(std::floor(vmin - 0.5)) - 1);
    const int r1 = std::min(camera.height - 1, static_cast<int>(std::ceil(vmax - 0.5)) + 1);
    if (c0 > c1 || r0 > r1) continue;
    bins.col_range[f] = {c0, c1};
    for (int r = r0; r <= r1; ++r) bins.rows[static_cast<std::size_t>(r)].push_back(static_cast<std::uint32_t>(f));
  }
  return bins;
}

}  // namespace

HandPointMap sample_hand_points(const TriangleMesh& hand, const Camera& camera) {
  if (hand.empty()) fail(ErrorKind::kEmptyMesh, "hand mesh has no faces");
  camera.validate();

  const FaceBins bins = bin_faces(hand, camera);
  HandPointMap map(camera.width, camera.height);
  const Vec3 origin = Vec3::Zero();
  std::vector<std::uint32_t> candidates;

  for (int row = 0; row < camera.height; ++row) {
    const auto& row_faces = bins.rows[static_cast<std::size_t>(row)];
    candidates.clear();
    std::merge(row_faces.begin(), row_faces.end(), bins.everywhere.begin(), bins.everywhere.end(),
               std::back_inserter(candidates));
    for (int col = 0; col < camera.width; ++col) {
      const Vec3 dir = camera.pixel_ray(col, row);
      double best_t = std::numeric_limits<double>::infinity();
      std::optional<Vec3> best;
      for (std::uint32_t f : candidates) {
        const auto& range = bins.col_range[f];
        if (col < range[0] || col > range[1]) continue;
        const auto tri = hand.triangle(f);
        const auto hit = ray_triangle_intersect(origin, dir, tri);
        if (hit && hit->distance < best_t) {
          best_t = hit->distance;
          const auto& a = hit->barycentric;
          best = a[0] * tri[0] + a[1] * tri[1] + a[2] * tri[2];
        }
      }
      if (best) map.set_hit(col, row, *best);
    }
  }
  return map;
}

}  // namespace hoalign
