#pragma once

#include <array>
#include <optional>
#include <vector>

#include "hoalign/geometry.hpp"

namespace hoalign {

struct RayHit {
  double distance = 0.0;
  /// Weights of the triangle's three vertices; non-negative, summing to one.
  std::array<double, 3> barycentric{};
};

/// Double-sided Moller-Trumbore test. Returns nullopt on a miss, for hits at t <= 0 and for
/// degenerate (zero-area) triangles.
std::optional<RayHit> ray_triangle_intersect(const Vec3& origin, const Vec3& direction,
                                             const std::array<Vec3, 3>& triangle);

/// Per-pixel first intersection of camera rays with a hand mesh.
class HandPointMap {
 public:
  HandPointMap(int width, int height);

  int width() const { return width_; }
  int height() const { return height_; }

  bool is_hit(int col, int row) const { return hit_[index(col, row)] != 0; }
  /// Only meaningful where is_hit() is true.
  const Vec3& point(int col, int row) const { return points_[index(col, row)]; }
  void set_hit(int col, int row, const Vec3& p) {
    points_[index(col, row)] = p;
    hit_[index(col, row)] = 1;
  }

  double hit_fraction() const;
  /// Hit points in row-major pixel order.
  std::vector<Vec3> hit_points() const;

 private:
  std::size_t index(int col, int row) const {
    return static_cast<std::size_t>(row) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(col);
  }

  int width_;
  int height_;
  std::vector<Vec3> points_;
  std::vector<std::uint8_t> hit_;
};

/// Casts one ray per pixel center and records the nearest hit, interpolated barycentrically
/// from the hit triangle's vertices. Throws EmptyMesh for a mesh without faces.
HandPointMap sample_hand_points(const TriangleMesh& hand, const Camera& camera);

}  // namespace hoalign
