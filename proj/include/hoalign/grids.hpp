#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "hoalign/geometry.hpp"

namespace hoalign {

/// Discretization of SO(3) from the boundary of the 4-cube [-1, 1]^4: every cubic facet
/// carries a (2^level + 1)^3 vertex lattice whose points are projected onto the unit 3-sphere.
/// Antipodal quaternions are identified.
class RotationGrid {
 public:
  RotationGrid(int level, std::vector<Quat> rotations) : level_(level), rotations_(std::move(rotations)) {}

  int level() const { return level_; }
  std::size_t size() const { return rotations_.size(); }
  const std::vector<Quat>& rotations() const { return rotations_; }
  const Quat& operator[](std::size_t i) const { return rotations_[i]; }

  /// Index of the grid rotation geodesically closest to `q` (lowest index on ties).
  std::size_t nearest(const Quat& q) const;

 private:
  int level_;
  std::vector<Quat> rotations_;
};

RotationGrid build_rotation_grid(int level);

/// Monte-Carlo estimate of the covering radius: max over `samples` Haar-random rotations of the
/// geodesic angle to the nearest grid entry.
double estimate_covering_radius(const RotationGrid& grid, std::size_t samples, std::uint64_t seed);

/// Regular lattice of positions centered at `center`, spanning [center - h, center + h] per axis.
class TranslationGrid {
 public:
  TranslationGrid(Vec3 center, Vec3 half_extent, std::array<int, 3> counts, std::vector<Vec3> offsets)
      : center_(center), half_extent_(half_extent), counts_(counts), offsets_(std::move(offsets)) {}

  const Vec3& center() const { return center_; }
  const Vec3& half_extent() const { return half_extent_; }
  const std::array<int, 3>& counts() const { return counts_; }
  std::size_t size() const { return offsets_.size(); }
  /// Absolute positions, x-major ordering: index = (ix * ny + iy) * nz + iz.
  const std::vector<Vec3>& offsets() const { return offsets_; }
  const Vec3& operator[](std::size_t i) const { return offsets_[i]; }

  /// Index of the lattice point nearest the center (the center itself when all counts are odd).
  std::size_t center_index() const;

 private:
  Vec3 center_;
  Vec3 half_extent_;
  std::array<int, 3> counts_;
  std::vector<Vec3> offsets_;
};

TranslationGrid build_translation_grid(const Vec3& center, const Vec3& half_extent, std::array<int, 3> counts);

/// Geodesic angle arccos((trace(Ri^T Rj) - 1) / 2) in [0, pi], evaluated in atan2 form.
double rodrigues_error(const Mat3& ri, const Mat3& rj);
double rodrigues_error(const Quat& qi, const Quat& qj);

/// 2 * arccos(|<qi, qj>|), evaluated in atan2 form; same quantity as rodrigues_error.
double quaternion_angle(const Quat& qi, const Quat& qj);

}  // namespace hoalign
