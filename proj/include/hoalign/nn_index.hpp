#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "hoalign/geometry.hpp"

namespace hoalign {

struct Neighbor {
  std::size_t index = 0;
  double squared_distance = 0.0;
};

/// Exact nearest-neighbor k-d tree over a fixed point set. Ties are broken toward the lowest
/// point index, so results equal a linear scan exactly.
class NearestNeighborIndex {
 public:
  explicit NearestNeighborIndex(std::span<const Vec3> points);

  std::size_t size() const { return points_.size(); }
  const std::vector<Vec3>& points() const { return points_; }

  /// Requires a non-empty index.
  Neighbor nearest(const Vec3& query) const;

 private:
  struct Node {
    std::uint32_t begin = 0;  // range into order_
    std::uint32_t end = 0;
    std::int32_t left = -1;
    std::int32_t right = -1;
    int axis = 0;
    double split = 0.0;
  };

  static constexpr std::uint32_t kLeafSize = 8;

  std::int32_t build(std::uint32_t begin, std::uint32_t end);
  void search(std::int32_t node, const Vec3& q, Neighbor& best) const;

  std::vector<Vec3> points_;
  std::vector<std::uint32_t> order_;
  std::vector<Node> nodes_;
};

}  // namespace hoalign
