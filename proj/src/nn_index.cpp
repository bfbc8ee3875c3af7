#include "hoalign/nn_index.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include "hoalign/error.hpp"

namespace hoalign {

NearestNeighborIndex::NearestNeighborIndex(std::span<const Vec3> points) : points_(points.begin(), points.end()) {
  if (points_.size() >= std::numeric_limits<std::uint32_t>::max()) {
    fail(ErrorKind::kTooLarge, "too many points for the nearest-neighbor index");
  }
  order_.resize(points_.size());
  std::iota(order_.begin(), order_.end(), 0u);
  if (!points_.empty()) {
    nodes_.reserve(2 * points_.size() / kLeafSize + 1);
    build(0, static_cast<std::uint32_t>(points_.size()));
  }
}

std::int32_t NearestNeighborIndex::build(std::uint32_t begin, std::uint32_t end) {
  const auto id = static_cast<std::int32_t>(nodes_.size());
  nodes_.push_back(Node{begin, end});
  if (end - begin <= kLeafSize) return id;

  Vec3 lo = points_[order_[begin]], hi = lo;
  for (std::uint32_t i = begin; i < end; ++i) {
    lo = lo.cwiseMin(points_[order_[i]]);
    hi = hi.cwiseMax(points_[order_[i]]);
  }
  int axis = 0;
  (hi - lo).maxCoeff(&axis);
  if (hi[axis] == lo[axis]) return id;  // all points coincide

  const std::uint32_t mid = begin + (end - begin) / 2;
  std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                   [&](std::uint32_t a, std::uint32_t b) { return points_[a][axis] < points_[b][axis]; });
  const double split = points_[order_[mid]][axis];
  const std::int32_t left = build(begin, mid);
  const std::int32_t right = build(mid, end);
  Node& node = nodes_[static_cast<std::size_t>(id)];
  node.axis = axis;
  node.split = split;
  node.left = left;
  node.right = right;
  return id;
}

void NearestNeighborIndex::search(std::int32_t id, const Vec3& q, Neighbor& best) const {
  const Node& node = nodes_[static_cast<std::size_t>(id)];
  if (node.left < 0) {
    for (std::uint32_t i = node.begin; i < node.end; ++i) {
      const std::uint32_t idx = order_[i];
      const double d = (points_[idx] - q).squaredNorm();
      if (d < best.squared_distance || (d == best.squared_distance && idx < best.index)) {
        best = {idx, d};
      }
    }
    return;
  }
  // Left holds coordinates <= split, right holds coordinates >= split.
  const double diff = q[node.axis] - node.split;
  const std::int32_t near = diff <= 0.0 ? node.left : node.right;
  const std::int32_t far = diff <= 0.0 ? node.right : node.left;
  search(near, q, best);
  // Visit on equality so equally distant points with lower indices are still found.
  if (diff * diff <= best.squared_distance) search(far, q, best);
}

Neighbor NearestNeighborIndex::nearest(const Vec3& query) const {
  if (points_.empty()) fail(ErrorKind::kEmptyCloud, "nearest-neighbor query on an empty index");
  Neighbor best{std::numeric_limits<std::size_t>::max(), std::numeric_limits<double>::infinity()};
  search(0, query, best);
  return best;
}

}  // namespace hoalign
