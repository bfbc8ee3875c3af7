#pragma once

#include <cstdint>
#include <vector>

#include "hoalign/geometry.hpp"
#include "hoalign/image.hpp"

namespace hoalign {

/// Per-pixel visible surface of a camera-space mesh.
struct Fragments {
  int width = 0;
  int height = 0;
  std::vector<std::int32_t> face;  // -1 where nothing is visible
  std::vector<double> depth;       // camera-space z of the visible surface

  bool covered(int col, int row) const { return face[index(col, row)] >= 0; }
  double depth_at(int col, int row) const { return depth[index(col, row)]; }
  std::size_t index(int col, int row) const {
    return static_cast<std::size_t>(row) * static_cast<std::size_t>(width) + static_cast<std::size_t>(col);
  }
  BinaryMask silhouette() const;
};

/// Depth-buffered coverage test at pixel centers. Triangles are double-sided and may straddle
/// the camera plane; only surface in front of the camera (z > 0) is drawn.
Fragments rasterize(const TriangleMesh& camera_space_mesh, const Camera& camera);

BinaryMask rasterize_silhouette(const TriangleMesh& mesh, const SimilarityTransform& pose, const Camera& camera);

}  // namespace hoalign
