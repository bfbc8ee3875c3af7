#pragma once

#include <filesystem>

#include "hoalign/geometry.hpp"

namespace hoalign {

/// ASCII OBJ: `v x y z` and `f a b c ...` lines (1-based, `a/b/c` forms accepted, negative
/// indices relative to the end). Polygons are fan-triangulated. Other records are ignored.
TriangleMesh read_obj(const std::filesystem::path& path);
void write_obj(const std::filesystem::path& path, const TriangleMesh& mesh);

/// Binary little-endian PLY with vertex x/y/z and face vertex_indices.
TriangleMesh read_ply_mesh(const std::filesystem::path& path);
void write_ply_mesh(const std::filesystem::path& path, const TriangleMesh& mesh);

/// Binary little-endian PLY point cloud; optional uchar red/green/blue and uchar label.
PointCloud read_ply_cloud(const std::filesystem::path& path);
void write_ply_cloud(const std::filesystem::path& path, const PointCloud& cloud);

/// Dispatches on extension (.obj or .ply).
TriangleMesh read_mesh(const std::filesystem::path& path);

/// True when the PLY file declares a face element with at least one face.
bool ply_has_faces(const std::filesystem::path& path);

}  // namespace hoalign
