#include "hoalign/raster.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace hoalign {

BinaryMask Fragments::silhouette() const {
  std::vector<std::uint8_t> data(face.size());
  for (std::size_t i = 0; i < face.size(); ++i) data[i] = face[i] >= 0 ? 1 : 0;
  return BinaryMask(width, height, std::move(data));
}

namespace {

// Linear function of the pixel center: e . ((u - cx) / fx, (v - cy) / fy, 1).
struct EdgeFunction {
  double a, b, c;
  double operator()(double u, double v) const { return a * u + b * v + c; }
};

EdgeFunction make_edge(const Vec3& e, const Camera& cam) {
  return {e.x() / cam.fx, e.y() / cam.fy, e.z() - e.x() * cam.cx / cam.fx - e.y() * cam.cy / cam.fy};
}

}  // namespace

Fragments rasterize(const TriangleMesh& mesh, const Camera& camera) {
  camera.validate();
  Fragments frag;
  frag.width = camera.width;
  frag.height = camera.height;
  const std::size_t pixels = static_cast<std::size_t>(camera.width) * static_cast<std::size_t>(camera.height);
  frag.face.assign(pixels, -1);
  frag.depth.assign(pixels, std::numeric_limits<double>::infinity());

  for (std::size_t f = 0; f < mesh.faces().size(); ++f) {
    const auto p = mesh.triangle(f);
    if (p[0].z() <= 0.0 && p[1].z() <= 0.0 && p[2].z() <= 0.0) continue;
    // det(p0, p1, p2) is zero when the triangle plane passes through the camera center.
    const double det = p[0].dot(p[1].cross(p[2]));
    if (det == 0.0 || !((p[1] - p[0]).cross(p[2] - p[0]).squaredNorm() > 0.0)) continue;
    const double sign = det > 0.0 ? 1.0 : -1.0;
    // Edge k is opposite vertex k; its value is proportional to that vertex's barycentric weight.
    const EdgeFunction e0 = make_edge(p[1].cross(p[2]), camera);
    const EdgeFunction e1 = make_edge(p[2].cross(p[0]), camera);
    const EdgeFunction e2 = make_edge(p[0].cross(p[1]), camera);

    int c0 = 0, c1 = camera.width - 1, r0 = 0, r1 = camera.height - 1;
    if (p[0].z() > 0.0 && p[1].z() > 0.0 && p[2].z() > 0.0) {
      double umin = std::numeric_limits<double>::infinity(), umax = -umin, vmin = umin, vmax = -umin;
      for (const Vec3& q : p) {
        const double u = camera.fx * q.x() / q.z() + camera.cx;
        const double v = camera.fy * q.y() / q.z() + camera.cy;
        umin = std::min(umin, u);
        umax = std::max(umax, u);
        vmin = std::min(vmin, v);
        vmax = std::max(vmax, v);
      }
      c0 = std::max(c0, static_cast<int>(std::floor(umin - 0.5)) - 1);
      c1 = std::min(c1, static_cast<int>(std::ceil(umax - 0.5)) + 1);
      r0 = std::max(r0, static_cast<int>(std::floor(vmin - 0.5)) - 1);
      r1 = std::min(r1, static_cast<int>(std::ceil(vmax - 0.5)) + 1);
    }

    for (int row = r0; row <= r1; ++row) {
      const double v = row + 0.5;
      for (int col = c0; col <= c1; ++col) {
        const double u = col + 0.5;
        const double w0 = sign * e0(u, v), w1 = sign * e1(u, v), w2 = sign * e2(u, v);
        if (w0 < 0.0 || w1 < 0.0 || w2 < 0.0) continue;
        const double sum = w0 + w1 + w2;
        if (!(sum > 0.0)) continue;
        // Ray parameter for the unnormalized direction (z component 1) is the depth itself.
        const double z = std::abs(det) / sum;
        const std::size_t idx = frag.index(col, row);
        if (z < frag.depth[idx]) {
          frag.depth[idx] = z;
          frag.face[idx] = static_cast<std::int32_t>(f);
        }
      }
    }
  }
  return frag;
}

BinaryMask rasterize_silhouette(const TriangleMesh& mesh, const SimilarityTransform& pose, const Camera& camera) {
  return rasterize(apply_pose(mesh, pose), camera).silhouette();
}

}  // namespace hoalign
