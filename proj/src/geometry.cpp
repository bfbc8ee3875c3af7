#include "hoalign/geometry.hpp"

#include <cmath>
#include <string>

#include "hoalign/error.hpp"

namespace hoalign {

Quat canonicalize(const Quat& q) {
  Quat n = q.normalized();
  const std::array<double, 4> c = {n.w(), n.x(), n.y(), n.z()};
  for (double v : c) {
    if (v > 0.0) return n;
    if (v < 0.0) return Quat(-n.w(), -n.x(), -n.y(), -n.z());
  }
  return n;
}

Quat quat_wxyz(double w, double x, double y, double z) { return Quat(w, x, y, z).normalized(); }

std::array<double, 4> to_wxyz(const Quat& q) { return {q.w(), q.x(), q.y(), q.z()}; }

Quat random_rotation(std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (;;) {
    const double w = gauss(rng), x = gauss(rng), y = gauss(rng), z = gauss(rng);
    const double n = std::sqrt(w * w + x * x + y * y + z * z);
    if (n > 1e-12) return Quat(w / n, x / n, y / n, z / n);
  }
}

SimilarityTransform::SimilarityTransform(const Quat& rotation, const Vec3& translation, double scale)
    : rotation_(rotation.normalized()), translation_(translation), scale_(scale) {
  if (!(scale > 0.0) || !std::isfinite(scale)) {
    fail(ErrorKind::kInvalidArgument, "similarity scale must be positive, got " + std::to_string(scale));
  }
  if (!translation.allFinite()) fail(ErrorKind::kInvalidArgument, "non-finite translation");
}

SimilarityTransform::SimilarityTransform(const RigidPose& pose, double scale)
    : SimilarityTransform(pose.rotation, pose.translation, scale) {}

SimilarityTransform SimilarityTransform::inverse() const {
  const Quat inv_rot = rotation_.conjugate();
  const double inv_scale = 1.0 / scale_;
  return {inv_rot, -(inv_scale * (inv_rot * translation_)), inv_scale};
}

SimilarityTransform operator*(const SimilarityTransform& a, const SimilarityTransform& b) {
  return {a.rotation_ * b.rotation_, a.apply(b.translation_), a.scale_ * b.scale_};
}

TriangleMesh::TriangleMesh(std::vector<Vec3> vertices, std::vector<Face> faces)
    : vertices_(std::move(vertices)), faces_(std::move(faces)) {
  for (const Vec3& v : vertices_) {
    if (!v.allFinite()) fail(ErrorKind::kInvalidArgument, "mesh vertex is not finite");
  }
  for (std::size_t i = 0; i < faces_.size(); ++i) {
    const Face& f = faces_[i];
    for (std::uint32_t idx : f) {
      if (idx >= vertices_.size()) {
        fail(ErrorKind::kInvalidArgument, "face " + std::to_string(i) + " references vertex " +
                                              std::to_string(idx) + " of " + std::to_string(vertices_.size()));
      }
    }
    if (f[0] == f[1] && f[1] == f[2]) {
      fail(ErrorKind::kInvalidArgument, "face " + std::to_string(i) + " has three identical indices");
    }
  }
}

double TriangleMesh::face_area(std::size_t face) const {
  const auto t = triangle(face);
  return 0.5 * (t[1] - t[0]).cross(t[2] - t[0]).norm();
}

double TriangleMesh::total_area() const {
  double area = 0.0;
  for (std::size_t i = 0; i < faces_.size(); ++i) area += face_area(i);
  return area;
}

PointCloud::PointCloud(std::vector<Vec3> points, std::vector<Vec3> colors, std::vector<PointLabel> labels)
    : points_(std::move(points)), colors_(std::move(colors)), labels_(std::move(labels)) {
  if (!colors_.empty() && colors_.size() != points_.size()) {
    fail(ErrorKind::kSizeMismatch, "color count differs from point count");
  }
  if (!labels_.empty() && labels_.size() != points_.size()) {
    fail(ErrorKind::kSizeMismatch, "label count differs from point count");
  }
  for (const Vec3& p : points_) {
    if (!p.allFinite()) fail(ErrorKind::kInvalidArgument, "point coordinate is not finite");
  }
  for (const Vec3& c : colors_) {
    if ((c.array() < 0.0).any() || (c.array() > 1.0).any()) {
      fail(ErrorKind::kInvalidArgument, "color component outside [0, 1]");
    }
  }
  for (PointLabel l : labels_) {
    if (static_cast<std::uint8_t>(l) > 2) fail(ErrorKind::kInvalidArgument, "point label outside {0, 1, 2}");
  }
}

PointCloud PointCloud::select(PointLabel label) const {
  if (labels_.empty()) return *this;
  std::vector<Vec3> pts;
  std::vector<Vec3> cols;
  std::vector<PointLabel> labs;
  for (std::size_t i = 0; i < points_.size(); ++i) {
    if (labels_[i] != label) continue;
    pts.push_back(points_[i]);
    if (!colors_.empty()) cols.push_back(colors_[i]);
    labs.push_back(label);
  }
  return PointCloud(std::move(pts), std::move(cols), std::move(labs));
}

void Camera::validate() const {
  if (!(fx > 0.0) || !(fy > 0.0)) fail(ErrorKind::kInvalidArgument, "camera focal lengths must be positive");
  if (width <= 0 || height <= 0) fail(ErrorKind::kInvalidArgument, "camera image size must be positive");
  if (!std::isfinite(cx) || !std::isfinite(cy)) fail(ErrorKind::kInvalidArgument, "non-finite principal point");
}

Vec3 Camera::pixel_ray(int col, int row) const {
  const double u = col + 0.5;
  const double v = row + 0.5;
  return Vec3((u - cx) / fx, (v - cy) / fy, 1.0).normalized();
}

Vec3 mean_point(std::span<const Vec3> points) {
  Vec3 sum = Vec3::Zero();
  for (const Vec3& p : points) sum += p;
  return points.empty() ? sum : Vec3(sum / static_cast<double>(points.size()));
}

// Region-based closest point (Ericson, Real-Time Collision Detection 5.1.5).
Vec3 closest_point_on_triangle(const Vec3& p, const std::array<Vec3, 3>& tri) {
  const Vec3& a = tri[0];
  const Vec3& b = tri[1];
  const Vec3& c = tri[2];
  const Vec3 ab = b - a, ac = c - a, ap = p - a;
  const double d1 = ab.dot(ap), d2 = ac.dot(ap);
  if (d1 <= 0.0 && d2 <= 0.0) return a;
  const Vec3 bp = p - b;
  const double d3 = ab.dot(bp), d4 = ac.dot(bp);
  if (d3 >= 0.0 && d4 <= d3) return b;
  const double vc = d1 * d4 - d3 * d2;
  if (vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0) {
    const double denom = d1 - d3;
    return denom > 0.0 ? Vec3(a + (d1 / denom) * ab) : a;
  }
  const Vec3 cp = p - c;
  const double d5 = ab.dot(cp), d6 = ac.dot(cp);
  if (d6 >= 0.0 && d5 <= d6) return c;
  const double vb = d5 * d2 - d1 * d6;
  if (vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0) {
    const double denom = d2 - d6;
    return denom > 0.0 ? Vec3(a + (d2 / denom) * ac) : a;
  }
  const double va = d3 * d6 - d5 * d4;
  if (va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0) {
    const double denom = (d4 - d3) + (d5 - d6);
    return denom > 0.0 ? Vec3(b + ((d4 - d3) / denom) * (c - b)) : b;
  }
  const double sum = va + vb + vc;
  if (!(sum > 0.0)) return a;
  const double v = vb / sum;
  const double w = vc / sum;
  return a + ab * v + ac * w;
}

std::vector<Vec3> apply_pose(std::span<const Vec3> points, const SimilarityTransform& pose) {
  std::vector<Vec3> out;
  out.reserve(points.size());
  const Mat3 sr = pose.scale() * pose.rotation_matrix();
  for (const Vec3& p : points) out.emplace_back(sr * p + pose.translation());
  return out;
}

PointCloud apply_pose(const PointCloud& cloud, const SimilarityTransform& pose) {
  return PointCloud(apply_pose(cloud.points(), pose), cloud.colors(), cloud.labels());
}

TriangleMesh apply_pose(const TriangleMesh& mesh, const SimilarityTransform& pose) {
  return TriangleMesh(apply_pose(mesh.vertices(), pose), mesh.faces());
}

}  // namespace hoalign
