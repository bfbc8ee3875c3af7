#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace hoalign {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Quat = Eigen::Quaterniond;

/// Normalized copy of `q` with its first nonzero component (w, x, y, z order) positive.
/// q and -q describe the same rotation; this picks one representative.
Quat canonicalize(const Quat& q);

/// Builds a unit quaternion from (w, x, y, z) components, normalizing them.
Quat quat_wxyz(double w, double x, double y, double z);

std::array<double, 4> to_wxyz(const Quat& q);

/// Uniformly distributed rotation (Haar measure on SO(3)).
Quat random_rotation(std::mt19937_64& rng);

/// Uniform double in [0, 1) built from the top 53 bits of one draw.
inline double unit_uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

struct RigidPose {
  Quat rotation = Quat::Identity();
  Vec3 translation = Vec3::Zero();
};

/// p -> scale * R * p + t
class SimilarityTransform {
 public:
  SimilarityTransform() = default;
  SimilarityTransform(const Quat& rotation, const Vec3& translation, double scale = 1.0);
  SimilarityTransform(const RigidPose& pose, double scale);

  static SimilarityTransform identity() { return {}; }

  const Quat& rotation() const { return rotation_; }
  const Vec3& translation() const { return translation_; }
  double scale() const { return scale_; }
  Mat3 rotation_matrix() const { return rotation_.toRotationMatrix(); }

  Vec3 apply(const Vec3& p) const { return scale_ * (rotation_ * p) + translation_; }
  SimilarityTransform inverse() const;

  /// (a * b).apply(p) == a.apply(b.apply(p))
  friend SimilarityTransform operator*(const SimilarityTransform& a, const SimilarityTransform& b);

 private:
  Quat rotation_ = Quat::Identity();
  Vec3 translation_ = Vec3::Zero();
  double scale_ = 1.0;
};

using Face = std::array<std::uint32_t, 3>;

class TriangleMesh {
 public:
  TriangleMesh() = default;
  /// Throws InvalidArgument on out-of-range or fully degenerate faces, or non-finite vertices.
  TriangleMesh(std::vector<Vec3> vertices, std::vector<Face> faces);

  const std::vector<Vec3>& vertices() const { return vertices_; }
  const std::vector<Face>& faces() const { return faces_; }
  bool empty() const { return faces_.empty(); }

  std::array<Vec3, 3> triangle(std::size_t face) const {
    const Face& f = faces_[face];
    return {vertices_[f[0]], vertices_[f[1]], vertices_[f[2]]};
  }
  double face_area(std::size_t face) const;
  double total_area() const;

 private:
  std::vector<Vec3> vertices_;
  std::vector<Face> faces_;
};

enum class PointLabel : std::uint8_t { kBackground = 0, kHand = 1, kObject = 2 };

class PointCloud {
 public:
  PointCloud() = default;
  /// `colors` and `labels` are either empty or sized like `points`.
  explicit PointCloud(std::vector<Vec3> points, std::vector<Vec3> colors = {},
                      std::vector<PointLabel> labels = {});

  std::size_t size() const { return points_.size(); }
  bool empty() const { return points_.empty(); }
  const std::vector<Vec3>& points() const { return points_; }
  const std::vector<Vec3>& colors() const { return colors_; }
  const std::vector<PointLabel>& labels() const { return labels_; }
  bool has_colors() const { return !colors_.empty(); }
  bool has_labels() const { return !labels_.empty(); }

  /// Points carrying `label`; an unlabeled cloud is returned whole.
  PointCloud select(PointLabel label) const;

 private:
  std::vector<Vec3> points_;
  std::vector<Vec3> colors_;
  std::vector<PointLabel> labels_;
};

/// Pinhole camera looking down +z. Pixel (col, row) has its center at (col + 0.5, row + 0.5).
struct Camera {
  double fx = 1.0;
  double fy = 1.0;
  double cx = 0.0;
  double cy = 0.0;
  int width = 1;
  int height = 1;

  void validate() const;
  /// Unit direction of the ray through the center of pixel (col, row).
  Vec3 pixel_ray(int col, int row) const;
};

Vec3 mean_point(std::span<const Vec3> points);

/// Closest point of triangle `tri` to `p`.
Vec3 closest_point_on_triangle(const Vec3& p, const std::array<Vec3, 3>& tri);

std::vector<Vec3> apply_pose(std::span<const Vec3> points, const SimilarityTransform& pose);
PointCloud apply_pose(const PointCloud& cloud, const SimilarityTransform& pose);
TriangleMesh apply_pose(const TriangleMesh& mesh, const SimilarityTransform& pose);

}  // namespace hoalign
