// Shared helpers and independent reference implementations for the test suites. The oracles
// here deliberately use the most direct formulation available (linear scans, dense linear
// solves, exhaustive enumeration) and share no code with the library algorithms they check.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hoalign/emission_table.hpp"
#include "hoalign/geometry.hpp"

namespace testsupport {

using hoalign::Camera;
using hoalign::Face;
using hoalign::Quat;
using hoalign::TriangleMesh;
using hoalign::Vec3;

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline Vec3 random_vec(std::mt19937_64& rng, double lo, double hi) {
  return Vec3(uniform(rng, lo, hi), uniform(rng, lo, hi), uniform(rng, lo, hi));
}

inline std::vector<Vec3> random_points(std::mt19937_64& rng, std::size_t n, double lo, double hi) {
  std::vector<Vec3> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(random_vec(rng, lo, hi));
  return out;
}

inline Quat random_quat(std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  const double w = g(rng), x = g(rng), y = g(rng), z = g(rng);
  return Quat(w, x, y, z).normalized();
}

inline Quat rotation_z(double angle) { return Quat(Eigen::AngleAxisd(angle, Vec3::UnitZ())); }

/// Triangle soup of `faces` triangles with vertices in [lo, hi]^2 x [zlo, zhi].
inline TriangleMesh random_soup(std::mt19937_64& rng, std::size_t faces, double lo, double hi, double zlo, double zhi,
                                double max_edge) {
  std::vector<Vec3> vertices;
  std::vector<Face> tris;
  for (std::size_t f = 0; f < faces; ++f) {
    const Vec3 c(uniform(rng, lo, hi), uniform(rng, lo, hi), uniform(rng, zlo, zhi));
    const auto base = static_cast<std::uint32_t>(vertices.size());
    for (int k = 0; k < 3; ++k) vertices.push_back(c + random_vec(rng, -max_edge, max_edge));
    tris.push_back({base, base + 1, base + 2});
  }
  return TriangleMesh(std::move(vertices), std::move(tris));
}

/// Axis-aligned square [x0, x0 + size] x [y0, y0 + size] at depth z, as two triangles.
inline TriangleMesh square(double x0, double y0, double size, double z) {
  return TriangleMesh({Vec3(x0, y0, z), Vec3(x0 + size, y0, z), Vec3(x0 + size, y0 + size, z), Vec3(x0, y0 + size, z)},
                      {Face{0, 1, 2}, Face{0, 2, 3}});
}

/// Closed unit cube [0,1]^3 with 12 triangles; faces 2k and 2k+1 make up cube side k.
inline TriangleMesh unit_cube() {
  std::vector<Vec3> v;
  for (int i = 0; i < 8; ++i) v.emplace_back(i & 1, (i >> 1) & 1, (i >> 2) & 1);
  const std::vector<Face> f = {{0, 2, 1}, {1, 2, 3}, {4, 5, 6}, {5, 7, 6}, {0, 1, 4}, {1, 5, 4},
                               {2, 6, 3}, {3, 6, 7}, {0, 4, 2}, {2, 4, 6}, {1, 3, 5}, {3, 7, 5}};
  return TriangleMesh(std::move(v), f);
}

// --- geometry oracles -------------------------------------------------------------------------

/// Ray/triangle hit by solving [e1 e2 -d] (u v t)^T = o - v0 with a dense LU solve.
struct OracleHit {
  bool hit = false;
  double t = 0.0;
  Vec3 point = Vec3::Zero();
};

inline OracleHit oracle_ray_triangle(const Vec3& o, const Vec3& d, const Vec3& a, const Vec3& b, const Vec3& c) {
  Eigen::Matrix3d m;
  m.col(0) = b - a;
  m.col(1) = c - a;
  m.col(2) = -d;
  if (std::abs(m.determinant()) < 1e-300) return {};
  const Vec3 x = m.fullPivLu().solve(o - a);
  const double u = x[0], v = x[1], t = x[2];
  if (u < 0 || v < 0 || u + v > 1 || t <= 0) return {};
  return {true, t, a + u * (b - a) + v * (c - a)};
}

/// Per-pixel nearest hit over every triangle (no acceleration). Misses carry hit = false.
inline std::vector<OracleHit> oracle_cast(const TriangleMesh& mesh, const Camera& cam) {
  std::vector<OracleHit> out(static_cast<std::size_t>(cam.width * cam.height));
  for (int row = 0; row < cam.height; ++row) {
    for (int col = 0; col < cam.width; ++col) {
      Vec3 d((col + 0.5 - cam.cx) / cam.fx, (row + 0.5 - cam.cy) / cam.fy, 1.0);
      d.normalize();
      OracleHit best;
      for (std::size_t f = 0; f < mesh.faces().size(); ++f) {
        const auto tri = mesh.triangle(f);
        const OracleHit h = oracle_ray_triangle(Vec3::Zero(), d, tri[0], tri[1], tri[2]);
        if (h.hit && (!best.hit || h.t < best.t)) best = h;
      }
      out[static_cast<std::size_t>(row * cam.width + col)] = best;
    }
  }
  return out;
}

inline double segment_distance(const Vec3& p, const Vec3& a, const Vec3& b) {
  const Vec3 ab = b - a;
  const double len2 = ab.squaredNorm();
  const double u = len2 > 0 ? std::clamp((p - a).dot(ab) / len2, 0.0, 1.0) : 0.0;
  return (p - (a + u * ab)).norm();
}

/// Distance from p to a triangle: plane distance when the projection falls inside (tested with
/// a least-squares barycentric solve), otherwise the nearest edge.
inline double point_triangle_distance(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c) {
  Eigen::Matrix<double, 3, 2> m;
  m.col(0) = b - a;
  m.col(1) = c - a;
  const Eigen::Vector2d uv = m.colPivHouseholderQr().solve(p - a);
  if (uv[0] >= 0 && uv[1] >= 0 && uv[0] + uv[1] <= 1) return (p - (a + m * uv)).norm();
  return std::min({segment_distance(p, a, b), segment_distance(p, b, c), segment_distance(p, c, a)});
}

inline double point_mesh_distance(const Vec3& p, const TriangleMesh& mesh) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t f = 0; f < mesh.faces().size(); ++f) {
    const auto t = mesh.triangle(f);
    best = std::min(best, point_triangle_distance(p, t[0], t[1], t[2]));
  }
  return best;
}

// --- metric oracles ---------------------------------------------------------------------------

inline std::size_t linear_nearest(const std::vector<Vec3>& pts, const Vec3& q) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < pts.size(); ++i) {
    if ((pts[i] - q).squaredNorm() < (pts[best] - q).squaredNorm()) best = i;
  }
  return best;
}

inline double min_sq(const std::vector<Vec3>& pts, const Vec3& q) {
  double best = std::numeric_limits<double>::infinity();
  for (const Vec3& p : pts) best = std::min(best, (p - q).squaredNorm());
  return best;
}

/// O(N^2) chamfer distance in cm^2.
inline double oracle_chamfer(const std::vector<Vec3>& a, const std::vector<Vec3>& b) {
  double sa = 0.0, sb = 0.0;
  for (const Vec3& p : a) sa += min_sq(b, p);
  for (const Vec3& p : b) sb += min_sq(a, p);
  return 1e4 * (sa / static_cast<double>(a.size()) + sb / static_cast<double>(b.size()));
}

struct OracleF {
  double precision, recall, f;
};

inline OracleF oracle_fscore(const std::vector<Vec3>& pred, const std::vector<Vec3>& gt, double t) {
  std::size_t p_in = 0, r_in = 0;
  for (const Vec3& p : pred) p_in += std::sqrt(min_sq(gt, p)) <= t ? 1 : 0;
  for (const Vec3& g : gt) r_in += std::sqrt(min_sq(pred, g)) <= t ? 1 : 0;
  const double precision = static_cast<double>(p_in) / static_cast<double>(pred.size());
  const double recall = static_cast<double>(r_in) / static_cast<double>(gt.size());
  const double f = precision + recall > 0 ? 2 * precision * recall / (precision + recall) : 0.0;
  return {precision, recall, f};
}

// --- decoding oracle --------------------------------------------------------------------------

struct OraclePath {
  std::vector<std::size_t> states;
  double cost = std::numeric_limits<double>::infinity();
};

/// Enumerates all S^T paths. Ties go to the path that is smaller when compared from the last
/// frame backwards, matching the decoders' documented order.
inline OraclePath oracle_decode(const hoalign::EmissionTable& e,
                                const std::function<double(std::size_t, std::size_t, std::size_t)>& a,
                                double lambda) {
  const std::size_t T = e.frames(), S = e.states();
  std::vector<std::size_t> q(T, 0);
  OraclePath best;
  while (true) {
    double cost = e(0, q[0]);
    for (std::size_t t = 1; t < T; ++t) cost = (cost + lambda * a(t, q[t - 1], q[t])) + e(t, q[t]);
    bool better = cost < best.cost;
    if (!better && cost == best.cost) {
      for (std::size_t k = T; k-- > 0;) {
        if (q[k] != best.states[k]) {
          better = q[k] < best.states[k];
          break;
        }
      }
    }
    if (better) best = {q, cost};
    std::size_t k = 0;
    while (k < T && ++q[k] == S) q[k++] = 0;
    if (k == T) break;
  }
  return best;
}

/// Fresh, empty scratch directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  const auto p = std::filesystem::temp_directory_path() / ("hoalign_test_" + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

}  // namespace testsupport
