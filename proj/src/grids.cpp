#include "hoalign/grids.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

#include "hoalign/error.hpp"

namespace hoalign {

namespace {

using QuantKey = std::array<long long, 4>;

QuantKey quantize(const Quat& q) {
  constexpr double kStep = 1e-9;
  return {std::llround(q.w() / kStep), std::llround(q.x() / kStep), std::llround(q.y() / kStep),
          std::llround(q.z() / kStep)};
}

}  // namespace

std::size_t RotationGrid::nearest(const Quat& q) const {
  std::size_t best = 0;
  double best_dot = -1.0;
  for (std::size_t i = 0; i < rotations_.size(); ++i) {
    const double d = std::abs(rotations_[i].dot(q));
    if (d > best_dot) {
      best_dot = d;
      best = i;
    }
  }
  return best;
}

RotationGrid build_rotation_grid(int level) {
  if (level < 0 || level > 8) fail(ErrorKind::kInvalidArgument, "rotation grid level must be in [0, 8]");
  const int n = 1 << level;
  // Ordered map keyed on quantized coordinates gives dedup and a deterministic order at once.
  std::map<QuantKey, Quat> unique;
  std::array<double, 4> c{};
  for (int axis = 0; axis < 4; ++axis) {
    for (double side : {-1.0, 1.0}) {
      for (int i = 0; i <= n; ++i) {
        for (int j = 0; j <= n; ++j) {
          for (int k = 0; k <= n; ++k) {
            const double free[3] = {-1.0 + 2.0 * i / n, -1.0 + 2.0 * j / n, -1.0 + 2.0 * k / n};
            for (int d = 0, f = 0; d < 4; ++d) c[d] = d == axis ? side : free[f++];
            const Quat q = canonicalize(Quat(c[0], c[1], c[2], c[3]));
            unique.try_emplace(quantize(q), q);
          }
        }
      }
    }
  }
  std::vector<Quat> rotations;
  rotations.reserve(unique.size());
  // Descending key order puts the largest-w entries first.
  for (auto it = unique.rbegin(); it != unique.rend(); ++it) rotations.push_back(it->second);
  return RotationGrid(level, std::move(rotations));
}

double estimate_covering_radius(const RotationGrid& grid, std::size_t samples, std::uint64_t seed) {
  if (grid.size() == 0) fail(ErrorKind::kInvalidArgument, "empty rotation grid");
  std::mt19937_64 rng(seed);
  double worst_dot = 1.0;
  for (std::size_t s = 0; s < samples; ++s) {
    const Quat q = random_rotation(rng);
    double best = 0.0;
    for (const Quat& g : grid.rotations()) best = std::max(best, std::abs(g.dot(q)));
    worst_dot = std::min(worst_dot, best);
  }
  return 2.0 * std::acos(std::clamp(worst_dot, -1.0, 1.0));
}

std::size_t TranslationGrid::center_index() const {
  const int ix = counts_[0] / 2, iy = counts_[1] / 2, iz = counts_[2] / 2;
  return static_cast<std::size_t>((ix * counts_[1] + iy) * counts_[2] + iz);
}

TranslationGrid build_translation_grid(const Vec3& center, const Vec3& half_extent, std::array<int, 3> counts) {
  for (int a = 0; a < 3; ++a) {
    if (counts[a] < 1) fail(ErrorKind::kInvalidArgument, "translation grid counts must be >= 1");
    if (!(half_extent[a] >= 0.0)) fail(ErrorKind::kInvalidArgument, "translation half extent must be >= 0");
  }
  auto axis_values = [&](int a) {
    std::vector<double> v(static_cast<std::size_t>(counts[a]));
    for (int i = 0; i < counts[a]; ++i) {
      const double frac = counts[a] == 1 ? 0.0 : -1.0 + 2.0 * i / (counts[a] - 1);
      v[static_cast<std::size_t>(i)] = center[a] + frac * half_extent[a];
    }
    return v;
  };
  const auto xs = axis_values(0), ys = axis_values(1), zs = axis_values(2);
  std::vector<Vec3> offsets;
  offsets.reserve(xs.size() * ys.size() * zs.size());
  for (double x : xs) {
    for (double y : ys) {
      for (double z : zs) offsets.emplace_back(x, y, z);
    }
  }
  return TranslationGrid(center, half_extent, counts, std::move(offsets));
}

double rodrigues_error(const Mat3& ri, const Mat3& rj) {
  // atan2(sin, cos) of the relative rotation; same angle as arccos((tr - 1) / 2) without its
  // loss of precision near 0 and pi.
  const Mat3 m = ri.transpose() * rj;
  const double c = std::clamp((m.trace() - 1.0) / 2.0, -1.0, 1.0);
  const double s = 0.5 * Vec3(m(2, 1) - m(1, 2), m(0, 2) - m(2, 0), m(1, 0) - m(0, 1)).norm();
  return std::atan2(s, c);
}

double rodrigues_error(const Quat& qi, const Quat& qj) {
  return rodrigues_error(qi.toRotationMatrix(), qj.toRotationMatrix());
}

double quaternion_angle(const Quat& qi, const Quat& qj) {
  const Quat rel = qi.normalized().conjugate() * qj.normalized();
  return 2.0 * std::atan2(rel.vec().norm(), std::abs(rel.w()));
}

}  // namespace hoalign
