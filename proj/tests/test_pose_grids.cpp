#include <doctest.h>

#include <numbers>
#include <set>

#include "hoalign/grids.hpp"
#include "support.hpp"

using namespace hoalign;
using namespace testsupport;

namespace {

// Independent Monte-Carlo covering radius: linear scan with the arccos form of the angle.
double oracle_covering_radius(const RotationGrid& grid, std::size_t samples, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  double worst = 0.0;
  for (std::size_t i = 0; i < samples; ++i) {
    const Quat q = random_quat(rng);
    double best_dot = 0.0;
    for (const Quat& g : grid.rotations()) best_dot = std::max(best_dot, std::abs(q.dot(g)));
    worst = std::max(worst, 2.0 * std::acos(std::min(best_dot, 1.0)));
  }
  return worst;
}

}  // namespace

TEST_SUITE("build_rotation_grid") {
  TEST_CASE("level 0 is the 16 4-cube vertices up to sign") {
    const RotationGrid g = build_rotation_grid(0);
    REQUIRE(g.size() == 8);
    std::set<std::array<int, 4>> seen;
    for (const Quat& q : g.rotations()) {
      const std::array<double, 4> c = {q.w(), q.x(), q.y(), q.z()};
      std::array<int, 4> signs{};
      for (int k = 0; k < 4; ++k) {
        CHECK(std::abs(std::abs(c[k]) - 0.5) < 1e-12);
        signs[k] = c[k] > 0 ? 1 : -1;
      }
      CHECK(signs[0] == 1);
      seen.insert(signs);
    }
    CHECK(seen.size() == 8);
  }

  TEST_CASE("level 0 contains the 120 degree turn about (1,1,1)") {
    const RotationGrid g = build_rotation_grid(0);
    bool found = false;
    for (const Quat& q : g.rotations()) {
      if ((Eigen::Vector4d(q.w(), q.x(), q.y(), q.z()) - Eigen::Vector4d::Constant(0.5)).norm() > 1e-12) continue;
      found = true;
      const Eigen::AngleAxisd aa(q);
      CHECK(std::abs(aa.angle() - 2 * std::numbers::pi / 3) < 1e-12);
      CHECK((aa.axis() - Vec3::Ones().normalized()).norm() < 1e-12);
    }
    CHECK(found);
  }

  TEST_CASE("sizes grow with level and the output is deterministic") {
    std::size_t prev = 0;
    for (int level = 0; level <= 3; ++level) {
      const RotationGrid a = build_rotation_grid(level);
      const RotationGrid b = build_rotation_grid(level);
      CHECK(a.size() > prev);
      prev = a.size();
      REQUIRE(a.size() == b.size());
      for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].coeffs() == b[i].coeffs());
    }
    CHECK(build_rotation_grid(1).size() == 40);
    CHECK(build_rotation_grid(2).size() == 272);
  }

  TEST_CASE("entries are unit, canonical and pairwise distinct") {
    for (int level = 0; level <= 2; ++level) {
      const RotationGrid g = build_rotation_grid(level);
      for (std::size_t i = 0; i < g.size(); ++i) {
        CHECK(std::abs(g[i].norm() - 1.0) < 1e-12);
        const std::array<double, 4> c = {g[i].w(), g[i].x(), g[i].y(), g[i].z()};
        for (double v : c) {
          if (v != 0.0) {
            CHECK(v > 0.0);
            break;
          }
        }
        for (std::size_t j = i + 1; j < g.size(); ++j) CHECK(quaternion_angle(g[i], g[j]) > 1e-6);
      }
    }
  }

  TEST_CASE("covering radius decreases with level (independent oracle and library estimate)") {
    double prev_oracle = 10.0, prev_lib = 10.0;
    for (int level = 0; level <= 2; ++level) {
      const RotationGrid g = build_rotation_grid(level);
      const double oracle = oracle_covering_radius(g, 20000, 100 + level);
      const double lib = estimate_covering_radius(g, 20000, 100 + level);
      CHECK(oracle < prev_oracle);
      CHECK(lib < prev_lib);
      CHECK(std::abs(oracle - lib) < 1e-6);
      prev_oracle = oracle;
      prev_lib = lib;
    }
  }

  TEST_CASE("nearest returns the closest entry with lowest-index ties") {
    const RotationGrid g = build_rotation_grid(1);
    std::mt19937_64 rng(3);
    for (int i = 0; i < 300; ++i) {
      const Quat q = random_quat(rng);
      std::size_t best = 0;
      for (std::size_t j = 1; j < g.size(); ++j) {
        if (quaternion_angle(q, g[j]) < quaternion_angle(q, g[best])) best = j;
      }
      CHECK(quaternion_angle(q, g[g.nearest(q)]) <= quaternion_angle(q, g[best]) + 1e-12);
    }
    for (std::size_t j = 0; j < g.size(); ++j) CHECK(g.nearest(g[j]) == j);
  }

  TEST_CASE("invalid levels are rejected") {
    CHECK_THROWS(build_rotation_grid(-1));
  }
}

TEST_SUITE("build_translation_grid") {
  TEST_CASE("single cell is the center") {
    const TranslationGrid g = build_translation_grid(Vec3(1, 2, 3), Vec3(0.5, 0.5, 0.5), {1, 1, 1});
    REQUIRE(g.size() == 1);
    CHECK(g[0] == Vec3(1, 2, 3));
  }

  TEST_CASE("3x3x3 around the origin takes values -1, 0, 1") {
    const TranslationGrid g = build_translation_grid(Vec3::Zero(), Vec3::Ones(), {3, 3, 3});
    REQUIRE(g.size() == 27);
    std::set<std::array<double, 3>> seen;
    for (const Vec3& p : g.offsets()) {
      for (int k = 0; k < 3; ++k) CHECK((p[k] == -1.0 || p[k] == 0.0 || p[k] == 1.0));
      seen.insert({p.x(), p.y(), p.z()});
    }
    CHECK(seen.size() == 27);
    CHECK(g[g.center_index()] == Vec3::Zero());
  }

  TEST_CASE("even count spans the endpoints") {
    const TranslationGrid g = build_translation_grid(Vec3(0.5, 0, 0), Vec3(1, 0, 0), {2, 1, 1});
    REQUIRE(g.size() == 2);
    CHECK((g[0] - Vec3(-0.5, 0, 0)).norm() < 1e-15);
    CHECK((g[1] - Vec3(1.5, 0, 0)).norm() < 1e-15);
  }

  TEST_CASE("lattice is symmetric about the center with uniform spacing") {
    const Vec3 c(0.1, -0.2, 0.35);
    const TranslationGrid g = build_translation_grid(c, Vec3(0.05, 0.03, 0.02), {5, 4, 3});
    REQUIRE(g.size() == 60);
    Vec3 sum = Vec3::Zero();
    for (const Vec3& p : g.offsets()) sum += p - c;
    CHECK(sum.norm() < 1e-12);
    // x-major layout: neighbours along z differ by the z spacing.
    CHECK(std::abs((g[1] - g[0]).z() - 0.02) < 1e-12);
    CHECK(std::abs((g[3] - g[0]).y() - 0.02) < 1e-12);
    CHECK(std::abs((g[12] - g[0]).x() - 0.025) < 1e-12);
    CHECK(g[g.center_index()].x() == doctest::Approx(c.x()));
  }

  TEST_CASE("bad parameters are rejected") {
    CHECK_THROWS(build_translation_grid(Vec3::Zero(), Vec3::Ones(), {0, 1, 1}));
    CHECK_THROWS(build_translation_grid(Vec3::Zero(), Vec3(-1, 0, 0), {1, 1, 1}));
  }
}

TEST_SUITE("rodrigues_error") {
  TEST_CASE("worked values") {
    const Mat3 I = Mat3::Identity();
    CHECK(rodrigues_error(I, I) == 0.0);
    CHECK(std::abs(rodrigues_error(I, rotation_z(std::numbers::pi / 2).toRotationMatrix()) - std::numbers::pi / 2) < 1e-12);
    CHECK(std::abs(rodrigues_error(I, rotation_z(std::numbers::pi).toRotationMatrix()) - std::numbers::pi) < 1e-12);
  }

  TEST_CASE("symmetric, zero on equal input, matches the quaternion form and the triangle inequality") {
    std::mt19937_64 rng(9);
    for (int i = 0; i < 1000; ++i) {
      const Quat a = random_quat(rng), b = random_quat(rng), c = random_quat(rng);
      const double ab = rodrigues_error(a, b), bc = rodrigues_error(b, c), ac = rodrigues_error(a, c);
      CHECK(ab >= 0);
      CHECK(ab <= std::numbers::pi);
      CHECK(std::abs(ab - rodrigues_error(b, a)) < 1e-12);
      CHECK(rodrigues_error(a, a) < 1e-12);
      CHECK(ac <= ab + bc + 1e-9);
      CHECK(std::abs(ab - quaternion_angle(a, b)) < 1e-9);
      CHECK(std::abs(ab - 2 * std::acos(std::min(1.0, std::abs(a.dot(b))))) < 1e-7);
    }
  }
}
