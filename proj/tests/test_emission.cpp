#include <doctest.h>

#include <fstream>

#include "hoalign/emission.hpp"
#include "hoalign/error.hpp"
#include "hoalign/feature_io.hpp"
#include "hoalign/features.hpp"
#include "hoalign/metrics.hpp"
#include "hoalign/raster.hpp"
#include "hoalign/sampling.hpp"
#include "support.hpp"

using namespace hoalign;
using namespace testsupport;

namespace {

const Camera kCam{100, 100, 32, 32, 64, 64};

FeatureMap random_map(std::mt19937_64& rng, int w, int h, int c, double mask_density) {
  std::vector<float> values(static_cast<std::size_t>(w * h * c));
  for (float& v : values) v = static_cast<float>(uniform(rng, -1, 1));
  BinaryMask mask(w, h);
  for (int r = 0; r < h; ++r)
    for (int col = 0; col < w; ++col) mask.set(col, r, uniform(rng, 0, 1) < mask_density);
  mask.set(0, 0, true);
  return FeatureMap(w, h, c, std::move(values), std::move(mask));
}

PCABasis identity_basis(int channels) {
  PCABasis b;
  b.mean = Eigen::VectorXd::Zero(channels);
  b.components = Eigen::Matrix<double, 3, Eigen::Dynamic>::Zero(3, channels);
  for (int k = 0; k < 3; ++k) b.components(k, k) = 1.0;
  return b;
}

FeatureMap constant_map(int w, int h, const std::vector<float>& feature) {
  std::vector<float> values;
  for (int i = 0; i < w * h; ++i) values.insert(values.end(), feature.begin(), feature.end());
  return FeatureMap(w, h, static_cast<int>(feature.size()), std::move(values), BinaryMask(w, h, 1));
}

std::vector<bool> oracle_silhouette(const TriangleMesh& mesh, const Camera& cam) {
  std::vector<bool> out;
  for (const auto& h : oracle_cast(mesh, cam)) out.push_back(h.hit);
  return out;
}

}  // namespace

TEST_SUITE("estimate_scale") {
  TEST_CASE("same cloud gives one, doubled cloud gives two") {
    std::mt19937_64 rng(1);
    const auto y = random_points(rng, 200, -1, 1);
    std::vector<Vec3> x2;
    for (const Vec3& p : y) x2.push_back(2 * p);
    CHECK(std::abs(estimate_scale(y, y) - 1) < 1e-12);
    CHECK(std::abs(estimate_scale(x2, y) - 2) < 1e-12);
  }

  TEST_CASE("two-point moment arithmetic") {
    const std::vector<Vec3> y = {Vec3(1, 0, 0), Vec3(-1, 0, 0)}, x = {Vec3(3, 0, 0), Vec3(-3, 0, 0)};
    CHECK(std::abs(estimate_scale(x, y) - 3) < 1e-12);
  }

  TEST_CASE("linear in the observed scale, invariant to translation and point count") {
    std::mt19937_64 rng(2);
    for (int trial = 0; trial < 50; ++trial) {
      const auto x = random_points(rng, 100, -1, 1);
      const auto y = random_points(rng, 70, -0.5, 2);
      const double k = uniform(rng, 0.1, 10);
      std::vector<Vec3> kx, shifted;
      for (const Vec3& p : x) {
        kx.push_back(k * p);
        shifted.push_back(p + Vec3(5, -3, 2));
      }
      const double base = estimate_scale(x, y);
      CHECK(std::abs(estimate_scale(kx, y) - k * base) < 1e-9 * k * base);
      CHECK(std::abs(estimate_scale(shifted, y) - base) < 1e-9 * base);
      std::vector<Vec3> doubled = x;
      doubled.insert(doubled.end(), x.begin(), x.end());
      CHECK(std::abs(estimate_scale(doubled, y) - base) < 1e-9 * base);
    }
  }

  TEST_CASE("a model without extent is degenerate") {
    const std::vector<Vec3> x = {Vec3(0, 0, 0), Vec3(1, 0, 0)}, y(3, Vec3(1, 1, 1));
    try {
      estimate_scale(x, y);
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::kDegenerateCloud);
    }
  }
}

TEST_SUITE("rasterize_silhouette") {
  TEST_CASE("mesh behind the camera renders nothing") {
    CHECK(rasterize_silhouette(square(-1, -1, 2, -1), SimilarityTransform(), kCam).count() == 0);
  }

  TEST_CASE("quad filling the frustum renders everything") {
    CHECK(rasterize_silhouette(square(-10, -10, 20, 1), SimilarityTransform(), kCam).count() == 64 * 64);
  }

  TEST_CASE("unit quad at one meter matches the ray-cast oracle") {
    const TriangleMesh quad = square(0, 0, 1, 1);
    const BinaryMask mask = rasterize_silhouette(quad, SimilarityTransform(), kCam);
    const auto oracle = oracle_silhouette(quad, kCam);
    for (int r = 0; r < 64; ++r)
      for (int c = 0; c < 64; ++c) CHECK(mask.at(c, r) == oracle[static_cast<std::size_t>(r * 64 + c)]);
    CHECK(mask.count() == 32 * 32);
  }

  TEST_CASE("pose is applied before rendering") {
    const TriangleMesh quad = square(0, 0, 1, 0);
    const SimilarityTransform pose(Quat::Identity(), Vec3(0, 0, 1));
    const BinaryMask a = rasterize_silhouette(quad, pose, kCam);
    const BinaryMask b = rasterize_silhouette(square(0, 0, 1, 1), SimilarityTransform(), kCam);
    CHECK(a == b);
  }

  TEST_CASE("random meshes, including ones crossing the camera plane, match the oracle") {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 10; ++trial) {
      const auto faces = static_cast<std::size_t>(50 + 450 * trial / 9);
      const TriangleMesh mesh = random_soup(rng, faces, -0.4, 0.4, trial < 5 ? 0.5 : -0.3, 1.5, 0.3);
      const BinaryMask mask = rasterize_silhouette(mesh, SimilarityTransform(), kCam);
      const auto oracle = oracle_silhouette(mesh, kCam);
      int mismatches = 0;
      for (int r = 0; r < 64; ++r)
        for (int c = 0; c < 64; ++c) mismatches += mask.at(c, r) != oracle[static_cast<std::size_t>(r * 64 + c)];
      CHECK(mismatches == 0);
    }
  }

  TEST_CASE("visible depth is the nearest surface") {
    std::mt19937_64 rng(4);
    const TriangleMesh mesh = random_soup(rng, 200, -0.3, 0.3, 0.5, 1.5, 0.3);
    const Fragments frags = rasterize(mesh, kCam);
    const auto oracle = oracle_cast(mesh, kCam);
    for (int r = 0; r < 64; ++r) {
      for (int c = 0; c < 64; ++c) {
        const auto& o = oracle[static_cast<std::size_t>(r * 64 + c)];
        if (!o.hit) continue;
        CHECK(std::abs(frags.depth_at(c, r) - o.point.z()) < 1e-9);
      }
    }
  }
}

TEST_SUITE("pca_basis") {
  TEST_CASE("features in a 3-dimensional subspace are spanned exactly") {
    std::mt19937_64 rng(5);
    const int C = 16;
    const Eigen::MatrixXd q = Eigen::MatrixXd::Random(C, 3).householderQr().householderQ() * Eigen::MatrixXd::Identity(C, 3);
    std::vector<FeatureMap> maps;
    for (int m = 0; m < 3; ++m) {
      std::vector<float> values;
      for (int i = 0; i < 100; ++i) {
        const Eigen::VectorXd f = q * Eigen::Vector3d(uniform(rng, -1, 1), uniform(rng, -2, 2), uniform(rng, -3, 3));
        for (int c = 0; c < C; ++c) values.push_back(static_cast<float>(f[c]));
      }
      maps.emplace_back(10, 10, C, std::move(values), BinaryMask(10, 10, 1));
    }
    const PCABasis b = pca_basis(maps);
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) CHECK(std::abs(b.components.row(i).dot(b.components.row(j)) - (i == j)) < 1e-9);
    }
    // every direction of the subspace survives projection onto the basis
    const Eigen::MatrixXd residual = q - b.components.transpose() * (b.components * q);
    CHECK(residual.norm() < 1e-6);
  }

  TEST_CASE("white noise spreads the variance evenly") {
    std::mt19937_64 rng(6);
    const int C = 12;
    std::normal_distribution<double> g;
    std::vector<float> values;
    for (int i = 0; i < 100 * 100 * C; ++i) values.push_back(static_cast<float>(g(rng)));
    const std::vector<FeatureMap> maps = {FeatureMap(100, 100, C, std::move(values), BinaryMask(100, 100, 1))};
    const PCABasis b = pca_basis(maps);
    const double explained = b.variances.sum() / b.total_variance;
    CHECK(std::abs(explained - 3.0 / C) / (3.0 / C) < 0.2);
  }

  TEST_CASE("duplicating every sample leaves the basis unchanged and signs are fixed") {
    std::mt19937_64 rng(7);
    const FeatureMap a = random_map(rng, 12, 12, 6, 0.7);
    const std::vector<FeatureMap> once = {a}, twice = {a, a};
    const PCABasis b1 = pca_basis(once), b2 = pca_basis(twice);
    CHECK((b1.components - b2.components).norm() < 1e-9);
    CHECK((b1.mean - b2.mean).norm() < 1e-12);
    for (int k = 0; k < 3; ++k) {
      Eigen::Index arg;
      b1.components.row(k).cwiseAbs().maxCoeff(&arg);
      CHECK(b1.components(k, arg) > 0);
    }
  }

  TEST_CASE("masked-out pixels are ignored") {
    std::mt19937_64 rng(8);
    FeatureMap a = random_map(rng, 8, 8, 5, 0.5);
    std::vector<float> other(a.values().begin(), a.values().end());
    for (int r = 0; r < 8; ++r)
      for (int c = 0; c < 8; ++c)
        if (!a.mask().at(c, r))
          for (int k = 0; k < 5; ++k) other[static_cast<std::size_t>((r * 8 + c) * 5 + k)] = 100.0f;
    const std::vector<FeatureMap> m1 = {a}, m2 = {FeatureMap(8, 8, 5, other, a.mask())};
    CHECK((pca_basis(m1).components - pca_basis(m2).components).norm() < 1e-12);
  }

  TEST_CASE("too few pixels or channels is an error") {
    const std::vector<FeatureMap> two_pixels = {FeatureMap(2, 1, 4, std::vector<float>(8, 1.0f), BinaryMask(2, 1, 1))};
    CHECK_THROWS_AS(pca_basis(two_pixels), Error);
    const std::vector<FeatureMap> two_channels = {FeatureMap(3, 3, 2, std::vector<float>(18, 1.0f), BinaryMask(3, 3, 1))};
    CHECK_THROWS_AS(pca_basis(two_channels), Error);
  }
}

TEST_SUITE("dino_similarity") {
  TEST_CASE("identical, negated and orthogonal projections") {
    const PCABasis basis = identity_basis(4);
    const FeatureMap f = constant_map(3, 2, {1, 0, 0, 0.5f});
    CHECK(dino_similarity(f, f, basis) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(std::abs(dino_similarity(constant_map(3, 2, {-1, 0, 0, 0.5f}), f, basis) - 1.0) < 1e-9);
    CHECK(std::abs(dino_similarity(constant_map(3, 2, {0, 1, 0, 0.5f}), f, basis) - 0.5) < 1e-9);
    CHECK(dino_similarity(f, f, basis) <= 1e-9);
  }

  TEST_CASE("bounded on random pairs and zero on identical maps") {
    std::mt19937_64 rng(9);
    for (int trial = 0; trial < 1000; ++trial) {
      const FeatureMap a = random_map(rng, 6, 5, 5, 0.6), b = random_map(rng, 6, 5, 5, 0.6);
      const std::vector<FeatureMap> pool = {a, b};
      const PCABasis basis = pca_basis(pool);
      const double e = dino_similarity(a, b, basis);
      CHECK(e >= 0.0);
      CHECK(e <= 1.0);
      CHECK(std::abs(dino_similarity(a, a, basis)) < 1e-9);
    }
  }

  TEST_CASE("only the intersection of both masks is compared") {
    const PCABasis basis = identity_basis(3);
    std::vector<float> va(2 * 1 * 3, 0.0f), vb(2 * 1 * 3, 0.0f);
    va[0] = 1;  // pixel 0
    vb[0] = 1;
    vb[3] = -5;  // pixel 1 only matters if it were in both masks
    BinaryMask ma(2, 1, 1), mb(2, 1, 1);
    mb.set(1, 0, false);
    const FeatureMap a(2, 1, 3, va, ma), b(2, 1, 3, vb, mb);
    CHECK(std::abs(dino_similarity(b, a, basis)) < 1e-12);
  }

  TEST_CASE("disjoint masks are reported as empty overlap") {
    const PCABasis basis = identity_basis(3);
    BinaryMask ma(2, 1), mb(2, 1);
    ma.set(0, 0, true);
    mb.set(1, 0, true);
    const FeatureMap a(2, 1, 3, std::vector<float>(6, 1.0f), ma), b(2, 1, 3, std::vector<float>(6, 1.0f), mb);
    try {
      dino_similarity(a, b, basis);
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::kEmptyOverlap);
    }
  }

  TEST_CASE("zero vectors are guarded by epsilon") {
    const PCABasis basis = identity_basis(3);
    const FeatureMap z = constant_map(2, 2, {0, 0, 0});
    const double e = dino_similarity(z, z, basis);
    CHECK(e == doctest::Approx(0.5));
  }
}

TEST_SUITE("emission cost") {
  TEST_CASE("zero feature weight leaves the weighted chamfer") {
    const EmissionTerms t{3.25, 0.4};
    CHECK(emission_cost(t, EmissionWeights{2.0, 0.0}, true, 99.0) == 6.5);
    CHECK(emission_cost(t, EmissionWeights{2.0, 1.0}, false, 99.0) == 6.5);
    CHECK(emission_cost(t, EmissionWeights{2.0, 1.0}, true, 99.0) == 6.5 + 0.4);
    CHECK(emission_cost(EmissionTerms{3.25, std::nullopt}, EmissionWeights{2.0, 1.0}, true, 99.0) == 99.0);
  }

  TEST_CASE("row normalization maps each term onto [0, 1]") {
    const std::vector<EmissionTerms> row = {{10, 0.2}, {30, 0.6}, {20, 1.0}};
    EmissionOptions opt;
    const auto costs = combine_emission_row(row, opt, true);
    CHECK(costs[0] == doctest::Approx(0.0));
    CHECK(costs[1] == doctest::Approx(1.0 + 0.5));
    CHECK(costs[2] == doctest::Approx(0.5 + 1.0));
    opt.normalize = false;
    const auto raw = combine_emission_row(row, opt, true);
    CHECK(raw[1] == doctest::Approx(30.6));
  }

  TEST_CASE("doubling both weights keeps the argmin") {
    std::mt19937_64 rng(10);
    for (int trial = 0; trial < 100; ++trial) {
      std::vector<EmissionTerms> row;
      for (int j = 0; j < 20; ++j) row.push_back({uniform(rng, 0, 5), uniform(rng, 0, 1)});
      EmissionOptions a, b;
      a.weights = {0.7, 1.3};
      b.weights = {1.4, 2.6};
      const auto ca = combine_emission_row(row, a, true), cb = combine_emission_row(row, b, true);
      CHECK(std::min_element(ca.begin(), ca.end()) - ca.begin() == std::min_element(cb.begin(), cb.end()) - cb.begin());
    }
  }

  TEST_CASE("states without overlap cost more than every scored state") {
    const std::vector<EmissionTerms> row = {{1, 0.1}, {2, std::nullopt}, {3, 0.9}, {0.5, std::nullopt}};
    const auto costs = combine_emission_row(row, EmissionOptions{}, true);
    CHECK(costs[1] == costs[3]);
    CHECK(costs[1] > costs[0]);
    CHECK(costs[1] > costs[2]);
    const std::vector<EmissionTerms> none = {{1, std::nullopt}, {2, std::nullopt}};
    const auto fallback = combine_emission_row(none, EmissionOptions{}, true);
    CHECK(fallback[0] == 0.0);
    CHECK(fallback[1] == 1.0);
  }

  TEST_CASE("row costs do not depend on evaluation order") {
    std::mt19937_64 rng(11);
    std::vector<EmissionTerms> row;
    for (int j = 0; j < 30; ++j) row.push_back({uniform(rng, 0, 5), j % 7 ? std::optional<double>(uniform(rng, 0, 1)) : std::nullopt});
    std::vector<EmissionTerms> reversed(row.rbegin(), row.rend());
    const auto a = combine_emission_row(row, EmissionOptions{}, true);
    auto b = combine_emission_row(reversed, EmissionOptions{}, true);
    std::reverse(b.begin(), b.end());
    CHECK(a == b);
  }

  TEST_CASE("posed chamfer equals chamfer against explicitly posed samples") {
    std::mt19937_64 rng(12);
    const TriangleMesh model = unit_cube();
    const PreparedModel pm(model, 300, 13);
    const auto obs = apply_pose(sample_mesh_surface(model, 500, 14).points(),
                                SimilarityTransform(random_quat(rng), Vec3(0, 0, 0.4), 0.05));
    const PreparedFrame frame(PointCloud(obs), 300, 15);
    for (int trial = 0; trial < 20; ++trial) {
      const SimilarityTransform pose(random_quat(rng), frame.centroid() + random_vec(rng, -0.01, 0.01), 0.05);
      const double fast = posed_chamfer(pm, frame, pose);
      const double direct = chamfer_distance(frame.points(), apply_pose(pm.samples(), pose));
      CHECK(std::abs(fast - direct) < 1e-9 * std::max(1.0, direct));
    }
  }
}

TEST_SUITE("feature sources") {
  TEST_CASE("tables: NaN is empty overlap, out-of-range values are rejected") {
    const float nan = std::numeric_limits<float>::quiet_NaN();
    const TableFeatureSource src(EmissionTable(1, 2, std::vector<double>{0.25, nan}));
    CHECK(src.provides(Phase::kRotation));
    CHECK_FALSE(src.provides(Phase::kTranslation));
    CHECK(src.dino_term(CandidateView{0, Phase::kRotation, 0, {}}) == 0.25);
    CHECK_FALSE(src.dino_term(CandidateView{0, Phase::kRotation, 1, {}}).has_value());
    CHECK_THROWS_AS(TableFeatureSource(EmissionTable(1, 1, std::vector<double>{1.5})), Error);
  }

  TEST_CASE("synthetic source scores the true pose at zero") {
    const TriangleMesh model = apply_pose(unit_cube(), SimilarityTransform(Quat::Identity(), Vec3(-0.5, -0.5, -0.5)));
    const SyntheticFeatureField field(6, 0.7, 3);
    const SimilarityTransform truth(Quat(Eigen::AngleAxisd(0.6, Vec3(1, 1, 0).normalized())), Vec3(0.01, 0, 0.5), 0.1);
    const std::vector<FeatureMap> image = {render_field_features(model, truth, kCam, field)};
    const SyntheticFeatureSource src(model, kCam, image, field);
    const auto at_truth = src.dino_term(CandidateView{0, Phase::kRotation, 0, truth});
    REQUIRE(at_truth.has_value());
    CHECK(*at_truth < 1e-9);
    const SimilarityTransform off(Quat(Eigen::AngleAxisd(1.2, Vec3::UnitZ())) * truth.rotation(), truth.translation(), 0.1);
    CHECK(*src.dino_term(CandidateView{0, Phase::kRotation, 0, off}) > *at_truth);
    const SimilarityTransform away(truth.rotation(), Vec3(5, 0, 0.5), 0.1);
    CHECK_FALSE(src.dino_term(CandidateView{0, Phase::kRotation, 0, away}).has_value());
  }

  TEST_CASE("ingested maps: missing files are reported with their path") {
    const auto dir = scratch_dir("ingest");
    const TriangleMesh model = apply_pose(unit_cube(), SimilarityTransform(Quat::Identity(), Vec3(-0.5, -0.5, 0.5)));
    std::mt19937_64 rng(16);
    FeatureMap image = random_map(rng, 64, 64, 4, 0.5);
    for (std::size_t j = 0; j < 2; ++j) {
      write_feature_map(IngestedFeatureMapSource::map_path(dir, Phase::kRotation, 7, j), random_map(rng, 64, 64, 4, 0.5));
    }
    CHECK_NOTHROW(IngestedFeatureMapSource(model, kCam, {image}, dir, {7}, 2, 3));
    const IngestedFeatureMapSource src(model, kCam, {image}, dir, {7}, 2, 3);
    CHECK_FALSE(src.provides(Phase::kTranslation));
    const auto e = src.dino_term(CandidateView{0, Phase::kRotation, 1, SimilarityTransform()});
    REQUIRE(e.has_value());
    CHECK(*e >= 0.0);
    try {
      IngestedFeatureMapSource(model, kCam, {image}, dir, {7}, 3, 3);
      FAIL("expected an error");
    } catch (const Error& err) {
      CHECK(err.kind() == ErrorKind::kParseError);
      CHECK(std::string(err.what()).find("rotation_000007_000002.fmap") != std::string::npos);
    }
  }
}

TEST_SUITE("binary formats") {
  TEST_CASE("FMAP round trip") {
    const auto dir = scratch_dir("fmap");
    std::mt19937_64 rng(17);
    const FeatureMap m = random_map(rng, 7, 5, 3, 0.5);
    write_feature_map(dir / "m.fmap", m);
    const FeatureMap back = read_feature_map(dir / "m.fmap");
    CHECK(back.width() == 7);
    CHECK(back.height() == 5);
    CHECK(back.channels() == 3);
    CHECK(std::equal(back.values().begin(), back.values().end(), m.values().begin()));
    CHECK(back.mask() == m.mask());
    const auto h = read_feature_map_header(dir / "m.fmap");
    CHECK(h.channels == 3);
    CHECK(std::filesystem::file_size(dir / "m.fmap") == 20 + 7 * 5 * 3 * 4 + 7 * 5);
  }

  TEST_CASE("FMAP with wrong magic or truncated data is a parse error") {
    const auto dir = scratch_dir("fmapbad");
    {
      std::ofstream out(dir / "bad.fmap", std::ios::binary);
      out << "FMAQ";
    }
    CHECK_THROWS_AS(read_feature_map(dir / "bad.fmap"), Error);
    std::mt19937_64 rng(18);
    write_feature_map(dir / "t.fmap", random_map(rng, 4, 4, 3, 0.5));
    std::filesystem::resize_file(dir / "t.fmap", 40);
    CHECK_THROWS_AS(read_feature_map(dir / "t.fmap"), Error);
    CHECK_THROWS_AS(read_feature_map_header(dir / "t.fmap"), Error);
  }

  TEST_CASE("EMIT round trip keeps NaN") {
    const auto dir = scratch_dir("emit");
    const EmissionTable t(2, 3, std::vector<double>{0, 1.5, 2, std::nan(""), 4, 5});
    write_emission_table(dir / "t.emit", t);
    const EmissionTable back = read_emission_table(dir / "t.emit");
    CHECK(back.frames() == 2);
    CHECK(back.states() == 3);
    CHECK(back(0, 1) == 1.5);
    CHECK(std::isnan(back(1, 0)));
    CHECK(std::filesystem::file_size(dir / "t.emit") == 12 + 6 * 4);
  }

  TEST_CASE("PGM masks: nonzero is in") {
    const auto dir = scratch_dir("pgm");
    {
      std::ofstream out(dir / "m.pgm", std::ios::binary);
      out << "P5\n# comment\n3 2\n255\n";
      const unsigned char px[6] = {0, 7, 255, 0, 0, 1};
      out.write(reinterpret_cast<const char*>(px), 6);
    }
    const BinaryMask m = read_pgm_mask(dir / "m.pgm");
    CHECK(m.width() == 3);
    CHECK(m.height() == 2);
    CHECK_FALSE(m.at(0, 0));
    CHECK(m.at(1, 0));
    CHECK(m.at(2, 0));
    CHECK(m.at(2, 1));
    CHECK(m.count() == 3);
    write_pgm_mask(dir / "copy.pgm", m);
    CHECK(read_pgm_mask(dir / "copy.pgm") == m);
  }
}
