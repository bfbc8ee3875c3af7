#include "hoalign/synthetic.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include <json.hpp>

#include "hoalign/error.hpp"
#include "hoalign/feature_io.hpp"
#include "hoalign/grids.hpp"
#include "hoalign/mesh_io.hpp"
#include "hoalign/raycast.hpp"
#include "hoalign/results_io.hpp"
#include "hoalign/sampling.hpp"

namespace hoalign {

namespace {

enum SynthStream : std::uint64_t {
  kObservationSamples = 10,
  kTrajectory = 11,
  kNoise = 12,
  kHandSubset = 13,
};

using RadiusFn = double (*)(double theta, double phi);

// UV sphere with poles on the z axis; `radius(theta, phi)` scales the unit direction.
TriangleMesh make_uv_surface(int rings, int segments, const Vec3& axes, RadiusFn radius) {
  if (rings < 2 || segments < 3) fail(ErrorKind::kInvalidArgument, "surface needs rings >= 2 and segments >= 3");
  std::vector<Vec3> vertices;
  auto point = [&](double theta, double phi) {
    const Vec3 dir(std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi), std::cos(theta));
    return Vec3(radius(theta, phi) * dir.cwiseProduct(axes));
  };
  vertices.push_back(point(0.0, 0.0));
  for (int r = 1; r < rings; ++r) {
    const double theta = std::numbers::pi * r / rings;
    for (int s = 0; s < segments; ++s) vertices.push_back(point(theta, 2.0 * std::numbers::pi * s / segments));
  }
  vertices.push_back(point(std::numbers::pi, 0.0));

  const auto ring_vertex = [&](int r, int s) {
    return static_cast<std::uint32_t>(1 + (r - 1) * segments + (s % segments));
  };
  const auto south = static_cast<std::uint32_t>(vertices.size() - 1);
  std::vector<Face> faces;
  for (int s = 0; s < segments; ++s) faces.push_back({0, ring_vertex(1, s), ring_vertex(1, s + 1)});
  for (int r = 1; r + 1 < rings; ++r) {
    for (int s = 0; s < segments; ++s) {
      faces.push_back({ring_vertex(r, s), ring_vertex(r + 1, s), ring_vertex(r + 1, s + 1)});
      faces.push_back({ring_vertex(r, s), ring_vertex(r + 1, s + 1), ring_vertex(r, s + 1)});
    }
  }
  for (int s = 0; s < segments; ++s) faces.push_back({ring_vertex(rings - 1, s), south, ring_vertex(rings - 1, s + 1)});
  return TriangleMesh(std::move(vertices), std::move(faces));
}

double lumpy_radius(double theta, double phi) {
  return 1.0 + 0.18 * std::sin(3.0 * theta) * std::cos(2.0 * phi + 0.4) + 0.12 * std::cos(theta) +
         0.08 * std::sin(phi + 1.3) * std::sin(theta);
}

double unit_radius(double, double) { return 1.0; }

std::vector<Vec3> translation_path(std::size_t frames, double depth, std::mt19937_64& rng) {
  const double phase = 2.0 * std::numbers::pi * unit_uniform(rng);
  std::vector<Vec3> out;
  for (std::size_t t = 0; t < frames; ++t) {
    const double a = phase + 0.15 * static_cast<double>(t);
    out.emplace_back(0.01 * std::cos(a), 0.006 * std::sin(a), depth + 0.005 * std::sin(0.5 * a));
  }
  return out;
}

std::vector<std::size_t> rotation_path(const RotationGrid& grid, std::size_t frames, double max_step,
                                       std::mt19937_64& rng) {
  const auto start = static_cast<std::size_t>(unit_uniform(rng) * static_cast<double>(grid.size()));
  const double span = std::min(max_step * static_cast<double>(frames - 1), 2.0) * 0.75;
  std::size_t end = start;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const double gap = std::abs(quaternion_angle(grid[start], grid[j]) - span);
    if (gap < best) {
      best = gap;
      end = j;
    }
  }
  std::vector<std::size_t> states;
  for (std::size_t t = 0; t < frames; ++t) {
    const double u = frames == 1 ? 0.0 : static_cast<double>(t) / static_cast<double>(frames - 1);
    states.push_back(grid.nearest(grid[start].slerp(u, grid[end])));
  }
  return states;
}

std::size_t farthest_state(const RotationGrid& grid, const Quat& q) {
  std::size_t arg = 0;
  double best = -1.0;
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const double angle = quaternion_angle(q, grid[j]);
    if (angle > best) {
      best = angle;
      arg = j;
    }
  }
  return arg;
}

}  // namespace

TriangleMesh make_lumpy_model(int rings, int segments) {
  return make_uv_surface(rings, segments, Vec3(0.5, 0.3, 0.2), lumpy_radius);
}

TriangleMesh make_ellipsoid(const Vec3& radii, int rings, int segments) {
  return make_uv_surface(rings, segments, radii, unit_radius);
}

SyntheticScene generate_synthetic_scene(const RunConfig& config) {
  config.validate();
  const auto frames = static_cast<std::size_t>(config.synth_frames);
  const auto n_samples = static_cast<std::size_t>(config.model_samples);
  SyntheticScene scene;
  scene.camera = config.camera();
  scene.camera.validate();
  scene.field = SyntheticFeatureField(config.synthetic_channels, config.synthetic_wavelength, config.synthetic_seed);
  scene.adversarial_frame = config.synth_adversarial_frame;

  // Recenter so the observation samples have their mean at the model origin.
  const TriangleMesh raw = make_lumpy_model(18, 28);
  const PointCloud raw_samples = sample_mesh_surface(raw, n_samples, derive_seed(config.seed, kObservationSamples));
  const Vec3 shift = mean_point(raw_samples.points());
  std::vector<Vec3> vertices = raw.vertices();
  for (Vec3& v : vertices) v -= shift;
  scene.model = TriangleMesh(std::move(vertices), raw.faces());
  std::vector<Vec3> samples = raw_samples.points();
  for (Vec3& p : samples) p -= shift;

  const RotationGrid grid = build_rotation_grid(config.rotation_level);
  std::mt19937_64 rng(derive_seed(config.seed, kTrajectory));
  scene.rotation_states = rotation_path(grid, frames, config.synth_max_step, rng);
  const std::vector<Vec3> translations = translation_path(frames, config.synth_depth, rng);
  const Vec3 half(config.translation_half_extent[0], config.translation_half_extent[1],
                  config.translation_half_extent[2]);

  scene.ground_truth.scale = config.synth_scale;
  for (std::size_t t = 0; t < frames; ++t) {
    const std::int64_t id = config.first_frame + static_cast<std::int64_t>(t);
    const std::size_t state = scene.rotation_states[t];
    const TranslationGrid tgrid = build_translation_grid(translations[t], half, config.translation_counts);
    scene.translation_states.push_back(tgrid.center_index());
    scene.ground_truth.frames.push_back(
        TrackFrame{id, grid[state], tgrid[tgrid.center_index()], state, tgrid.center_index()});
    const SimilarityTransform truth = scene.ground_truth.transform(t);

    const bool adversarial = static_cast<std::int64_t>(t) == config.synth_adversarial_frame;
    const SimilarityTransform observed_pose =
        adversarial ? SimilarityTransform(grid[farthest_state(grid, grid[state])], truth.translation(), truth.scale())
                    : truth;

    std::mt19937_64 noise_rng(derive_seed(config.seed, kNoise, t));
    std::normal_distribution<double> noise(0.0, config.synth_noise_std);
    std::vector<Vec3> points;
    std::vector<Vec3> colors;
    std::vector<PointLabel> labels;
    for (const Vec3& p : samples) {
      Vec3 q = observed_pose.apply(p);
      if (config.synth_noise_std > 0) q += Vec3(noise(noise_rng), noise(noise_rng), noise(noise_rng));
      points.push_back(q);
      colors.emplace_back(0.6, 0.6, 0.65);
      labels.push_back(PointLabel::kObject);
    }

    const Vec3 hand_center = truth.translation() + Vec3(0.045, 0.012, -0.01);
    TriangleMesh hand = apply_pose(make_ellipsoid(Vec3(0.03, 0.015, 0.012), 10, 16),
                                   SimilarityTransform(Quat::Identity(), hand_center));
    if (config.synth_hand_points > 0) {
      const std::vector<Vec3> hits = sample_hand_points(hand, scene.camera).hit_points();
      if (!hits.empty()) {
        const PointCloud subset = resample_point_cloud(
            PointCloud(hits), static_cast<std::size_t>(config.synth_hand_points), derive_seed(config.seed, kHandSubset, t));
        for (const Vec3& p : subset.points()) {
          points.push_back(p);
          colors.emplace_back(0.85, 0.65, 0.55);
          labels.push_back(PointLabel::kHand);
        }
      }
    }
    scene.clouds.emplace_back(std::move(points), std::move(colors), std::move(labels));
    scene.hands.push_back(std::move(hand));
    scene.features.push_back(render_field_features(scene.model, truth, scene.camera, scene.field));
  }
  return scene;
}

void write_synthetic_scene(const std::filesystem::path& directory, const SyntheticScene& scene, const RunConfig& config) {
  std::filesystem::create_directories(directory);
  write_obj(directory / "model.obj", scene.model);
  for (std::size_t t = 0; t < scene.clouds.size(); ++t) {
    const std::int64_t id = scene.ground_truth.frames[t].t;
    write_ply_cloud(frame_file(directory, "cloud", id, ".ply"), scene.clouds[t]);
    write_feature_map(frame_file(directory, "features", id, ".fmap"), scene.features[t]);
    write_pgm_mask(frame_file(directory, "mask", id, ".pgm"), scene.features[t].mask());
    write_obj(frame_file(directory, "hand", id, ".obj"), scene.hands[t]);
    write_ply_mesh(frame_file(directory, "gt", id, ".ply"), apply_pose(scene.model, scene.ground_truth.transform(t)));
  }
  write_text_file(directory / "ground_truth.json", track_to_json(scene.ground_truth));

  nlohmann::ordered_json j;
  j["rotation_states"] = scene.rotation_states;
  j["translation_states"] = scene.translation_states;
  j["adversarial_frame"] = scene.adversarial_frame;
  write_text_file(directory / "scene.json", j.dump(2) + "\n");

  RunConfig run = config;
  run.base_dir.clear();
  run.model = "model.obj";
  run.data_dir = ".";
  run.num_frames = static_cast<std::int64_t>(scene.clouds.size());
  run.track.clear();
  run.evaluate = true;
  run.feature_source = FeatureSourceKind::kSynthetic;
  save_config(directory / "scene.cfg", run);
}

}  // namespace hoalign
