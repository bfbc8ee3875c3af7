#include "hoalign/pipeline.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include "hoalign/error.hpp"
#include "hoalign/feature_io.hpp"
#include "hoalign/mesh_io.hpp"
#include "hoalign/metrics.hpp"
#include "hoalign/parallel.hpp"
#include "hoalign/sampling.hpp"

namespace hoalign {

namespace {

enum EvalStream : std::uint64_t { kPredictionSamples = 3, kTruthSamples = 4 };

std::filesystem::path require_file(const std::filesystem::path& p, const std::string& what) {
  if (!std::filesystem::is_regular_file(p)) fail(ErrorKind::kParseError, p.string() + ": missing " + what);
  return p;
}

// First existing candidate; the error names the first one.
std::filesystem::path require_one_of(const std::vector<std::filesystem::path>& candidates, const std::string& what) {
  for (const auto& p : candidates) {
    if (std::filesystem::is_regular_file(p)) return p;
  }
  return require_file(candidates.front(), what);
}

GroundTruth read_ground_truth(const std::filesystem::path& dir, std::int64_t id) {
  const auto path = require_one_of({frame_file(dir, "gt", id, ".ply"), frame_file(dir, "gt", id, ".obj")},
                                   "ground-truth geometry");
  if (path.extension() == ".obj") return read_obj(path);
  if (ply_has_faces(path)) return read_ply_mesh(path);
  PointCloud cloud = read_ply_cloud(path);
  if (cloud.empty()) fail(ErrorKind::kParseError, path.string() + ": ground-truth cloud has no points");
  return cloud;
}

std::vector<FeatureMap> read_image_features(const std::filesystem::path& dir, std::span<const std::int64_t> ids,
                                            const Camera& camera) {
  std::vector<FeatureMap> maps;
  for (std::int64_t id : ids) {
    const auto path = require_file(frame_file(dir, "features", id, ".fmap"), "image feature map");
    FeatureMap map = read_feature_map(path);
    if (map.width() != camera.width || map.height() != camera.height) {
      fail(ErrorKind::kParseError, path.string() + ": feature map size differs from the camera image size");
    }
    const auto mask_path = frame_file(dir, "mask", id, ".pgm");
    if (std::filesystem::is_regular_file(mask_path)) {
      BinaryMask mask = read_pgm_mask(mask_path);
      if (mask.width() != map.width() || mask.height() != map.height()) {
        fail(ErrorKind::kParseError, mask_path.string() + ": mask size differs from the feature map");
      }
      map = map.with_mask(std::move(mask));
    }
    maps.push_back(std::move(map));
  }
  return maps;
}

EmissionTable read_table(const std::filesystem::path& path, std::size_t frames, std::size_t states) {
  require_file(path, "emission table");
  EmissionTable table = read_emission_table(path);
  if (table.frames() != frames || table.states() != states) {
    fail(ErrorKind::kParseError, path.string() + ": table is " + std::to_string(table.frames()) + " x " +
                                     std::to_string(table.states()) + ", expected " + std::to_string(frames) +
                                     " x " + std::to_string(states));
  }
  return table;
}

std::size_t translation_state_count(const RunConfig& c) {
  return static_cast<std::size_t>(c.translation_counts[0]) * static_cast<std::size_t>(c.translation_counts[1]) *
         static_cast<std::size_t>(c.translation_counts[2]);
}

std::unique_ptr<FeatureSource> make_feature_source(const PipelineInputs& in, const std::filesystem::path& data_dir) {
  const RunConfig& c = in.config;
  switch (c.feature_source) {
    case FeatureSourceKind::kNone:
      return std::make_unique<NoFeatureSource>();
    case FeatureSourceKind::kSynthetic:
      return std::make_unique<SyntheticFeatureSource>(
          in.model, in.camera, read_image_features(data_dir, in.frame_ids, in.camera),
          SyntheticFeatureField(c.synthetic_channels, c.synthetic_wavelength, c.synthetic_seed));
    case FeatureSourceKind::kMaps:
      return std::make_unique<IngestedFeatureMapSource>(
          in.model, in.camera, read_image_features(data_dir, in.frame_ids, in.camera), c.resolve(c.rendered_dir),
          in.frame_ids, in.rotations->size(), translation_state_count(c));
    case FeatureSourceKind::kTables: {
      const std::size_t frames = in.frame_ids.size();
      EmissionTable rot = read_table(c.resolve(c.dino_rotation_table), frames, in.rotations->size());
      std::optional<EmissionTable> trans;
      if (!c.dino_translation_table.empty()) {
        trans = read_table(c.resolve(c.dino_translation_table), frames, translation_state_count(c));
      }
      try {
        return std::make_unique<TableFeatureSource>(std::move(rot), std::move(trans));
      } catch (const Error& e) {
        fail(ErrorKind::kParseError, "feature tables: " + e.message());
      }
    }
  }
  fail(ErrorKind::kConfigError, "unknown feature source");
}

}  // namespace

PipelineInputs load_inputs(const RunConfig& config, Command command, const std::filesystem::path& out_dir) {
  config.validate();
  PipelineInputs in;
  in.config = config;
  in.camera = config.camera();
  try {
    in.camera.validate();
  } catch (const Error& e) {
    fail(ErrorKind::kConfigError, "camera: " + e.message());
  }
  const std::filesystem::path data_dir = config.resolve(config.data_dir);

  const bool needs_model = command != Command::kPrep;
  if (needs_model) {
    if (config.model.empty()) fail(ErrorKind::kConfigError, "'model': required");
    const auto path = require_file(config.resolve(config.model), "model mesh");
    in.model = read_mesh(path);
    if (in.model.empty()) fail(ErrorKind::kParseError, path.string() + ": model mesh has no faces");
  }

  if (command == Command::kEval) {
    const auto path = config.track.empty() ? out_dir / "track.json" : config.resolve(config.track);
    in.track = read_track(require_file(path, "pose track"));
    if (in.track->frames.empty()) fail(ErrorKind::kParseError, path.string() + ": track has no frames");
    for (const auto& f : in.track->frames) in.frame_ids.push_back(f.t);
  } else {
    const std::int64_t count = command == Command::kAlign ? 1 : config.num_frames;
    for (std::int64_t i = 0; i < count; ++i) in.frame_ids.push_back(config.first_frame + i);
  }

  if (command == Command::kAlign || command == Command::kTrack) {
    for (std::int64_t id : in.frame_ids) {
      const auto path = require_file(frame_file(data_dir, "cloud", id, ".ply"), "observed cloud");
      in.frames.push_back(FrameObservation{id, read_ply_cloud(path).select(PointLabel::kObject)});
    }
    in.rotations = build_rotation_grid(config.rotation_level);
    in.features = make_feature_source(in, data_dir);
  }

  const bool needs_truth = command == Command::kEval || (command == Command::kTrack && config.evaluate);
  if (needs_truth) {
    for (std::int64_t id : in.frame_ids) in.ground_truth.push_back(read_ground_truth(data_dir, id));
  }

  if (command == Command::kPrep) {
    for (std::int64_t id : in.frame_ids) {
      const auto path = require_one_of({frame_file(data_dir, "hand", id, ".ply"), frame_file(data_dir, "hand", id, ".obj")},
                                       "hand mesh");
      in.hands.push_back(read_mesh(path));
    }
  }
  return in;
}

EvaluationReport evaluate_track(const TriangleMesh& model, const PoseTrack& track,
                                std::span<const GroundTruth> ground_truth, const RunConfig& config) {
  if (ground_truth.size() != track.frames.size()) {
    fail(ErrorKind::kSizeMismatch, "ground truth count differs from the track length");
  }
  const auto n = static_cast<std::size_t>(config.eval_points);
  EvaluationReport report;
  report.frames.resize(track.frames.size());
  IcpOptions icp;
  icp.max_iters = config.icp_max_iters;
  icp.tol = config.icp_tol;
  icp.correspondence = Correspondence::kNearest;
  parallel_for(track.frames.size(), config.threads, [&](std::size_t i) {
    try {
      const auto pred_model = sample_mesh_surface(model, n, derive_seed(config.seed, kPredictionSamples, i));
      const std::vector<Vec3> pred = apply_pose(pred_model.points(), track.transform(i));
      const auto seed = derive_seed(config.seed, kTruthSamples, i);
      const PointCloud gt = std::holds_alternative<TriangleMesh>(ground_truth[i])
                                ? sample_mesh_surface(std::get<TriangleMesh>(ground_truth[i]), n, seed)
                                : resample_point_cloud(std::get<PointCloud>(ground_truth[i]), n, seed);
      const IcpResult fit = icp_with_scaling(pred, gt.points(), icp);
      report.frames[i] = evaluate_point_sets(apply_pose(pred, fit.transform), gt.points());
    } catch (const Error& e) {
      throw e.with_context("frame " + std::to_string(track.frames[i].t));
    }
  });
  for (const auto& f : track.frames) report.frame_ids.push_back(f.t);
  report.median = median_metrics(report.frames);
  return report;
}

PoseTrack run_align(const PipelineInputs& in) {
  const FrameAlignment a =
      align_single_frame(in.model, *in.rotations, in.frames.front(), *in.features, in.config.align_options());
  PoseTrack track;
  track.scale = a.scale;
  track.frames.push_back(
      TrackFrame{in.frames.front().frame_id, a.pose.rotation, a.pose.translation, a.rotation_state, a.translation_state});
  return track;
}

TrackResult run_track(const PipelineInputs& in) {
  TrackResult result;
  result.alignment = align_sequence(in.model, in.frames, *in.rotations, *in.features, in.config.align_options());
  if (!in.ground_truth.empty()) {
    result.evaluation = evaluate_track(in.model, result.alignment.track, in.ground_truth, in.config);
  }
  return result;
}

std::vector<PrepFrame> run_prep(const PipelineInputs& in) {
  std::vector<PrepFrame> out(in.hands.size());
  parallel_for(in.hands.size(), in.config.threads, [&](std::size_t i) {
    try {
      HandPointMap hits = sample_hand_points(in.hands[i], in.camera);
      const std::vector<Vec3> points = hits.hit_points();
      if (points.empty()) fail(ErrorKind::kEmptyCloud, "hand mesh is not visible from the camera");
      out[i] = PrepFrame{in.frame_ids[i], std::move(hits), normalize_points(points, in.config.normalization_s).params};
    } catch (const Error& e) {
      throw e.with_context("frame " + std::to_string(in.frame_ids[i]));
    }
  });
  return out;
}

void write_hand_map(const std::filesystem::path& path, const HandPointMap& hits, const NormalizationParams& params) {
  static_assert(std::endian::native == std::endian::little, "binary writers assume a little-endian host");
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::kConfigError, path.string() + ": cannot open for writing");
  const auto u32 = [&](std::uint32_t v) { out.write(reinterpret_cast<const char*>(&v), 4); };
  out.write("HMAP", 4);
  u32(1);
  u32(static_cast<std::uint32_t>(hits.height()));
  u32(static_cast<std::uint32_t>(hits.width()));
  std::vector<float> values;
  values.reserve(static_cast<std::size_t>(hits.width()) * static_cast<std::size_t>(hits.height()) * 3);
  for (int row = 0; row < hits.height(); ++row) {
    for (int col = 0; col < hits.width(); ++col) {
      if (!hits.is_hit(col, row)) {
        values.insert(values.end(), 3, std::numeric_limits<float>::quiet_NaN());
        continue;
      }
      const Vec3 q = params.normalize(hits.point(col, row));
      for (int k = 0; k < 3; ++k) values.push_back(static_cast<float>(q[k]));
    }
  }
  out.write(reinterpret_cast<const char*>(values.data()), static_cast<std::streamsize>(values.size() * sizeof(float)));
}

void write_track_outputs(const std::filesystem::path& out_dir, const TrackResult& result) {
  std::filesystem::create_directories(out_dir);
  write_text_file(out_dir / "track.json", track_to_json(result.alignment.track));
  write_emission_table(out_dir / "rotation_emissions.emit", result.alignment.rotation_emissions);
  write_emission_table(out_dir / "translation_emissions.emit", result.alignment.translation_emissions);
  if (result.evaluation) write_text_file(out_dir / "metrics.json", metrics_to_json(*result.evaluation));
}

void write_prep_outputs(const std::filesystem::path& out_dir, std::span<const PrepFrame> frames) {
  std::filesystem::create_directories(out_dir);
  for (const PrepFrame& f : frames) {
    const std::vector<Vec3> hits = f.hits.hit_points();
    write_hand_map(frame_file(out_dir, "hand_points", f.frame_id, ".hmap"), f.hits, f.params);
    write_text_file(frame_file(out_dir, "normalization", f.frame_id, ".json"),
                    normalization_to_json(f.params, hits.size(), f.hits.width(), f.hits.height()));
  }
}

std::string rotation_grid_csv(const RotationGrid& grid) {
  std::string out;
  char buf[128];
  for (const Quat& q : grid.rotations()) {
    const auto c = to_wxyz(q);
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g\n", c[0], c[1], c[2], c[3]);
    out += buf;
  }
  return out;
}

}  // namespace hoalign
