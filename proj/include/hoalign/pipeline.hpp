#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <variant>
#include <vector>

#include "hoalign/align.hpp"
#include "hoalign/config.hpp"
#include "hoalign/emission.hpp"
#include "hoalign/grids.hpp"
#include "hoalign/raycast.hpp"
#include "hoalign/results_io.hpp"

namespace hoalign {

enum class Command { kAlign, kTrack, kEval, kPrep };

/// Ground truth of one frame: a mesh (sampled) or a point cloud (resampled).
using GroundTruth = std::variant<TriangleMesh, PointCloud>;

/// Everything a command needs, read and validated up front. Construction performs no
/// alignment work, so any missing or malformed file is reported before compute starts.
struct PipelineInputs {
  RunConfig config;
  Camera camera;
  std::vector<std::int64_t> frame_ids;
  TriangleMesh model;
  std::vector<FrameObservation> frames;      // align, track
  std::unique_ptr<FeatureSource> features;   // align, track
  std::optional<RotationGrid> rotations;     // align, track
  std::optional<PoseTrack> track;            // eval
  std::vector<GroundTruth> ground_truth;     // eval, or track with evaluate = true
  std::vector<TriangleMesh> hands;           // prep
};

PipelineInputs load_inputs(const RunConfig& config, Command command,
                           const std::filesystem::path& out_dir = {});

/// Evaluation protocol per frame: sample `eval_points` on the posed model and on the ground
/// truth (or resample a ground-truth cloud), register prediction to ground truth with
/// nearest-neighbor ICP with scaling from the identity, then score. The median is taken per
/// metric over frames.
EvaluationReport evaluate_track(const TriangleMesh& model, const PoseTrack& track,
                                std::span<const GroundTruth> ground_truth, const RunConfig& config);

struct TrackResult {
  SequenceAlignment alignment;
  std::optional<EvaluationReport> evaluation;
};

/// Single frame (the config's first frame); equals `run_track` on a one-frame config.
PoseTrack run_align(const PipelineInputs& inputs);
TrackResult run_track(const PipelineInputs& inputs);

struct PrepFrame {
  std::int64_t frame_id = 0;
  HandPointMap hits{1, 1};
  NormalizationParams params;
};

/// Ray-casts each frame's hand mesh and normalizes the visible hand points.
std::vector<PrepFrame> run_prep(const PipelineInputs& inputs);

// HMAP: "HMAP", u32 version = 1, u32 H, u32 W, H*W*3 float32 normalized hand points, NaN on miss.
void write_hand_map(const std::filesystem::path& path, const HandPointMap& hits, const NormalizationParams& params);

/// Writes the outputs of each command into `out_dir`.
void write_track_outputs(const std::filesystem::path& out_dir, const TrackResult& result);
void write_prep_outputs(const std::filesystem::path& out_dir, std::span<const PrepFrame> frames);

/// One `w,x,y,z` line per rotation, components printed with %.17g.
std::string rotation_grid_csv(const RotationGrid& grid);

}  // namespace hoalign
