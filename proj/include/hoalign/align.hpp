#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "hoalign/emission.hpp"
#include "hoalign/grids.hpp"
#include "hoalign/viterbi.hpp"

namespace hoalign {

struct FrameObservation {
  std::int64_t frame_id = 0;
  PointCloud object;  // object-labeled points of the observed cloud
};

struct AlignOptions {
  EmissionOptions emission;
  double lambda_rot = 1.0;    // per radian
  double lambda_trans = 1.0;  // per meter
  Vec3 translation_half_extent = Vec3::Constant(0.05);
  std::array<int, 3> translation_counts = {5, 5, 5};
  std::size_t model_samples = 1024;
  std::uint64_t seed = 0;
  int threads = 1;
};

struct TrackFrame {
  std::int64_t t = 0;
  Quat rotation = Quat::Identity();
  Vec3 translation = Vec3::Zero();
  std::size_t rotation_state = 0;
  std::size_t translation_state = 0;
};

/// Per-frame rigid poses sharing one global scale.
struct PoseTrack {
  double scale = 1.0;
  std::vector<TrackFrame> frames;

  SimilarityTransform transform(std::size_t i) const {
    return SimilarityTransform(frames[i].rotation, frames[i].translation, scale);
  }
};

struct FrameAlignment {
  RigidPose pose;
  double scale = 1.0;
  std::size_t rotation_state = 0;
  std::size_t translation_state = 0;
};

struct SequenceAlignment {
  PoseTrack track;
  std::vector<double> frame_scales;
  EmissionTable rotation_emissions;
  EmissionTable translation_emissions;
  StatePath rotation_path;
  StatePath translation_path;
  std::vector<TranslationGrid> translation_grids;
};

/// Derives an independent stream seed from a base seed (splitmix64 mixing).
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream, std::uint64_t index = 0);

/// Rotation first with the model placed at the observed centroid, then translation over a
/// lattice around the centroid with that rotation fixed. Lowest state index wins ties.
FrameAlignment align_single_frame(const TriangleMesh& model, const RotationGrid& rotations,
                                  const FrameObservation& observation, const FeatureSource& features,
                                  const AlignOptions& options, std::size_t frame_position = 0);

/// Scale from the median of per-frame estimates, then a Viterbi pass over rotations
/// (Rodrigues transitions, translation pinned at each frame's centroid) and a Viterbi pass over
/// per-frame translation lattices (Euclidean transitions) with the decoded rotations fixed.
SequenceAlignment align_sequence(const TriangleMesh& model, std::span<const FrameObservation> frames,
                                 const RotationGrid& rotations, const FeatureSource& features,
                                 const AlignOptions& options);

/// Pairwise Rodrigues angles of the grid rotations, row-major S x S.
std::vector<double> rotation_transition_matrix(const RotationGrid& rotations);

}  // namespace hoalign
