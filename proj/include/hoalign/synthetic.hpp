#pragma once

#include <filesystem>
#include <vector>

#include "hoalign/align.hpp"
#include "hoalign/config.hpp"
#include "hoalign/emission.hpp"
#include "hoalign/geometry.hpp"
#include "hoalign/image.hpp"

namespace hoalign {

/// A scene with known ground truth, generated from the `synth_*`, camera, grid and
/// `synthetic_*` keys of a RunConfig.
///
/// The model is a lumpy, asymmetric closed surface about one unit across, shifted so that the
/// mean of its observation samples is the origin. Every frame observes the same model-frame
/// samples under the frame's ground-truth pose, plus isotropic Gaussian noise of
/// `synth_noise_std` per axis, plus hand points ray-cast from an ellipsoidal hand mesh next to
/// the object. Rotations follow a slerp between two random grid states snapped to the grid;
/// translations move on a small arc in front of the camera. On the adversarial frame (if any)
/// the cloud is generated with the grid rotation farthest from the true one, while the image
/// features stay truthful.
struct SyntheticScene {
  TriangleMesh model;
  Camera camera;
  PoseTrack ground_truth;
  std::vector<std::size_t> rotation_states;
  std::vector<std::size_t> translation_states;
  std::vector<PointCloud> clouds;  // labeled: object and hand points
  std::vector<TriangleMesh> hands;
  std::vector<FeatureMap> features;
  SyntheticFeatureField field{8, 0.5, 0};
  std::int64_t adversarial_frame = -1;
};

SyntheticScene generate_synthetic_scene(const RunConfig& config);

/// Writes model.obj, cloud/features/mask/hand/gt files per frame, ground_truth.json, scene.json
/// and a ready-to-run scene.cfg into `directory`. Frame ids start at config.first_frame.
void write_synthetic_scene(const std::filesystem::path& directory, const SyntheticScene& scene,
                           const RunConfig& config);

/// The lumpy model used by synthetic scenes, before recentering.
TriangleMesh make_lumpy_model(int rings, int segments);

/// Closed ellipsoid mesh centered at the origin.
TriangleMesh make_ellipsoid(const Vec3& radii, int rings, int segments);

}  // namespace hoalign
