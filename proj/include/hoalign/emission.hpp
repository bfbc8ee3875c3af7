#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "hoalign/emission_table.hpp"
#include "hoalign/features.hpp"
#include "hoalign/geometry.hpp"
#include "hoalign/image.hpp"
#include "hoalign/nn_index.hpp"
#include "hoalign/raster.hpp"

namespace hoalign {

/// sqrt(l_X) / sqrt(l_Y), with l the largest eigenvalue of the mean-centered second-moment
/// matrix of each set. Throws DegenerateCloud if the model set has no extent.
double estimate_scale(std::span<const Vec3> observed, std::span<const Vec3> model);

enum class Phase { kRotation, kTranslation };

/// One candidate pose being scored for one frame of the sequence.
struct CandidateView {
  std::size_t frame = 0;  // position in the sequence
  Phase phase = Phase::kRotation;
  std::size_t state = 0;  // index into the phase's state space
  SimilarityTransform pose;
};

/// Supplies the image-feature term of the emission cost. Implementations must be safe for
/// concurrent calls.
class FeatureSource {
 public:
  virtual ~FeatureSource() = default;
  virtual bool provides(Phase phase) const = 0;
  /// E_DINO in [0, 1]; nullopt when the candidate's silhouette misses the image mask.
  virtual std::optional<double> dino_term(const CandidateView& view) const = 0;
};

/// Chamfer-only alignment.
class NoFeatureSource final : public FeatureSource {
 public:
  bool provides(Phase) const override { return false; }
  std::optional<double> dino_term(const CandidateView&) const override { return std::nullopt; }
};

/// Renders the posed model, builds its feature map and compares it with the frame's image
/// features through a PCA basis pooled over all frames. Subclasses decide what the rendered
/// features are; the rendered mask is always the rasterized silhouette.
class RenderedFeatureSource : public FeatureSource {
 public:
  /// `image_features[t]` carries frame t's features with its object silhouette as mask.
  RenderedFeatureSource(TriangleMesh model, Camera camera, std::vector<FeatureMap> image_features,
                        double epsilon = kDinoEpsilon);

  bool provides(Phase) const override { return true; }
  std::optional<double> dino_term(const CandidateView& view) const override;

  const PCABasis& basis() const { return basis_; }
  const Camera& camera() const { return camera_; }
  const TriangleMesh& model() const { return model_; }

 protected:
  /// Features of the rendered candidate; the returned mask is ignored.
  virtual FeatureMap render_features(const CandidateView& view, const Fragments& fragments) const = 0;

 private:
  TriangleMesh model_;
  Camera camera_;
  std::vector<FeatureMap> image_features_;
  PCABasis basis_;
  double epsilon_;
};

/// Smooth deterministic feature field over model-frame coordinates:
/// f_c(p) = sin(2 pi <k_c, p> / wavelength + phase_c) for random unit directions k_c.
class SyntheticFeatureField {
 public:
  SyntheticFeatureField(int channels, double wavelength, std::uint64_t seed);

  int channels() const { return static_cast<int>(directions_.size()); }
  double wavelength() const { return wavelength_; }
  void evaluate(const Vec3& model_point, std::span<float> out) const;

 private:
  std::vector<Vec3> directions_;
  std::vector<double> phases_;
  double wavelength_;
};

/// Features of the posed model under `camera`, with the rasterized silhouette as mask.
FeatureMap render_field_features(const TriangleMesh& model, const SimilarityTransform& pose, const Camera& camera,
                                 const SyntheticFeatureField& field);

/// Test and verification source: rendered features come from a known field painted on the model.
class SyntheticFeatureSource final : public RenderedFeatureSource {
 public:
  SyntheticFeatureSource(TriangleMesh model, Camera camera, std::vector<FeatureMap> image_features,
                         SyntheticFeatureField field, double epsilon = kDinoEpsilon);

 protected:
  FeatureMap render_features(const CandidateView& view, const Fragments& fragments) const override;

 private:
  SyntheticFeatureField field_;
};

/// Rendered-candidate features produced by an external extractor, one FMAP per (phase, frame,
/// state): `<dir>/rotation_<frame:06>_<state:06>.fmap` and `translation_...`. Headers of all
/// rotation maps are validated at construction; translation maps are optional as a set.
class IngestedFeatureMapSource final : public RenderedFeatureSource {
 public:
  IngestedFeatureMapSource(TriangleMesh model, Camera camera, std::vector<FeatureMap> image_features,
                           std::filesystem::path directory, std::vector<std::int64_t> frame_ids,
                           std::size_t rotation_states, std::size_t translation_states,
                           double epsilon = kDinoEpsilon);

  static std::filesystem::path map_path(const std::filesystem::path& directory, Phase phase, std::int64_t frame_id,
                                        std::size_t state);

  bool provides(Phase phase) const override { return phase == Phase::kRotation || has_translation_; }

 protected:
  FeatureMap render_features(const CandidateView& view, const Fragments& fragments) const override;

 private:
  std::filesystem::path directory_;
  std::vector<std::int64_t> frame_ids_;
  bool has_translation_ = false;
};

/// Precomputed E_DINO values: rotation table T x |R|, optional translation table T x |T|.
/// NaN entries mean the candidate silhouette missed the image mask.
class TableFeatureSource final : public FeatureSource {
 public:
  explicit TableFeatureSource(EmissionTable rotation, std::optional<EmissionTable> translation = std::nullopt);

  bool provides(Phase phase) const override { return phase == Phase::kRotation || translation_.has_value(); }
  std::optional<double> dino_term(const CandidateView& view) const override;

 private:
  EmissionTable rotation_;
  std::optional<EmissionTable> translation_;
};

/// Model mesh with a fixed set of surface samples (model frame) and their index.
class PreparedModel {
 public:
  PreparedModel(TriangleMesh mesh, std::size_t samples, std::uint64_t seed);

  const TriangleMesh& mesh() const { return mesh_; }
  const std::vector<Vec3>& samples() const { return samples_; }
  const NearestNeighborIndex& index() const { return index_; }

 private:
  TriangleMesh mesh_;
  std::vector<Vec3> samples_;
  NearestNeighborIndex index_;
};

/// Observed object cloud resampled to the model's sample count, with its index and centroid.
class PreparedFrame {
 public:
  PreparedFrame(const PointCloud& object_cloud, std::size_t samples, std::uint64_t seed);

  const std::vector<Vec3>& points() const { return points_; }
  const NearestNeighborIndex& index() const { return index_; }
  const Vec3& centroid() const { return centroid_; }

 private:
  std::vector<Vec3> points_;
  NearestNeighborIndex index_;
  Vec3 centroid_;
};

/// Chamfer distance (cm^2) between the frame's observed points and the model samples posed by
/// `pose`. Equal to chamfer_distance(observed, apply_pose(samples, pose)).
double posed_chamfer(const PreparedModel& model, const PreparedFrame& frame, const SimilarityTransform& pose);

struct EmissionTerms {
  double chamfer_cm2 = 0.0;
  std::optional<double> dino;  // absent: no feature term, or empty silhouette overlap
};

EmissionTerms evaluate_state(const PreparedModel& model, const PreparedFrame& frame, const FeatureSource& source,
                             const CandidateView& view);

struct EmissionWeights {
  double chamfer = 1.0;
  double dino = 1.0;
};

/// Raw weighted sum of one state's terms; a missing feature term is replaced by `overlap_penalty`
/// as the whole cost.
double emission_cost(const EmissionTerms& terms, const EmissionWeights& weights, bool use_dino,
                     double overlap_penalty);

struct EmissionOptions {
  EmissionWeights weights;
  /// Min-max normalize each term over the frame's state space before weighting.
  bool normalize = true;
  /// Empty-overlap states cost this multiple of the frame's median valid cost.
  double empty_overlap_factor = 10.0;
};

/// Combines one frame's per-state terms into costs. When `use_dino` is false, or no state has a
/// feature term, the row is chamfer-only.
std::vector<double> combine_emission_row(std::span<const EmissionTerms> terms, const EmissionOptions& options,
                                         bool use_dino);

}  // namespace hoalign
