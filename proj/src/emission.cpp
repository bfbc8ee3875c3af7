#include "hoalign/emission.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <random>
#include <string>

#include "hoalign/error.hpp"
#include "hoalign/feature_io.hpp"
#include "hoalign/metrics.hpp"
#include "hoalign/sampling.hpp"

namespace hoalign {

namespace {

double largest_centered_eigenvalue(std::span<const Vec3> points) {
  const Vec3 mu = mean_point(points);
  Mat3 m = Mat3::Zero();
  for (const Vec3& p : points) {
    const Vec3 c = p - mu;
    m += c * c.transpose();
  }
  const Eigen::SelfAdjointEigenSolver<Mat3> eig(m, Eigen::EigenvaluesOnly);
  return eig.eigenvalues()[2];
}

}  // namespace

double estimate_scale(std::span<const Vec3> observed, std::span<const Vec3> model) {
  if (observed.size() < 2 || model.size() < 2) {
    fail(ErrorKind::kDegenerateCloud, "scale estimation needs at least 2 points per set");
  }
  // Normalize by count so sets of different sizes compare by extent, not by cardinality.
  const double lx = largest_centered_eigenvalue(observed) / static_cast<double>(observed.size());
  const double ly = largest_centered_eigenvalue(model) / static_cast<double>(model.size());
  if (!(ly > 0.0)) fail(ErrorKind::kDegenerateCloud, "model points have no extent");
  if (!(lx > 0.0)) fail(ErrorKind::kDegenerateCloud, "observed points have no extent");
  return std::sqrt(lx) / std::sqrt(ly);
}

RenderedFeatureSource::RenderedFeatureSource(TriangleMesh model, Camera camera, std::vector<FeatureMap> image_features,
                                             double epsilon)
    : model_(std::move(model)), camera_(camera), image_features_(std::move(image_features)), epsilon_(epsilon) {
  camera_.validate();
  for (std::size_t t = 0; t < image_features_.size(); ++t) {
    const auto& f = image_features_[t];
    if (f.width() != camera_.width || f.height() != camera_.height) {
      fail(ErrorKind::kSizeMismatch, "frame " + std::to_string(t) + ": feature map size differs from the camera image");
    }
  }
  basis_ = pca_basis(image_features_);
}

std::optional<double> RenderedFeatureSource::dino_term(const CandidateView& view) const {
  if (view.frame >= image_features_.size()) fail(ErrorKind::kInvalidArgument, "candidate frame out of range");
  const Fragments fragments = rasterize(apply_pose(model_, view.pose), camera_);
  const FeatureMap rendered = render_features(view, fragments).with_mask(fragments.silhouette());
  try {
    return dino_similarity(rendered, image_features_[view.frame], basis_, epsilon_);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::kEmptyOverlap) return std::nullopt;
    throw;
  }
}

SyntheticFeatureField::SyntheticFeatureField(int channels, double wavelength, std::uint64_t seed)
    : wavelength_(wavelength) {
  if (channels < 3) fail(ErrorKind::kInvalidArgument, "synthetic feature field needs at least 3 channels");
  if (!(wavelength > 0.0)) fail(ErrorKind::kInvalidArgument, "synthetic feature wavelength must be positive");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int c = 0; c < channels; ++c) {
    Vec3 k(gauss(rng), gauss(rng), gauss(rng));
    directions_.push_back(k.normalized());
    phases_.push_back(2.0 * std::numbers::pi * unit_uniform(rng));
  }
}

void SyntheticFeatureField::evaluate(const Vec3& model_point, std::span<float> out) const {
  const double w = 2.0 * std::numbers::pi / wavelength_;
  for (std::size_t c = 0; c < directions_.size(); ++c) {
    out[c] = static_cast<float>(std::sin(w * directions_[c].dot(model_point) + phases_[c]));
  }
}

namespace {

FeatureMap field_features(const Fragments& fragments, const SimilarityTransform& pose, const Camera& camera,
                          const SyntheticFeatureField& field) {
  const auto channels = static_cast<std::size_t>(field.channels());
  std::vector<float> values(fragments.face.size() * channels, 0.0f);
  const SimilarityTransform to_model = pose.inverse();
  for (int row = 0; row < fragments.height; ++row) {
    for (int col = 0; col < fragments.width; ++col) {
      if (!fragments.covered(col, row)) continue;
      const double z = fragments.depth_at(col, row);
      const Vec3 ray((col + 0.5 - camera.cx) / camera.fx, (row + 0.5 - camera.cy) / camera.fy, 1.0);
      const Vec3 model_point = to_model.apply(z * ray);
      field.evaluate(model_point, std::span<float>(values).subspan(fragments.index(col, row) * channels, channels));
    }
  }
  return FeatureMap(fragments.width, fragments.height, field.channels(), std::move(values), fragments.silhouette());
}

}  // namespace

FeatureMap render_field_features(const TriangleMesh& model, const SimilarityTransform& pose, const Camera& camera,
                                 const SyntheticFeatureField& field) {
  return field_features(rasterize(apply_pose(model, pose), camera), pose, camera, field);
}

SyntheticFeatureSource::SyntheticFeatureSource(TriangleMesh model, Camera camera, std::vector<FeatureMap> image_features,
                                               SyntheticFeatureField field, double epsilon)
    : RenderedFeatureSource(std::move(model), camera, std::move(image_features), epsilon), field_(std::move(field)) {
  if (field_.channels() != basis().mean.size()) {
    fail(ErrorKind::kSizeMismatch, "synthetic field channel count differs from the image features");
  }
}

FeatureMap SyntheticFeatureSource::render_features(const CandidateView& view, const Fragments& fragments) const {
  return field_features(fragments, view.pose, camera(), field_);
}

IngestedFeatureMapSource::IngestedFeatureMapSource(TriangleMesh model, Camera camera,
                                                   std::vector<FeatureMap> image_features,
                                                   std::filesystem::path directory,
                                                   std::vector<std::int64_t> frame_ids, std::size_t rotation_states,
                                                   std::size_t translation_states, double epsilon)
    : RenderedFeatureSource(std::move(model), camera, std::move(image_features), epsilon),
      directory_(std::move(directory)),
      frame_ids_(std::move(frame_ids)) {
  const auto channels = basis().mean.size();
  auto check = [&](const std::filesystem::path& p) {
    if (!std::filesystem::exists(p)) fail(ErrorKind::kParseError, p.string() + ": missing rendered feature map");
    const FeatureMapHeader h = read_feature_map_header(p);
    if (h.width != this->camera().width || h.height != this->camera().height || h.channels != channels) {
      fail(ErrorKind::kParseError, p.string() + ": rendered feature map shape differs from the image features");
    }
  };
  for (std::int64_t id : frame_ids_) {
    for (std::size_t j = 0; j < rotation_states; ++j) check(map_path(directory_, Phase::kRotation, id, j));
  }
  has_translation_ = !frame_ids_.empty() && translation_states > 0 &&
                     std::filesystem::exists(map_path(directory_, Phase::kTranslation, frame_ids_.front(), 0));
  if (has_translation_) {
    for (std::int64_t id : frame_ids_) {
      for (std::size_t j = 0; j < translation_states; ++j) check(map_path(directory_, Phase::kTranslation, id, j));
    }
  }
}

std::filesystem::path IngestedFeatureMapSource::map_path(const std::filesystem::path& directory, Phase phase,
                                                         std::int64_t frame_id, std::size_t state) {
  char name[96];
  std::snprintf(name, sizeof name, "%s_%06lld_%06zu.fmap", phase == Phase::kRotation ? "rotation" : "translation",
                static_cast<long long>(frame_id), state);
  return directory / name;
}

FeatureMap IngestedFeatureMapSource::render_features(const CandidateView& view, const Fragments&) const {
  return read_feature_map(map_path(directory_, view.phase, frame_ids_.at(view.frame), view.state));
}

TableFeatureSource::TableFeatureSource(EmissionTable rotation, std::optional<EmissionTable> translation)
    : rotation_(std::move(rotation)), translation_(std::move(translation)) {
  auto check = [](const EmissionTable& t) {
    for (double v : t.costs()) {
      if (!std::isnan(v) && (v < 0.0 || v > 1.0)) fail(ErrorKind::kParseError, "feature table value outside [0, 1]");
    }
  };
  check(rotation_);
  if (translation_) {
    check(*translation_);
    if (translation_->frames() != rotation_.frames()) {
      fail(ErrorKind::kSizeMismatch, "rotation and translation feature tables differ in frame count");
    }
  }
}

std::optional<double> TableFeatureSource::dino_term(const CandidateView& view) const {
  const EmissionTable* table = view.phase == Phase::kRotation ? &rotation_ : (translation_ ? &*translation_ : nullptr);
  if (!table) return std::nullopt;
  if (view.frame >= table->frames() || view.state >= table->states()) {
    fail(ErrorKind::kSizeMismatch, "feature table does not cover frame " + std::to_string(view.frame) + ", state " +
                                       std::to_string(view.state));
  }
  const double v = (*table)(view.frame, view.state);
  if (std::isnan(v)) return std::nullopt;
  return v;
}

PreparedModel::PreparedModel(TriangleMesh mesh, std::size_t samples, std::uint64_t seed)
    : mesh_(std::move(mesh)),
      samples_(sample_mesh_surface(mesh_, samples, seed).points()),
      index_(samples_) {}

PreparedFrame::PreparedFrame(const PointCloud& object_cloud, std::size_t samples, std::uint64_t seed)
    : points_(resample_point_cloud(object_cloud, samples, seed).points()),
      index_(points_),
      centroid_(mean_point(object_cloud.points())) {}

double posed_chamfer(const PreparedModel& model, const PreparedFrame& frame, const SimilarityTransform& pose) {
  const auto& observed = frame.points();
  const auto& samples = model.samples();
  if (observed.size() != samples.size()) fail(ErrorKind::kSizeMismatch, "observed and model sample counts differ");
  const SimilarityTransform to_model = pose.inverse();
  const double s2 = pose.scale() * pose.scale();
  double obs_to_model = 0.0;
  for (const Vec3& x : observed) obs_to_model += s2 * model.index().nearest(to_model.apply(x)).squared_distance;
  double model_to_obs = 0.0;
  for (const Vec3& y : samples) model_to_obs += frame.index().nearest(pose.apply(y)).squared_distance;
  const double n = static_cast<double>(observed.size());
  return kSquaredMetersToSquaredCm * (obs_to_model / n) + kSquaredMetersToSquaredCm * (model_to_obs / n);
}

EmissionTerms evaluate_state(const PreparedModel& model, const PreparedFrame& frame, const FeatureSource& source,
                             const CandidateView& view) {
  EmissionTerms terms;
  terms.chamfer_cm2 = posed_chamfer(model, frame, view.pose);
  if (source.provides(view.phase)) terms.dino = source.dino_term(view);
  return terms;
}

double emission_cost(const EmissionTerms& terms, const EmissionWeights& weights, bool use_dino, double overlap_penalty) {
  if (!use_dino || weights.dino == 0.0) return weights.chamfer * terms.chamfer_cm2;
  if (!terms.dino) return overlap_penalty;
  return weights.chamfer * terms.chamfer_cm2 + weights.dino * *terms.dino;
}

namespace {

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  void add(double v) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  double normalize(double v) const { return hi > lo ? (v - lo) / (hi - lo) : 0.0; }
};

}  // namespace

std::vector<double> combine_emission_row(std::span<const EmissionTerms> terms, const EmissionOptions& options,
                                         bool use_dino) {
  const EmissionWeights& w = options.weights;
  bool any_dino = false;
  for (const auto& t : terms) any_dino = any_dino || t.dino.has_value();
  use_dino = use_dino && any_dino && w.dino != 0.0;

  Range cd_range, dino_range;
  for (const auto& t : terms) {
    cd_range.add(t.chamfer_cm2);
    if (t.dino) dino_range.add(*t.dino);
  }

  std::vector<double> costs(terms.size(), 0.0);
  std::vector<double> valid;
  for (std::size_t j = 0; j < terms.size(); ++j) {
    const auto& t = terms[j];
    if (use_dino && !t.dino) continue;
    const double cd = options.normalize ? cd_range.normalize(t.chamfer_cm2) : t.chamfer_cm2;
    double cost = w.chamfer * cd;
    if (use_dino) cost += w.dino * (options.normalize ? dino_range.normalize(*t.dino) : *t.dino);
    costs[j] = cost;
    valid.push_back(cost);
  }
  if (valid.size() == terms.size()) return costs;

  std::vector<double> sorted = valid;
  std::sort(sorted.begin(), sorted.end());
  double penalty = options.empty_overlap_factor * sorted[(sorted.size() - 1) / 2];
  // Keep missing-overlap states strictly worse than every scored state.
  if (!(penalty > sorted.back())) penalty = sorted.back() + std::max(1.0, w.chamfer + w.dino);
  for (std::size_t j = 0; j < terms.size(); ++j) {
    if (!terms[j].dino) costs[j] = penalty;
  }
  return costs;
}

}  // namespace hoalign
