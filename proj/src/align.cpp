#include "hoalign/align.hpp"

#include <algorithm>
#include <string>

#include "hoalign/error.hpp"
#include "hoalign/parallel.hpp"

namespace hoalign {

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream, std::uint64_t index) {
  std::uint64_t z = base + 0x9E3779B97F4A7C15ull * (stream + 1) + 0xBF58476D1CE4E5B9ull * index;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

std::vector<double> rotation_transition_matrix(const RotationGrid& rotations) {
  const std::size_t s = rotations.size();
  std::vector<Mat3> mats;
  mats.reserve(s);
  for (const Quat& q : rotations.rotations()) mats.push_back(q.toRotationMatrix());
  std::vector<double> out(s * s, 0.0);
  for (std::size_t i = 0; i < s; ++i) {
    for (std::size_t j = i + 1; j < s; ++j) out[i * s + j] = out[j * s + i] = rodrigues_error(mats[i], mats[j]);
  }
  return out;
}

namespace {

enum SeedStream : std::uint64_t { kModelSamples = 1, kFrameResample = 2 };

struct Prepared {
  PreparedModel model;
  std::vector<PreparedFrame> frames;
  std::vector<double> frame_scales;
  double scale = 1.0;
};

Prepared prepare(const TriangleMesh& model, std::span<const FrameObservation> frames, const AlignOptions& options) {
  if (frames.empty()) fail(ErrorKind::kEmptyList, "no frames to align");
  if (options.model_samples < 3) fail(ErrorKind::kInvalidArgument, "model_samples must be at least 3");
  Prepared p{PreparedModel(model, options.model_samples, derive_seed(options.seed, kModelSamples)), {}, {}, 1.0};
  for (std::size_t t = 0; t < frames.size(); ++t) {
    const auto& obs = frames[t];
    if (obs.object.empty()) {
      fail(ErrorKind::kEmptyCloud, "frame " + std::to_string(obs.frame_id) + ": no object points");
    }
    try {
      p.frame_scales.push_back(estimate_scale(obs.object.points(), p.model.samples()));
    } catch (const Error& e) {
      throw e.with_context("frame " + std::to_string(obs.frame_id));
    }
    p.frames.emplace_back(obs.object, options.model_samples, derive_seed(options.seed, kFrameResample, t));
  }
  std::vector<double> sorted = p.frame_scales;
  std::sort(sorted.begin(), sorted.end());
  p.scale = sorted[(sorted.size() - 1) / 2];
  return p;
}

template <typename PoseFn>
EmissionTable build_table(const Prepared& p, const FeatureSource& features, Phase phase, std::size_t states,
                          std::size_t position_offset, const PoseFn& pose_of, const AlignOptions& options) {
  const std::size_t frames = p.frames.size();
  std::vector<EmissionTerms> terms(frames * states);
  parallel_for(frames * states, options.threads, [&](std::size_t k) {
    const std::size_t t = k / states, j = k % states;
    const CandidateView view{position_offset + t, phase, j, pose_of(t, j)};
    terms[k] = evaluate_state(p.model, p.frames[t], features, view);
  });
  EmissionTable table(frames, states);
  const bool use_dino = features.provides(phase);
  for (std::size_t t = 0; t < frames; ++t) {
    const auto row = combine_emission_row(std::span<const EmissionTerms>(terms).subspan(t * states, states),
                                          options.emission, use_dino);
    std::copy(row.begin(), row.end(), table.row(t).begin());
  }
  return table;
}

EmissionTable rotation_table(const Prepared& p, const RotationGrid& rotations, const FeatureSource& features,
                             std::size_t position_offset, const AlignOptions& options) {
  if (rotations.size() == 0) fail(ErrorKind::kInvalidArgument, "empty rotation grid");
  return build_table(
      p, features, Phase::kRotation, rotations.size(), position_offset,
      [&](std::size_t t, std::size_t j) { return SimilarityTransform(rotations[j], p.frames[t].centroid(), p.scale); },
      options);
}

std::vector<TranslationGrid> translation_grids(const Prepared& p, const AlignOptions& options) {
  std::vector<TranslationGrid> grids;
  for (const auto& f : p.frames) {
    grids.push_back(build_translation_grid(f.centroid(), options.translation_half_extent, options.translation_counts));
  }
  return grids;
}

EmissionTable translation_table(const Prepared& p, const std::vector<TranslationGrid>& grids,
                                const std::vector<Quat>& frame_rotations, const FeatureSource& features,
                                std::size_t position_offset, const AlignOptions& options) {
  return build_table(
      p, features, Phase::kTranslation, grids.front().size(), position_offset,
      [&](std::size_t t, std::size_t j) { return SimilarityTransform(frame_rotations[t], grids[t][j], p.scale); },
      options);
}

std::size_t row_argmin(std::span<const double> row) {
  std::size_t arg = 0;
  for (std::size_t j = 1; j < row.size(); ++j) {
    if (row[j] < row[arg]) arg = j;
  }
  return arg;
}

}  // namespace

FrameAlignment align_single_frame(const TriangleMesh& model, const RotationGrid& rotations,
                                  const FrameObservation& observation, const FeatureSource& features,
                                  const AlignOptions& options, std::size_t frame_position) {
  const Prepared p = prepare(model, std::span<const FrameObservation>(&observation, 1), options);
  const EmissionTable rot = rotation_table(p, rotations, features, frame_position, options);
  const std::size_t r = row_argmin(rot.row(0));
  const auto grids = translation_grids(p, options);
  const EmissionTable trans = translation_table(p, grids, {rotations[r]}, features, frame_position, options);
  const std::size_t k = row_argmin(trans.row(0));
  return FrameAlignment{RigidPose{rotations[r], grids[0][k]}, p.scale, r, k};
}

SequenceAlignment align_sequence(const TriangleMesh& model, std::span<const FrameObservation> frames,
                                 const RotationGrid& rotations, const FeatureSource& features,
                                 const AlignOptions& options) {
  const Prepared p = prepare(model, frames, options);
  SequenceAlignment out;
  out.frame_scales = p.frame_scales;

  out.rotation_emissions = rotation_table(p, rotations, features, 0, options);
  const std::vector<double> angles = rotation_transition_matrix(rotations);
  const std::size_t n_rot = rotations.size();
  out.rotation_path = viterbi_decode(
      out.rotation_emissions, [&](std::size_t, std::size_t i, std::size_t j) { return angles[i * n_rot + j]; },
      options.lambda_rot);

  std::vector<Quat> decoded;
  for (std::size_t state : out.rotation_path.states) decoded.push_back(rotations[state]);

  out.translation_grids = translation_grids(p, options);
  out.translation_emissions = translation_table(p, out.translation_grids, decoded, features, 0, options);
  const auto& grids = out.translation_grids;
  out.translation_path = viterbi_decode(
      out.translation_emissions,
      [&](std::size_t t, std::size_t i, std::size_t j) { return (grids[t][j] - grids[t - 1][i]).norm(); },
      options.lambda_trans);

  out.track.scale = p.scale;
  for (std::size_t t = 0; t < frames.size(); ++t) {
    const std::size_t r = out.rotation_path.states[t];
    const std::size_t k = out.translation_path.states[t];
    out.track.frames.push_back(TrackFrame{frames[t].frame_id, rotations[r], grids[t][k], r, k});
  }
  return out;
}

}  // namespace hoalign
