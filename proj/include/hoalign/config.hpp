#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>

#include "hoalign/align.hpp"
#include "hoalign/geometry.hpp"

namespace hoalign {

enum class FeatureSourceKind { kNone, kSynthetic, kTables, kMaps };

std::string_view to_string(FeatureSourceKind kind);

/// Flat `key = value` run configuration. Relative paths are resolved against `base_dir`, the
/// directory of the file the configuration was read from.
struct RunConfig {
  std::filesystem::path base_dir;  // not serialized

  // Inputs. Per-frame files live in `data_dir` and carry a zero-padded 6-digit frame id.
  std::string model;
  std::string data_dir = ".";
  std::int64_t first_frame = 0;
  std::int64_t num_frames = 1;
  std::string track;  // predicted track for `eval`
  bool evaluate = false;

  double fx = 200.0;
  double fy = 200.0;
  double cx = 32.0;
  double cy = 32.0;
  int width = 64;
  int height = 64;

  int rotation_level = 2;
  std::array<double, 3> translation_half_extent = {0.05, 0.05, 0.05};
  std::array<int, 3> translation_counts = {5, 5, 5};

  double w_cd = 1.0;
  double w_dino = 1.0;
  double lambda_rot = 1.0;
  double lambda_trans = 1.0;
  bool normalize_emissions = true;
  double empty_overlap_factor = 10.0;

  double normalization_s = 0.7;
  std::uint64_t seed = 0;
  int threads = 1;

  FeatureSourceKind feature_source = FeatureSourceKind::kNone;
  int synthetic_channels = 8;
  double synthetic_wavelength = 0.5;  // model-frame units
  std::uint64_t synthetic_seed = 0;
  std::string dino_rotation_table;
  std::string dino_translation_table;
  std::string rendered_dir;

  std::int64_t model_samples = 1024;
  std::int64_t eval_points = 10000;
  int icp_max_iters = 100;
  double icp_tol = 1e-6;

  // Synthetic scene generation.
  std::int64_t synth_frames = 10;
  double synth_noise_std = 0.0;
  double synth_scale = 0.05;
  double synth_depth = 0.35;
  double synth_max_step = 0.4;
  std::int64_t synth_adversarial_frame = -1;
  std::int64_t synth_hand_points = 200;

  bool operator==(const RunConfig&) const = default;

  std::filesystem::path resolve(const std::string& path) const;
  Camera camera() const;
  AlignOptions align_options() const;
  /// Checks value ranges; throws ConfigError naming the offending key.
  void validate() const;
};

/// Parses config text. Unknown keys, duplicate keys and malformed values are ConfigErrors.
RunConfig parse_config(const std::string& text, const std::filesystem::path& base_dir = ".");
RunConfig load_config(const std::filesystem::path& path);
/// Every key in a fixed order; parse_config(serialize_config(c)) == c up to base_dir.
std::string serialize_config(const RunConfig& config);
void save_config(const std::filesystem::path& path, const RunConfig& config);

/// `<dir>/<prefix>_<id:06><extension>`
std::filesystem::path frame_file(const std::filesystem::path& dir, const std::string& prefix, std::int64_t frame_id,
                                 const std::string& extension);

}  // namespace hoalign
