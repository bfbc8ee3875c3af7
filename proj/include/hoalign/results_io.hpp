#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "hoalign/align.hpp"
#include "hoalign/metrics.hpp"
#include "hoalign/sampling.hpp"

namespace hoalign {

// { "scale": s, "frames": [ { "t": int, "rotation_wxyz": [w,x,y,z], "translation_m": [x,y,z] } ] }
std::string track_to_json(const PoseTrack& track);
/// Grid state indices are not part of the format and come back as 0. Throws ParseError.
PoseTrack track_from_json(const std::string& text);
PoseTrack read_track(const std::filesystem::path& path);

struct EvaluationReport {
  std::vector<std::int64_t> frame_ids;
  std::vector<MetricReport> frames;
  MetricReport median;
};

// { "frames": [ { "t": int, "metrics": {...} } ], "median": {...} } where each metrics object has
// exactly chamfer_cm2, f5, f10, precision_5mm, recall_5mm, precision_10mm, recall_10mm.
std::string metrics_to_json(const EvaluationReport& report);

// { "mean": [x,y,z], "sigma": v, "s": v, "hit_pixels": n, "width": w, "height": h }
std::string normalization_to_json(const NormalizationParams& params, std::size_t hit_pixels, int width, int height);

/// Writes `text` to `path`; throws ConfigError when the file cannot be created.
void write_text_file(const std::filesystem::path& path, const std::string& text);
std::string read_text_file(const std::filesystem::path& path);

}  // namespace hoalign
