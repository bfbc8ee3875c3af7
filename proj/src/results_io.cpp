#include "hoalign/results_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "hoalign/error.hpp"

namespace hoalign {

using nlohmann::ordered_json;

namespace {

ordered_json metrics_object(const MetricReport& m) {
  ordered_json j;
  j["chamfer_cm2"] = m.chamfer_cm2;
  j["f5"] = m.f5;
  j["f10"] = m.f10;
  j["precision_5mm"] = m.precision_5mm;
  j["recall_5mm"] = m.recall_5mm;
  j["precision_10mm"] = m.precision_10mm;
  j["recall_10mm"] = m.recall_10mm;
  return j;
}

}  // namespace

std::string track_to_json(const PoseTrack& track) {
  ordered_json j;
  j["scale"] = track.scale;
  j["frames"] = ordered_json::array();
  for (const TrackFrame& f : track.frames) {
    const auto q = to_wxyz(f.rotation);
    ordered_json frame;
    frame["t"] = f.t;
    frame["rotation_wxyz"] = {q[0], q[1], q[2], q[3]};
    frame["translation_m"] = {f.translation.x(), f.translation.y(), f.translation.z()};
    j["frames"].push_back(std::move(frame));
  }
  return j.dump(2) + "\n";
}

PoseTrack track_from_json(const std::string& text) {
  try {
    const auto j = ordered_json::parse(text);
    PoseTrack track;
    track.scale = j.at("scale").get<double>();
    if (!(track.scale > 0)) fail(ErrorKind::kParseError, "track scale must be positive");
    for (const auto& f : j.at("frames")) {
      const auto q = f.at("rotation_wxyz").get<std::vector<double>>();
      const auto t = f.at("translation_m").get<std::vector<double>>();
      if (q.size() != 4 || t.size() != 3) fail(ErrorKind::kParseError, "track frame has wrong vector sizes");
      TrackFrame frame;
      frame.t = f.at("t").get<std::int64_t>();
      frame.rotation = quat_wxyz(q[0], q[1], q[2], q[3]);
      frame.translation = Vec3(t[0], t[1], t[2]);
      track.frames.push_back(frame);
    }
    return track;
  } catch (const ordered_json::exception& e) {
    fail(ErrorKind::kParseError, std::string("malformed track JSON: ") + e.what());
  }
}

PoseTrack read_track(const std::filesystem::path& path) {
  const std::string text = read_text_file(path);
  try {
    return track_from_json(text);
  } catch (const Error& e) {
    throw e.with_context(path.string());
  }
}

std::string metrics_to_json(const EvaluationReport& report) {
  ordered_json j;
  j["frames"] = ordered_json::array();
  for (std::size_t i = 0; i < report.frames.size(); ++i) {
    ordered_json f;
    f["t"] = report.frame_ids[i];
    f["metrics"] = metrics_object(report.frames[i]);
    j["frames"].push_back(std::move(f));
  }
  j["median"] = metrics_object(report.median);
  return j.dump(2) + "\n";
}

std::string normalization_to_json(const NormalizationParams& params, std::size_t hit_pixels, int width, int height) {
  ordered_json j;
  j["mean"] = {params.mean.x(), params.mean.y(), params.mean.z()};
  j["sigma"] = params.sigma;
  j["s"] = params.s;
  j["hit_pixels"] = hit_pixels;
  j["width"] = width;
  j["height"] = height;
  return j.dump(2) + "\n";
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::kConfigError, path.string() + ": cannot open for writing");
  out << text;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::kParseError, path.string() + ": cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace hoalign
