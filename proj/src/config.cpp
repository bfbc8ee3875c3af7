#include "hoalign/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <vector>

#include "hoalign/error.hpp"

namespace hoalign {

std::string_view to_string(FeatureSourceKind kind) {
  switch (kind) {
    case FeatureSourceKind::kNone: return "none";
    case FeatureSourceKind::kSynthetic: return "synthetic";
    case FeatureSourceKind::kTables: return "tables";
    case FeatureSourceKind::kMaps: return "maps";
  }
  return "none";
}

namespace {

[[noreturn]] void config_fail(const std::string& key, const std::string& what) {
  fail(ErrorKind::kConfigError, "'" + key + "': " + what);
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_double(const std::string& key, const std::string& text) {
  double v = 0.0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end || !std::isfinite(v)) config_fail(key, "expected a finite number, got '" + text + "'");
  return v;
}

template <typename Int>
Int parse_int(const std::string& key, const std::string& text) {
  Int v = 0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end) config_fail(key, "expected an integer, got '" + text + "'");
  return v;
}

bool parse_bool(const std::string& key, const std::string& text) {
  if (text == "true") return true;
  if (text == "false") return false;
  config_fail(key, "expected true or false, got '" + text + "'");
}

std::vector<std::string> split_triple(const std::string& key, const std::string& text) {
  std::string spaced = text;
  for (char& c : spaced) {
    if (c == ',') c = ' ';
  }
  std::istringstream ss(spaced);
  std::vector<std::string> parts;
  for (std::string p; ss >> p;) parts.push_back(p);
  if (parts.size() != 3) config_fail(key, "expected three values, got '" + text + "'");
  return parts;
}

struct Field {
  std::string key;
  std::function<std::string(const RunConfig&)> get;
  std::function<void(RunConfig&, const std::string&)> set;
};

template <typename T>
Field number_field(const std::string& key, T RunConfig::*member) {
  Field f{key, {}, {}};
  if constexpr (std::is_floating_point_v<T>) {
    f.get = [member](const RunConfig& c) { return format_double(c.*member); };
    f.set = [member, key](RunConfig& c, const std::string& v) { c.*member = parse_double(key, v); };
  } else {
    f.get = [member](const RunConfig& c) { return std::to_string(c.*member); };
    f.set = [member, key](RunConfig& c, const std::string& v) { c.*member = parse_int<T>(key, v); };
  }
  return f;
}

Field string_field(const std::string& key, std::string RunConfig::*member) {
  return {key, [member](const RunConfig& c) { return c.*member; },
          [member](RunConfig& c, const std::string& v) { c.*member = v; }};
}

Field bool_field(const std::string& key, bool RunConfig::*member) {
  return {key, [member](const RunConfig& c) { return std::string(c.*member ? "true" : "false"); },
          [member, key](RunConfig& c, const std::string& v) { c.*member = parse_bool(key, v); }};
}

template <typename T>
Field triple_field(const std::string& key, std::array<T, 3> RunConfig::*member) {
  return {key,
          [member](const RunConfig& c) {
            std::string out;
            for (int i = 0; i < 3; ++i) {
              if (i) out += ' ';
              if constexpr (std::is_floating_point_v<T>) {
                out += format_double((c.*member)[i]);
              } else {
                out += std::to_string((c.*member)[i]);
              }
            }
            return out;
          },
          [member, key](RunConfig& c, const std::string& v) {
            const auto parts = split_triple(key, v);
            for (int i = 0; i < 3; ++i) {
              if constexpr (std::is_floating_point_v<T>) {
                (c.*member)[i] = parse_double(key, parts[i]);
              } else {
                (c.*member)[i] = parse_int<T>(key, parts[i]);
              }
            }
          }};
}

Field feature_source_field() {
  return {"feature_source", [](const RunConfig& c) { return std::string(to_string(c.feature_source)); },
          [](RunConfig& c, const std::string& v) {
            for (auto k : {FeatureSourceKind::kNone, FeatureSourceKind::kSynthetic, FeatureSourceKind::kTables,
                           FeatureSourceKind::kMaps}) {
              if (v == to_string(k)) {
                c.feature_source = k;
                return;
              }
            }
            config_fail("feature_source", "expected none, synthetic, tables or maps, got '" + v + "'");
          }};
}

const std::vector<Field>& fields() {
  static const std::vector<Field> table = {
      string_field("model", &RunConfig::model),
      string_field("data_dir", &RunConfig::data_dir),
      number_field("first_frame", &RunConfig::first_frame),
      number_field("num_frames", &RunConfig::num_frames),
      string_field("track", &RunConfig::track),
      bool_field("evaluate", &RunConfig::evaluate),
      number_field("fx", &RunConfig::fx),
      number_field("fy", &RunConfig::fy),
      number_field("cx", &RunConfig::cx),
      number_field("cy", &RunConfig::cy),
      number_field("width", &RunConfig::width),
      number_field("height", &RunConfig::height),
      number_field("rotation_level", &RunConfig::rotation_level),
      triple_field("translation_half_extent", &RunConfig::translation_half_extent),
      triple_field("translation_counts", &RunConfig::translation_counts),
      number_field("w_cd", &RunConfig::w_cd),
      number_field("w_dino", &RunConfig::w_dino),
      number_field("lambda_rot", &RunConfig::lambda_rot),
      number_field("lambda_trans", &RunConfig::lambda_trans),
      bool_field("normalize_emissions", &RunConfig::normalize_emissions),
      number_field("empty_overlap_factor", &RunConfig::empty_overlap_factor),
      number_field("normalization_s", &RunConfig::normalization_s),
      number_field("seed", &RunConfig::seed),
      number_field("threads", &RunConfig::threads),
      feature_source_field(),
      number_field("synthetic_channels", &RunConfig::synthetic_channels),
      number_field("synthetic_wavelength", &RunConfig::synthetic_wavelength),
      number_field("synthetic_seed", &RunConfig::synthetic_seed),
      string_field("dino_rotation_table", &RunConfig::dino_rotation_table),
      string_field("dino_translation_table", &RunConfig::dino_translation_table),
      string_field("rendered_dir", &RunConfig::rendered_dir),
      number_field("model_samples", &RunConfig::model_samples),
      number_field("eval_points", &RunConfig::eval_points),
      number_field("icp_max_iters", &RunConfig::icp_max_iters),
      number_field("icp_tol", &RunConfig::icp_tol),
      number_field("synth_frames", &RunConfig::synth_frames),
      number_field("synth_noise_std", &RunConfig::synth_noise_std),
      number_field("synth_scale", &RunConfig::synth_scale),
      number_field("synth_depth", &RunConfig::synth_depth),
      number_field("synth_max_step", &RunConfig::synth_max_step),
      number_field("synth_adversarial_frame", &RunConfig::synth_adversarial_frame),
      number_field("synth_hand_points", &RunConfig::synth_hand_points),
  };
  return table;
}

}  // namespace

std::filesystem::path RunConfig::resolve(const std::string& path) const {
  const std::filesystem::path p(path);
  if (p.is_absolute() || base_dir.empty()) return p;
  return base_dir / p;
}

Camera RunConfig::camera() const { return Camera{fx, fy, cx, cy, width, height}; }

AlignOptions RunConfig::align_options() const {
  AlignOptions o;
  o.emission.weights = EmissionWeights{w_cd, w_dino};
  o.emission.normalize = normalize_emissions;
  o.emission.empty_overlap_factor = empty_overlap_factor;
  o.lambda_rot = lambda_rot;
  o.lambda_trans = lambda_trans;
  o.translation_half_extent = Vec3(translation_half_extent[0], translation_half_extent[1], translation_half_extent[2]);
  o.translation_counts = translation_counts;
  o.model_samples = static_cast<std::size_t>(model_samples);
  o.seed = seed;
  o.threads = threads;
  return o;
}

void RunConfig::validate() const {
  if (num_frames < 1) config_fail("num_frames", "must be at least 1");
  if (first_frame < 0 || first_frame > 999999) config_fail("first_frame", "must be in [0, 999999]");
  if (first_frame + num_frames - 1 > 999999) config_fail("num_frames", "frame ids must stay below 1000000");
  if (!(fx > 0) || !(fy > 0)) config_fail("fx", "focal lengths must be positive");
  if (width < 1 || height < 1) config_fail("width", "image size must be positive");
  if (rotation_level < 0 || rotation_level > 8) config_fail("rotation_level", "must be in [0, 8]");
  for (double h : translation_half_extent) {
    if (h < 0) config_fail("translation_half_extent", "must be non-negative");
  }
  for (int n : translation_counts) {
    if (n < 1) config_fail("translation_counts", "must be at least 1 per axis");
  }
  if (w_cd < 0) config_fail("w_cd", "must be non-negative");
  if (w_dino < 0) config_fail("w_dino", "must be non-negative");
  if (lambda_rot < 0) config_fail("lambda_rot", "must be non-negative");
  if (lambda_trans < 0) config_fail("lambda_trans", "must be non-negative");
  if (!(empty_overlap_factor > 0)) config_fail("empty_overlap_factor", "must be positive");
  if (!(normalization_s > 0)) config_fail("normalization_s", "must be positive");
  if (threads < 1) config_fail("threads", "must be at least 1");
  if (synthetic_channels < 3) config_fail("synthetic_channels", "must be at least 3");
  if (!(synthetic_wavelength > 0)) config_fail("synthetic_wavelength", "must be positive");
  if (model_samples < 3) config_fail("model_samples", "must be at least 3");
  if (eval_points < 3) config_fail("eval_points", "must be at least 3");
  if (icp_max_iters < 1) config_fail("icp_max_iters", "must be at least 1");
  if (!(icp_tol >= 0)) config_fail("icp_tol", "must be non-negative");
  if (synth_frames < 1) config_fail("synth_frames", "must be at least 1");
  if (!(synth_noise_std >= 0)) config_fail("synth_noise_std", "must be non-negative");
  if (!(synth_scale > 0)) config_fail("synth_scale", "must be positive");
  if (!(synth_depth > 0)) config_fail("synth_depth", "must be positive");
  if (!(synth_max_step > 0)) config_fail("synth_max_step", "must be positive");
  if (synth_adversarial_frame >= synth_frames) config_fail("synth_adversarial_frame", "must be below synth_frames");
  if (synth_hand_points < 0) config_fail("synth_hand_points", "must be non-negative");
  if (feature_source == FeatureSourceKind::kTables && dino_rotation_table.empty()) {
    config_fail("dino_rotation_table", "required when feature_source = tables");
  }
  if (feature_source == FeatureSourceKind::kMaps && rendered_dir.empty()) {
    config_fail("rendered_dir", "required when feature_source = maps");
  }
}

RunConfig parse_config(const std::string& text, const std::filesystem::path& base_dir) {
  std::map<std::string, const Field*> by_key;
  for (const Field& f : fields()) by_key[f.key] = &f;

  RunConfig config;
  config.base_dir = base_dir;
  std::set<std::string> seen;
  std::istringstream in(text);
  std::string line;
  for (int line_no = 1; std::getline(in, line); ++line_no) {
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      fail(ErrorKind::kConfigError, "line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const auto it = by_key.find(key);
    if (it == by_key.end()) fail(ErrorKind::kConfigError, "line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    if (!seen.insert(key).second) config_fail(key, "given more than once");
    it->second->set(config, value);
  }
  return config;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::kConfigError, path.string() + ": cannot open config");
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return parse_config(ss.str(), path.parent_path());
  } catch (const Error& e) {
    throw e.with_context(path.string());
  }
}

std::string serialize_config(const RunConfig& config) {
  std::string out;
  for (const Field& f : fields()) out += f.key + " = " + f.get(config) + "\n";
  return out;
}

void save_config(const std::filesystem::path& path, const RunConfig& config) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::kConfigError, path.string() + ": cannot open for writing");
  out << serialize_config(config);
}

std::filesystem::path frame_file(const std::filesystem::path& dir, const std::string& prefix, std::int64_t frame_id,
                                 const std::string& extension) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%06lld", static_cast<long long>(frame_id));
  return dir / (prefix + "_" + buf + extension);
}

}  // namespace hoalign
