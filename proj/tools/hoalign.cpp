// hoalign command-line interface.
//
//   hoalign align --config run.cfg --out DIR     single-frame alignment (first_frame)
//   hoalign track --config run.cfg --out DIR     sequence alignment, plus metrics when evaluate = true
//   hoalign eval  --config run.cfg --out DIR     metrics for a predicted track
//   hoalign grid  [--level N] [--out DIR]         rotation grid as w,x,y,z CSV
//   hoalign prep  --config run.cfg --out DIR     hand-point sampling and normalization
//   hoalign synth [--config base.cfg] --out DIR  synthetic scene with a ready-to-run scene.cfg
//
// Exit codes: 0 success, 2 configuration or parse error, 3 numerical or degenerate input.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "hoalign/config.hpp"
#include "hoalign/error.hpp"
#include "hoalign/grids.hpp"
#include "hoalign/pipeline.hpp"
#include "hoalign/results_io.hpp"
#include "hoalign/synthetic.hpp"

namespace {

constexpr int kExitInput = 2;
constexpr int kExitNumerical = 3;

struct CommonFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  std::string out = ".";
};

void add_common(CLI::App* cmd, CommonFlags& flags, bool config_required) {
  auto* opt = cmd->add_option("--config", flags.config, "run configuration file");
  if (config_required) opt->required();
  cmd->add_option("--seed", flags.seed, "override the config seed");
  cmd->add_option("--threads", flags.threads, "worker threads")->check(CLI::PositiveNumber);
  cmd->add_option("--out", flags.out, "output directory");
}

hoalign::RunConfig resolve_config(const CommonFlags& flags) {
  hoalign::RunConfig config = flags.config.empty() ? hoalign::RunConfig{} : hoalign::load_config(flags.config);
  if (flags.seed) config.seed = *flags.seed;
  if (flags.threads) config.threads = *flags.threads;
  return config;
}

void run_align(const CommonFlags& flags) {
  const auto inputs = hoalign::load_inputs(resolve_config(flags), hoalign::Command::kAlign);
  const hoalign::PoseTrack track = hoalign::run_align(inputs);
  std::filesystem::create_directories(flags.out);
  const auto path = std::filesystem::path(flags.out) / "track.json";
  hoalign::write_text_file(path, hoalign::track_to_json(track));
  std::cout << "wrote " << path.string() << "\n";
}

void run_track(const CommonFlags& flags) {
  const auto inputs = hoalign::load_inputs(resolve_config(flags), hoalign::Command::kTrack);
  const hoalign::TrackResult result = hoalign::run_track(inputs);
  hoalign::write_track_outputs(flags.out, result);
  std::cout << "wrote " << (std::filesystem::path(flags.out) / "track.json").string() << " ("
            << result.alignment.track.frames.size() << " frames)\n";
  if (result.evaluation) std::cout << "median chamfer_cm2 " << result.evaluation->median.chamfer_cm2 << "\n";
}

void run_eval(const CommonFlags& flags) {
  const auto inputs = hoalign::load_inputs(resolve_config(flags), hoalign::Command::kEval, flags.out);
  const auto report = hoalign::evaluate_track(inputs.model, *inputs.track, inputs.ground_truth, inputs.config);
  std::filesystem::create_directories(flags.out);
  const auto path = std::filesystem::path(flags.out) / "metrics.json";
  hoalign::write_text_file(path, hoalign::metrics_to_json(report));
  std::cout << "wrote " << path.string() << "\n";
}

void run_grid(const CommonFlags& flags, std::optional<int> level, bool out_given) {
  hoalign::RunConfig config = resolve_config(flags);
  if (level) config.rotation_level = *level;
  config.validate();
  const std::string csv = hoalign::rotation_grid_csv(hoalign::build_rotation_grid(config.rotation_level));
  if (!out_given) {
    std::cout << csv;
    return;
  }
  std::filesystem::create_directories(flags.out);
  hoalign::write_text_file(std::filesystem::path(flags.out) / "grid.csv", csv);
}

void run_prep(const CommonFlags& flags) {
  const auto inputs = hoalign::load_inputs(resolve_config(flags), hoalign::Command::kPrep);
  const auto frames = hoalign::run_prep(inputs);
  hoalign::write_prep_outputs(flags.out, frames);
  std::cout << "wrote " << frames.size() << " hand maps to " << flags.out << "\n";
}

void run_synth(const CommonFlags& flags) {
  const hoalign::RunConfig config = resolve_config(flags);
  const hoalign::SyntheticScene scene = hoalign::generate_synthetic_scene(config);
  hoalign::write_synthetic_scene(flags.out, scene, config);
  std::cout << "wrote " << scene.clouds.size() << "-frame scene to " << flags.out << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Temporally consistent object-to-video alignment"};
  app.require_subcommand(1);

  CommonFlags align_flags, track_flags, eval_flags, grid_flags, prep_flags, synth_flags;
  std::optional<int> level;
  add_common(app.add_subcommand("align", "align the model to one frame"), align_flags, true);
  add_common(app.add_subcommand("track", "align the model to a frame sequence"), track_flags, true);
  add_common(app.add_subcommand("eval", "score a predicted track against ground truth"), eval_flags, true);
  auto* grid = app.add_subcommand("grid", "print the rotation grid");
  add_common(grid, grid_flags, false);
  grid->add_option("--level", level, "grid subdivision level")->check(CLI::Range(0, 8));
  add_common(app.add_subcommand("prep", "sample and normalize hand points"), prep_flags, true);
  add_common(app.add_subcommand("synth", "generate a synthetic scene"), synth_flags, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInput;
  }

  try {
    if (app.got_subcommand("align")) run_align(align_flags);
    if (app.got_subcommand("track")) run_track(track_flags);
    if (app.got_subcommand("eval")) run_eval(eval_flags);
    if (app.got_subcommand("grid")) run_grid(grid_flags, level, grid->count("--out") > 0);
    if (app.got_subcommand("prep")) run_prep(prep_flags);
    if (app.got_subcommand("synth")) run_synth(synth_flags);
  } catch (const hoalign::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.is_input_error() ? kExitInput : kExitNumerical;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
  return 0;
}
