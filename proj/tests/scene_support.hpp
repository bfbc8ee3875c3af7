// Synthetic-scene fixture shared by the alignment tests and the acceptance binary.
#pragma once

#include <memory>
#include <vector>

#include "hoalign/align.hpp"
#include "hoalign/config.hpp"
#include "hoalign/synthetic.hpp"

namespace testsupport {

struct SceneFixture {
  hoalign::RunConfig config;
  hoalign::SyntheticScene scene;
  hoalign::RotationGrid grid{0, {}};
  std::vector<hoalign::FrameObservation> frames;
  std::unique_ptr<hoalign::FeatureSource> features;
};

inline SceneFixture make_scene_fixture(const hoalign::RunConfig& config, bool use_features = true) {
  SceneFixture f;
  f.config = config;
  f.scene = hoalign::generate_synthetic_scene(config);
  f.grid = hoalign::build_rotation_grid(config.rotation_level);
  for (std::size_t i = 0; i < f.scene.clouds.size(); ++i) {
    f.frames.push_back({f.scene.ground_truth.frames[i].t, f.scene.clouds[i].select(hoalign::PointLabel::kObject)});
  }
  if (use_features) {
    f.features = std::make_unique<hoalign::SyntheticFeatureSource>(f.scene.model, f.scene.camera, f.scene.features,
                                                                   f.scene.field);
  } else {
    f.features = std::make_unique<hoalign::NoFeatureSource>();
  }
  return f;
}

inline hoalign::SequenceAlignment run_fixture(const SceneFixture& f) {
  return hoalign::align_sequence(f.scene.model, f.frames, f.grid, *f.features, f.config.align_options());
}

}  // namespace testsupport
