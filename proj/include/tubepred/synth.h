/* Copyright 2026 The Tubepred Authors.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/


// Seeded synthetic scenarios: ground-truth tubes with piecewise-constant
// velocity and simulated detector output with controllable noise.

#ifndef TUBEPRED_SYNTH_H_
#define TUBEPRED_SYNTH_H_

#include <cstdint>
#include <string>
#include <vector>

#include "tubepred/dataset.h"
#include "tubepred/geometry.h"
#include "tubepred/tube.h"

namespace tubepred {

// Velocity (pixels per frame) in effect from `start_frame` until the next
// segment starts.
struct VelocitySegment {
  int start_frame = 1;
  double vx = 0.0;
  double vy = 0.0;
};

struct ActorSpec {
  int class_id = 0;
  BoundingBox initial;  // box at frame 1
  std::vector<VelocitySegment> schedule;

  // Unclipped box at any frame; frames before 1 continue the first velocity
  // backwards.
  BoundingBox BoxAt(int frame) const;
};

struct NoiseSpec {
  double center_sigma = 0.0;      // px
  double size_sigma = 0.0;        // px
  double prediction_sigma = 0.0;  // px, center jitter of payload boxes
  // Logit noise scale; larger values make classes easier to confuse.
  double score_temperature = 0.0;
  double score_margin = 8.0;  // true-class logit over the others
  double false_positive_rate = 0.0;  // per frame pair
  double miss_rate = 0.0;            // per actor and frame pair
};

struct VideoSpec {
  std::string id;
  int num_frames = 40;
  FrameSize frame{320, 240};
  std::vector<ActorSpec> actors;
};

struct ScenarioSpec {
  std::uint64_t seed = 0;
  std::vector<std::string> class_names;
  std::vector<VideoSpec> videos;
  NoiseSpec noise;
  PredictionHorizon horizon;
  int delta = 1;

  // Throws std::invalid_argument, including when an actor starts outside the
  // frame or leaves it entirely before the last frame.
  void Validate() const;
};

struct SynthOutput {
  DatasetManifest manifest;
  std::vector<DetectionRecord> detections;
};

// Deterministic for a fixed spec. Every video draws the same amount of
// randomness whatever the noise levels, so sweeping one noise parameter under
// a fixed seed scales the same underlying perturbations.
SynthOutput Generate(const ScenarioSpec& spec);

struct RandomScenarioParams {
  std::uint64_t seed = 0;
  int num_videos = 100;
  int num_frames = 40;
  FrameSize frame{320, 240};
  int num_classes = 3;
  int actors_per_video = 3;
  NoiseSpec noise;
  PredictionHorizon horizon;
  int delta = 1;
};

// Videos with one class each and actors in disjoint horizontal bands moving at
// constant velocity, all staying inside the frame.
ScenarioSpec MakeRandomScenario(const RandomScenarioParams& params);

}  // namespace tubepred

#endif  // TUBEPRED_SYNTH_H_
