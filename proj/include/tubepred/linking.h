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

#ifndef TUBEPRED_LINKING_H_
#define TUBEPRED_LINKING_H_

#include <span>
#include <vector>

#include "tubepred/kernels.h"
#include "tubepred/tube.h"

namespace tubepred {

inline constexpr double kDefaultNmsThreshold = 0.45;

struct LinkParams {
  double nms_threshold = kDefaultNmsThreshold;
  // Link score = class score + lambda * IoU(tube tail, new first box).
  double lambda = 1.0;
  // Minimum tail IoU for a link.
  double iou_gate = 0.1;
  // A tube is terminated once it has missed this many consecutive steps.
  int patience = 1;
  // Micro-tubes scoring below this for a class are dropped before NMS.
  double score_threshold = 0.01;
  int delta = 1;

  void Validate() const;
};

struct ScoredMicroTube {
  MicroTubeBoxes boxes;
  double score = 0.0;
};

// Greedy NMS on micro-tubes: keep the best remaining item, drop every other
// item whose mean micro-tube IoU with it exceeds `threshold`. Returns the
// kept indices by descending score; equal scores keep input order.
std::vector<std::size_t> Nms(std::span<const ScoredMicroTube> items,
                             double threshold = kDefaultNmsThreshold,
                             Execution execution = Execution::kParallel);

// One online linking step for a single class at frame t.
//
// Every live tube ends at frame t, where the new micro-tubes begin. Candidate
// links need tail IoU >= iou_gate and are accepted greedily by descending link
// score (ties: lower tube index, then lower micro-tube index). Each tube takes
// at most one micro-tube; the rest open new tubes. Tubes left without a link
// keep their boxes and get `missed_steps` incremented; those that had missed
// steps before may end before t. Throws std::invalid_argument("temporal
// discontinuity") when a micro-tube is not at t or a tube ends after t, or a
// tube that has not missed a step does not end exactly at t.
std::vector<ActionTube> LinkStep(std::vector<ActionTube> active,
                                 std::span<const TubeMember> fresh, int t,
                                 int class_id, const LinkParams& params);

// All micro-tubes emitted for the frame pair starting at t.
struct DetectionStep {
  int t = 1;
  std::vector<MicroTubeDetection> detections;
};

// Links a whole stream, every class independently: score filter, NMS, then
// LinkStep at each step. Tube scores are the mean member score; tubes come
// back sorted by descending score. Steps must be params.delta frames apart
// ("unsorted stream" / "temporal discontinuity" otherwise).
std::vector<ActionTube> BuildTubes(std::span<const DetectionStep> stream,
                                   int num_classes, const LinkParams& params,
                                   Execution execution = Execution::kParallel);

}  // namespace tubepred

#endif  // TUBEPRED_LINKING_H_
