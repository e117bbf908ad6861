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

#ifndef TUBEPRED_ANCHORS_H_
#define TUBEPRED_ANCHORS_H_

#include <optional>
#include <span>
#include <vector>

#include "tubepred/geometry.h"
#include "tubepred/kernels.h"

namespace tubepred {

struct GridSize {
  int rows = 1;
  int cols = 1;
};

// One scale per feature-map grid, one aspect-ratio list shared by all grids.
struct PriorBoxSpec {
  std::vector<GridSize> grids;
  std::vector<double> scales;
  std::vector<double> aspect_ratios;
  FrameSize frame;

  // Throws std::invalid_argument when a field breaks its range.
  void Validate() const;

  // Small SSD-style pyramid: grids 38, 19, 10, 5, 3, 1 with ratios {1, 2, 1/2}.
  static PriorBoxSpec Default(const FrameSize& frame = {320, 240});
};

struct PriorBoxSet {
  std::vector<BoundingBox> boxes;
  EncodingVariances variances;

  std::size_t size() const { return boxes.size(); }
};

// Boxes are centered on grid cells. A box of scale s and ratio r has
// width s * sqrt(W * H * r) and height s * sqrt(W * H / r), so width / height
// equals r and area equals s^2 * W * H. Order: grid-major, row-major within a
// grid, ratio-minor.
PriorBoxSet GeneratePriors(const PriorBoxSpec& spec,
                           const EncodingVariances& variances = {});

// A ground-truth micro-tube. `horizon_boxes` optionally carries the past and
// future boxes (1 + n entries, past first) used as prediction targets.
struct GroundTruthMicroTube {
  MicroTubeBoxes boxes;
  int class_id = 0;
  std::vector<std::optional<BoundingBox>> horizon_boxes;
};

struct PriorMatch {
  int gt_index = -1;
  int class_id = -1;
  double mean_iou = 0.0;
  // Assigned by the bipartite step rather than the threshold step.
  bool forced = false;
};

struct MatchAssignment {
  std::vector<std::optional<PriorMatch>> per_prior;
  // The prior each gt claimed during the bipartite step.
  std::vector<int> forced_prior;

  int num_matched() const;
};

inline constexpr double kDefaultMatchThreshold = 0.5;

// Two-step prior matching. First every ground truth claims its best free
// prior, resolved greedily in descending mean-IoU order (ties: lowest prior,
// then lowest gt index). Then every still-free prior whose best gt reaches
// `threshold` is matched to it. Throws std::invalid_argument when there are
// more gts than priors ("insufficient priors") or the threshold is outside
// (0, 1].
MatchAssignment MatchPriors(const PriorBoxSet& priors,
                            std::span<const GroundTruthMicroTube> gts,
                            double threshold = kDefaultMatchThreshold,
                            Execution execution = Execution::kParallel);

}  // namespace tubepred

#endif  // TUBEPRED_ANCHORS_H_
