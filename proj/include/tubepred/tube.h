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

// Detector output units and the action tubes linked from them.
//
// Class ids are foreground ids in [0, C). Score vectors carry C + 1 entries
// with the background probability at index 0, so class c reads index c + 1.

#ifndef TUBEPRED_TUBE_H_
#define TUBEPRED_TUBE_H_

#include <string>
#include <vector>

#include "tubepred/geometry.h"

namespace tubepred {

// Past offset, future step and number of future steps of the prediction head.
struct PredictionHorizon {
  int past_offset = 0;
  int future_step = 5;
  int num_future = 3;

  // Boxes per prediction payload: one past box plus `num_future` future boxes.
  int payload_boxes() const { return 1 + num_future; }

  // Model tag such as "TPnet_053"; the no-prediction horizon is "AMTnet".
  std::string Tag() const;

  void Validate() const;

  friend bool operator==(const PredictionHorizon&,
                         const PredictionHorizon&) = default;
};

struct MicroTubeDetection {
  int t = 1;
  int delta = 1;
  MicroTubeBoxes boxes;
  std::vector<double> class_scores;
  // Empty, or payload_boxes() entries: the box at t - past_offset followed by
  // the boxes at t + k * future_step for k = 1..num_future.
  std::vector<BoundingBox> predictions;

  int num_classes() const { return static_cast<int>(class_scores.size()) - 1; }
  double score(int class_id) const { return class_scores[class_id + 1]; }
};

// A micro-tube as linked into a tube, carrying its score for the tube's class.
struct TubeMember {
  int t = 1;
  int delta = 1;
  MicroTubeBoxes boxes;
  double score = 0.0;
  std::vector<BoundingBox> predictions;
};

struct ActionTube {
  int class_id = 0;
  double score = 0.0;
  FrameBoxes detected;
  FrameBoxes predicted;
  std::vector<TubeMember> members;
  // Consecutive linking steps this tube went without an extension.
  int missed_steps = 0;

  int first_frame() const { return detected.begin()->first; }
  int last_frame() const { return detected.rbegin()->first; }

  // Detected and predicted boxes merged into one frame map.
  FrameBoxes Full() const;
};

}  // namespace tubepred

#endif  // TUBEPRED_TUBE_H_
