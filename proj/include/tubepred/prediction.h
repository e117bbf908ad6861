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


#ifndef TUBEPRED_PREDICTION_H_
#define TUBEPRED_PREDICTION_H_

#include <span>

#include "tubepred/geometry.h"
#include "tubepred/tube.h"

namespace tubepred {

// How overlapping future predictions from different members are combined.
enum class ConflictRule {
  kMostRecent,  // the latest member covering the frame wins
  kAverage,     // coordinate-wise mean of every covering member
};

// Future boxes carried by the tube's member payloads, restricted to the frames
// (now, now - delta + num_future * future_step]. Frames no payload reaches are
// absent. Empty when the horizon has no future steps.
FrameBoxes AssembleFuture(const ActionTube& tube, int now,
                          const PredictionHorizon& horizon,
                          ConflictRule rule = ConflictRule::kMostRecent);

// Returns a copy of `tube` whose predicted segment covers every frame of
// (now, video_length]. Frames reached by member payloads take the assembled
// box; every other run of frames is extrapolated from the last boxes of the
// sequence built so far (detected, then predicted). All predicted boxes are
// clipped to `frame`. Requires now >= tube.last_frame() and
// now <= video_length.
ActionTube PredictFullTube(const ActionTube& tube, int now, int video_length,
                           const PredictionHorizon& horizon,
                           const FrameSize& frame,
                           ConflictRule rule = ConflictRule::kMostRecent);

// Class of the highest-scoring tube, lowest class id on ties.
// Throws std::invalid_argument("no tubes") on an empty list.
int EarlyLabel(std::span<const ActionTube> tubes);

}  // namespace tubepred

#endif  // TUBEPRED_PREDICTION_H_
