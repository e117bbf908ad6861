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


#include "tubepred/prediction.h"

#include <algorithm>
#include <iterator>
#include <stdexcept>
#include <vector>

namespace tubepred {

FrameBoxes AssembleFuture(const ActionTube& tube, int now,
                          const PredictionHorizon& horizon, ConflictRule rule) {
  horizon.Validate();
  if (tube.members.empty()) throw std::invalid_argument("tube has no members");
  FrameBoxes out;
  if (horizon.num_future == 0) return out;

  const int delta = tube.members.back().delta;
  const int end = now - delta + horizon.num_future * horizon.future_step;
  FrameBoxes sums;
  std::map<int, int> counts;
  // Members are stored oldest first, so later writes are more recent.
  for (const auto& member : tube.members) {
    if (member.predictions.empty()) continue;
    if (static_cast<int>(member.predictions.size()) != horizon.payload_boxes()) {
      throw std::invalid_argument("prediction payload does not match horizon");
    }
    for (int k = 1; k <= horizon.num_future; ++k) {
      const int f = member.t + k * horizon.future_step;
      if (f <= now || f > end) continue;
      const BoundingBox& box = member.predictions[k];
      if (rule == ConflictRule::kMostRecent) {
        out[f] = box;
      } else {
        BoundingBox& acc = sums[f];
        acc.x_min += box.x_min;
        acc.y_min += box.y_min;
        acc.x_max += box.x_max;
        acc.y_max += box.y_max;
        ++counts[f];
      }
    }
  }
  if (rule == ConflictRule::kAverage) {
    for (const auto& [f, acc] : sums) {
      const double n = counts[f];
      out[f] = {acc.x_min / n, acc.y_min / n, acc.x_max / n, acc.y_max / n};
    }
  }
  return out;
}

ActionTube PredictFullTube(const ActionTube& tube, int now, int video_length,
                           const PredictionHorizon& horizon,
                           const FrameSize& frame, ConflictRule rule) {
  if (tube.detected.empty() || tube.members.empty()) {
    throw std::invalid_argument("empty tube");
  }
  if (now < tube.last_frame()) {
    throw std::invalid_argument("tube has detections after the observed frame");
  }
  if (now > video_length) {
    throw std::invalid_argument("observed frame beyond the end of the video");
  }
  ActionTube out = tube;
  out.predicted.clear();
  const FrameBoxes assembled = AssembleFuture(tube, now, horizon, rule);

  std::vector<TimedBox> history;
  history.reserve(tube.detected.size() + (video_length - now));
  for (const auto& [f, box] : tube.detected) history.push_back({f, box});

  std::vector<int> run;
  int f = now + 1;
  while (f <= video_length) {
    if (const auto it = assembled.find(f); it != assembled.end()) {
      const BoundingBox box = ClipBox(it->second, frame);
      out.predicted[f] = box;
      history.push_back({f, box});
      ++f;
      continue;
    }
    run.clear();
    for (; f <= video_length && !assembled.contains(f); ++f) run.push_back(f);
    std::vector<BoundingBox> filled;
    if (history.size() >= 2) {
      const std::size_t window =
          std::min<std::size_t>(kVelocityWindow, history.size());
      filled = Extrapolate(std::span(history).last(window), run, frame);
    } else {
      filled.assign(run.size(), ClipBox(history.back().box, frame));
    }
    for (std::size_t i = 0; i < run.size(); ++i) {
      out.predicted[run[i]] = filled[i];
      history.push_back({run[i], filled[i]});
    }
  }
  return out;
}

int EarlyLabel(std::span<const ActionTube> tubes) {
  if (tubes.empty()) throw std::invalid_argument("no tubes");
  const ActionTube* best = &tubes.front();
  for (const auto& tube : tubes) {
    if (tube.score > best->score ||
        (tube.score == best->score && tube.class_id < best->class_id)) {
      best = &tube;
    }
  }
  return best->class_id;
}

}  // namespace tubepred
