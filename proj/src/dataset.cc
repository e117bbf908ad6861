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


#include "tubepred/dataset.h"

#include <algorithm>

namespace tubepred {

std::optional<int> VideoAnnotation::label() const {
  if (tubes.empty()) return std::nullopt;
  const int first = tubes.front().class_id;
  for (const auto& tube : tubes) {
    if (tube.class_id != first) return std::nullopt;
  }
  return first;
}

const VideoAnnotation* DatasetManifest::Find(const std::string& id) const {
  for (const auto& video : videos) {
    if (video.id == id) return &video;
  }
  return nullptr;
}

DetectionsByVideo GroupByVideo(std::span<const DetectionRecord> records) {
  DetectionsByVideo out;
  for (const auto& record : records) out[record.video].push_back(record.detection);
  for (auto& [video, dets] : out) {
    std::stable_sort(dets.begin(), dets.end(),
                     [](const auto& a, const auto& b) { return a.t < b.t; });
  }
  return out;
}

std::vector<DetectionStep> MakeStream(std::span<const MicroTubeDetection> detections,
                                      int delta, int last_start) {
  std::vector<DetectionStep> stream;
  for (int t = 1; t <= last_start; t += delta) stream.push_back({t, {}});
  for (const auto& det : detections) {
    if (det.t < 1 || det.t > last_start || (det.t - 1) % delta != 0) continue;
    stream[(det.t - 1) / delta].detections.push_back(det);
  }
  return stream;
}

}  // namespace tubepred
