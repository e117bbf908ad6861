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


#ifndef TUBEPRED_DATASET_H_
#define TUBEPRED_DATASET_H_

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tubepred/geometry.h"
#include "tubepred/linking.h"
#include "tubepred/tube.h"

namespace tubepred {

struct GroundTruthTube {
  int class_id = 0;
  FrameBoxes boxes;  // frames within [1, num_frames]
};

struct VideoAnnotation {
  std::string id;
  int num_frames = 1;
  FrameSize frame;
  std::vector<GroundTruthTube> tubes;

  // The class shared by every tube, nullopt when tubes disagree or are absent.
  std::optional<int> label() const;
};

struct DatasetManifest {
  std::vector<std::string> class_names;
  std::vector<VideoAnnotation> videos;

  int num_classes() const { return static_cast<int>(class_names.size()); }
  const VideoAnnotation* Find(const std::string& id) const;
};

// One line of a detection file.
struct DetectionRecord {
  std::string video;
  PredictionHorizon horizon;
  MicroTubeDetection detection;
};

// Records grouped by video, each group ordered by t.
using DetectionsByVideo = std::map<std::string, std::vector<MicroTubeDetection>>;

DetectionsByVideo GroupByVideo(std::span<const DetectionRecord> records);

// Builds the linking stream for steps t = 1, 1 + delta, ... up to
// `last_start`, keeping only micro-tubes that start at those steps. Steps with
// no detections stay present and empty.
std::vector<DetectionStep> MakeStream(std::span<const MicroTubeDetection> detections,
                                      int delta, int last_start);

}  // namespace tubepred

#endif  // TUBEPRED_DATASET_H_
