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


#ifndef TUBEPRED_METRICS_H_
#define TUBEPRED_METRICS_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "tubepred/geometry.h"
#include "tubepred/kernels.h"

namespace tubepred {

// Spatio-temporal overlap: mean per-frame IoU over the union of both frame
// sets, where a frame present in only one tube scores 0. Two empty tubes
// score 0.
double TubeIou(const FrameBoxes& a, const FrameBoxes& b);

// A detected tube of one class.
struct ScoredTube {
  std::string video;
  double score = 0.0;
  FrameBoxes boxes;
};

// A ground-truth tube of one class.
struct GtTube {
  std::string video;
  FrameBoxes boxes;
};

// Every-point interpolated AP of a ranked TP/FP sequence: precision is made
// non-increasing from the right and integrated over recall. `num_gts` must be
// positive.
double EveryPointAp(std::span<const std::uint8_t> ranked_is_tp,
                    std::size_t num_gts);

// Same-video detection/gt overlaps for one class, computed once and reused
// across thresholds.
class TubeMatchProblem {
 public:
  TubeMatchProblem(std::span<const ScoredTube> detections,
                   std::span<const GtTube> gts,
                   Execution execution = Execution::kParallel);

  // Detections are visited by descending score (ties: input order). Each
  // claims the unclaimed same-video gt with the highest tube IoU (ties: lower
  // gt index) and counts as a TP when that IoU reaches `delta`. nullopt when
  // there are no ground truths.
  std::optional<double> AveragePrecision(double delta) const;

  // TP flags of the ranked detections at `delta`.
  std::vector<std::uint8_t> RankedTruePositives(double delta) const;

 private:
  std::vector<std::size_t> order_;
  std::size_t num_gts_ = 0;
  // Per detection: (gt index, tube IoU) for every gt of the same video, by
  // ascending gt index.
  std::vector<std::vector<std::pair<std::size_t, double>>> overlaps_;
};

std::optional<double> AveragePrecision(std::span<const ScoredTube> detections,
                                       std::span<const GtTube> gts, double delta,
                                       Execution execution = Execution::kParallel);

// Detections and ground truth of one class across all videos.
struct ClassResults {
  std::vector<ScoredTube> detections;
  std::vector<GtTube> gts;
};

struct MapResult {
  std::optional<double> map;
  std::vector<std::optional<double>> per_class;
};

// Mean of the defined values; nullopt when none is defined.
std::optional<double> MeanDefined(std::span<const std::optional<double>> values);

// Per-class AP at `delta` and their mean over classes that have ground truth.
MapResult MapAt(std::span<const ClassResults> classes, double delta,
                Execution execution = Execution::kParallel);

// Thresholds 0.50, 0.55, ..., 0.95.
std::vector<double> AvgMapDeltas();

// Mean of MapAt over AvgMapDeltas().
std::optional<double> AvgMap(std::span<const ClassResults> classes,
                             Execution execution = Execution::kParallel);

}  // namespace tubepred

#endif  // TUBEPRED_METRICS_H_
