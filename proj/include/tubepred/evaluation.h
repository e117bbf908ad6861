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


// Observation-percentage sweep: for every video and observed fraction the
// detection stream is cut at the observed frame, tubes are linked and
// completed to the end of the video, and every metric is computed per class.

#ifndef TUBEPRED_EVALUATION_H_
#define TUBEPRED_EVALUATION_H_

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tubepred/dataset.h"
#include "tubepred/kernels.h"
#include "tubepred/linking.h"
#include "tubepred/prediction.h"

namespace tubepred {

enum class MetricKind {
  kDetection,   // full video observed, detected tubes vs full ground truth
  kOnline,      // detected segment so far
  kPrediction,  // predicted segment vs the unobserved ground truth
  kCompletion,  // detected + predicted vs full ground truth
  kAccuracy,    // early video label
};

std::string_view MetricName(MetricKind kind);
std::optional<MetricKind> ParseMetricName(std::string_view name);

// Delta column labels: shortest decimal for thresholds, plus these two.
inline constexpr std::string_view kAvgDeltaLabel = "avg";
inline constexpr std::string_view kNoDeltaLabel = "na";
std::string DeltaLabel(double delta);

struct ReportCell {
  MetricKind metric = MetricKind::kDetection;
  std::string delta;
  int observed_pct = 100;
  double mean = 0.0;
  // Classes that have ground truth (mAP kinds) or labelled videos (accuracy).
  std::map<int, double> per_class;
};

struct EvalReport {
  std::vector<std::string> class_names;
  // Ordered by metric, delta position, observed percentage.
  std::vector<ReportCell> cells;

  const ReportCell* Find(MetricKind metric, std::string_view delta,
                         int observed_pct) const;
};

struct EvalOptions {
  LinkParams link;
  PredictionHorizon horizon;
  ConflictRule conflict = ConflictRule::kMostRecent;
  std::vector<double> deltas = DefaultDeltas();
  std::vector<int> observed_pcts = DefaultObservedPcts();
  // Online mAP compares against ground truth cut at the observed frame; set
  // false to compare against the full tubes.
  bool truncate_online_gt = true;
  Execution execution = Execution::kParallel;

  // 0.2, 0.5, 0.75 and 0.5:0.05:0.95.
  static std::vector<double> DefaultDeltas();
  // 10, 20, ..., 100.
  static std::vector<int> DefaultObservedPcts();

  void Validate() const;
};

// ceil(pct * num_frames / 100).
int ObservedFrame(int observed_pct, int num_frames);

// Tubes of one video after observing up to `observed_frame`, completed to
// the end of the video.
std::vector<ActionTube> ObserveAndPredict(const VideoAnnotation& video,
                                          std::span<const MicroTubeDetection> detections,
                                          int num_classes, int observed_frame,
                                          const EvalOptions& options);

// Builds the full report. Detection mAP cells appear at 100% only; p-mAP
// cells are omitted wherever no unobserved ground truth remains; every mAP
// kind gets one cell per delta plus an "avg" cell over 0.5:0.05:0.95.
EvalReport EvaluateSweep(const DatasetManifest& manifest,
                         const DetectionsByVideo& detections,
                         const EvalOptions& options);

}  // namespace tubepred

#endif  // TUBEPRED_EVALUATION_H_
