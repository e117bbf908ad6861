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


#include "tubepred/evaluation.h"

#include <fmt/format.h>

#include <algorithm>
#include <stdexcept>

#include "tubepred/metrics.h"

namespace tubepred {
namespace {

struct Observation {
  int observed_frame = 0;
  std::vector<ActionTube> tubes;
};

struct ProblemSpec {
  MetricKind metric;
  std::size_t pct_index;
  int class_id;
};

constexpr MetricKind kMapKinds[] = {MetricKind::kDetection, MetricKind::kOnline,
                                    MetricKind::kPrediction,
                                    MetricKind::kCompletion};

FrameBoxes FramesUpTo(const FrameBoxes& boxes, int last) {
  return FrameBoxes(boxes.begin(), boxes.upper_bound(last));
}

FrameBoxes FramesAfter(const FrameBoxes& boxes, int first_excluded) {
  return FrameBoxes(boxes.upper_bound(first_excluded), boxes.end());
}

// Detections and ground truth of `class_id` as seen by one metric.
ClassResults Collect(const DatasetManifest& manifest,
                     const std::vector<Observation>& observations,
                     MetricKind metric, int class_id, bool truncate_online_gt) {
  ClassResults out;
  for (std::size_t v = 0; v < manifest.videos.size(); ++v) {
    const VideoAnnotation& video = manifest.videos[v];
    const Observation& obs = observations[v];
    for (const auto& tube : obs.tubes) {
      if (tube.class_id != class_id) continue;
      FrameBoxes boxes;
      switch (metric) {
        case MetricKind::kDetection:
        case MetricKind::kOnline:
          boxes = tube.detected;
          break;
        case MetricKind::kPrediction:
          boxes = FramesAfter(tube.predicted, obs.observed_frame);
          break;
        case MetricKind::kCompletion:
          boxes = tube.Full();
          break;
        case MetricKind::kAccuracy:
          break;
      }
      if (!boxes.empty()) out.detections.push_back({video.id, tube.score, std::move(boxes)});
    }
    for (const auto& gt : video.tubes) {
      if (gt.class_id != class_id) continue;
      FrameBoxes boxes;
      switch (metric) {
        case MetricKind::kOnline:
          boxes = truncate_online_gt ? FramesUpTo(gt.boxes, obs.observed_frame)
                                     : gt.boxes;
          break;
        case MetricKind::kPrediction:
          boxes = FramesAfter(gt.boxes, obs.observed_frame);
          break;
        default:
          boxes = gt.boxes;
          break;
      }
      if (!boxes.empty()) out.gts.push_back({video.id, std::move(boxes)});
    }
  }
  return out;
}

}  // namespace

std::string_view MetricName(MetricKind kind) {
  switch (kind) {
    case MetricKind::kDetection:
      return "detection-mAP";
    case MetricKind::kOnline:
      return "online-mAP";
    case MetricKind::kPrediction:
      return "p-mAP";
    case MetricKind::kCompletion:
      return "c-mAP";
    case MetricKind::kAccuracy:
      return "accuracy";
  }
  return "";
}

std::optional<MetricKind> ParseMetricName(std::string_view name) {
  for (MetricKind kind :
       {MetricKind::kDetection, MetricKind::kOnline, MetricKind::kPrediction,
        MetricKind::kCompletion, MetricKind::kAccuracy}) {
    if (MetricName(kind) == name) return kind;
  }
  return std::nullopt;
}

std::string DeltaLabel(double delta) { return fmt::format("{}", delta); }

const ReportCell* EvalReport::Find(MetricKind metric, std::string_view delta,
                                   int observed_pct) const {
  for (const auto& cell : cells) {
    if (cell.metric == metric && cell.delta == delta &&
        cell.observed_pct == observed_pct) {
      return &cell;
    }
  }
  return nullptr;
}

std::vector<double> EvalOptions::DefaultDeltas() {
  std::vector<double> deltas = {0.2};
  for (int percent = 50; percent <= 95; percent += 5) {
    deltas.push_back(percent / 100.0);
  }
  return deltas;
}

std::vector<int> EvalOptions::DefaultObservedPcts() {
  std::vector<int> pcts;
  for (int pct = 10; pct <= 100; pct += 10) pcts.push_back(pct);
  return pcts;
}

void EvalOptions::Validate() const {
  link.Validate();
  horizon.Validate();
  for (double delta : deltas) {
    if (!(delta > 0.0 && delta < 1.0)) {
      throw std::invalid_argument("detection thresholds must lie in (0, 1)");
    }
  }
  for (int pct : observed_pcts) {
    if (pct < 1 || pct > 100) {
      throw std::invalid_argument(
          fmt::format("observation percentage {} outside [1, 100]", pct));
    }
  }
}

int ObservedFrame(int observed_pct, int num_frames) {
  return (observed_pct * num_frames + 99) / 100;
}

std::vector<ActionTube> ObserveAndPredict(const VideoAnnotation& video,
                                          std::span<const MicroTubeDetection> detections,
                                          int num_classes, int observed_frame,
                                          const EvalOptions& options) {
  const int delta = options.link.delta;
  const auto stream = MakeStream(detections, delta, observed_frame - delta);
  std::vector<ActionTube> tubes =
      BuildTubes(stream, num_classes, options.link, Execution::kSerial);
  for (auto& tube : tubes) {
    tube = PredictFullTube(tube, observed_frame, video.num_frames,
                           options.horizon, video.frame, options.conflict);
  }
  return tubes;
}

EvalReport EvaluateSweep(const DatasetManifest& manifest,
                         const DetectionsByVideo& detections,
                         const EvalOptions& options) {
  options.Validate();
  const int num_classes = manifest.num_classes();
  if (num_classes < 1) throw std::invalid_argument("manifest has no classes");
  for (const auto& [video, dets] : detections) {
    if (manifest.Find(video) == nullptr) {
      throw std::invalid_argument(
          fmt::format("detections for unknown video '{}'", video));
    }
  }

  // Every requested percentage plus full observation for detection mAP.
  std::vector<int> pcts = options.observed_pcts;
  std::sort(pcts.begin(), pcts.end());
  pcts.erase(std::unique(pcts.begin(), pcts.end()), pcts.end());
  const bool report_full = std::find(pcts.begin(), pcts.end(), 100) != pcts.end();
  if (!report_full) pcts.push_back(100);
  const std::size_t full_index = pcts.size() - 1;

  const std::size_t num_videos = manifest.videos.size();
  std::vector<std::vector<Observation>> by_pct(
      pcts.size(), std::vector<Observation>(num_videos));
  kernels::ForEachIndex(
      num_videos * pcts.size(), options.execution, [&](std::size_t item) {
        const std::size_t v = item / pcts.size();
        const std::size_t p = item % pcts.size();
        const VideoAnnotation& video = manifest.videos[v];
        Observation& obs = by_pct[p][v];
        obs.observed_frame = ObservedFrame(pcts[p], video.num_frames);
        const auto it = detections.find(video.id);
        if (it == detections.end()) return;
        obs.tubes = ObserveAndPredict(video, it->second, num_classes,
                                      obs.observed_frame, options);
      });

  // Thresholds by label, in request order, deduplicated.
  std::vector<std::pair<std::string, double>> deltas;
  for (double delta : options.deltas) {
    std::string label = DeltaLabel(delta);
    const bool seen = std::any_of(deltas.begin(), deltas.end(),
                                  [&](const auto& d) { return d.first == label; });
    if (!seen) deltas.emplace_back(std::move(label), delta);
  }
  const std::vector<double> avg_deltas = AvgMapDeltas();

  std::vector<ProblemSpec> specs;
  for (MetricKind metric : kMapKinds) {
    for (std::size_t p = 0; p < pcts.size(); ++p) {
      const bool wanted = metric == MetricKind::kDetection
                              ? p == full_index
                              : (pcts[p] != 100 || report_full);
      if (!wanted) continue;
      for (int c = 0; c < num_classes; ++c) specs.push_back({metric, p, c});
    }
  }

  // aps[s][k]: AP of spec s at deltas[k], then at avg_deltas.
  std::vector<std::vector<std::optional<double>>> aps(specs.size());
  kernels::ForEachIndex(specs.size(), options.execution, [&](std::size_t s) {
    const ProblemSpec& spec = specs[s];
    const ClassResults results =
        Collect(manifest, by_pct[spec.pct_index], spec.metric, spec.class_id,
                options.truncate_online_gt);
    const TubeMatchProblem problem(results.detections, results.gts,
                                   Execution::kSerial);
    for (const auto& [label, delta] : deltas) {
      aps[s].push_back(problem.AveragePrecision(delta));
    }
    for (double delta : avg_deltas) aps[s].push_back(problem.AveragePrecision(delta));
  });

  EvalReport report;
  report.class_names = manifest.class_names;
  const auto add_cell = [&](MetricKind metric, std::string delta, int pct,
                            const std::vector<std::optional<double>>& per_class)
      -> ReportCell* {
    const auto mean = MeanDefined(per_class);
    if (!mean) return nullptr;
    ReportCell cell{metric, std::move(delta), pct, *mean, {}};
    for (int c = 0; c < num_classes; ++c) {
      if (per_class[c]) cell.per_class[c] = *per_class[c];
    }
    report.cells.push_back(std::move(cell));
    return &report.cells.back();
  };

  for (MetricKind metric : kMapKinds) {
    for (std::size_t k = 0; k <= deltas.size(); ++k) {
      for (std::size_t p = 0; p < pcts.size(); ++p) {
        std::vector<std::optional<double>> per_class(num_classes);
        bool any = false;
        for (std::size_t s = 0; s < specs.size(); ++s) {
          if (specs[s].metric != metric || specs[s].pct_index != p) continue;
          any = true;
          if (k < deltas.size()) {
            per_class[specs[s].class_id] = aps[s][k];
          } else {
            // avg: per-class mean over 0.5:0.05:0.95.
            std::vector<std::optional<double>> sweep(
                aps[s].begin() + deltas.size(), aps[s].end());
            per_class[specs[s].class_id] = MeanDefined(sweep);
          }
        }
        if (!any) continue;
        std::string label =
            k < deltas.size() ? deltas[k].first : std::string(kAvgDeltaLabel);
        if (k == deltas.size()) {
          // The avg cell's mean is the mean of per-threshold mAPs.
          std::vector<std::optional<double>> maps;
          for (std::size_t d = 0; d < avg_deltas.size(); ++d) {
            std::vector<std::optional<double>> at_delta(num_classes);
            for (std::size_t s = 0; s < specs.size(); ++s) {
              if (specs[s].metric == metric && specs[s].pct_index == p) {
                at_delta[specs[s].class_id] = aps[s][deltas.size() + d];
              }
            }
            maps.push_back(MeanDefined(at_delta));
          }
          const auto mean = MeanDefined(maps);
          if (!mean) continue;
          if (ReportCell* cell = add_cell(metric, std::move(label), pcts[p], per_class)) {
            cell->mean = *mean;
          }
        } else {
          add_cell(metric, std::move(label), pcts[p], per_class);
        }
      }
    }
  }

  for (std::size_t p = 0; p < pcts.size(); ++p) {
    if (pcts[p] == 100 && !report_full) continue;
    std::vector<int> correct(num_classes, 0);
    std::vector<int> total(num_classes, 0);
    int all_correct = 0;
    int all_total = 0;
    for (std::size_t v = 0; v < num_videos; ++v) {
      const auto label = manifest.videos[v].label();
      if (!label) continue;
      const auto& tubes = by_pct[p][v].tubes;
      const bool hit = !tubes.empty() && EarlyLabel(tubes) == *label;
      ++total[*label];
      ++all_total;
      correct[*label] += hit;
      all_correct += hit;
    }
    if (all_total == 0) continue;
    ReportCell cell{MetricKind::kAccuracy, std::string(kNoDeltaLabel), pcts[p],
                    static_cast<double>(all_correct) / all_total, {}};
    for (int c = 0; c < num_classes; ++c) {
      if (total[c] > 0) {
        cell.per_class[c] = static_cast<double>(correct[c]) / total[c];
      }
    }
    report.cells.push_back(std::move(cell));
  }
  return report;
}

}  // namespace tubepred
