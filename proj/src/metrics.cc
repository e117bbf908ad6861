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


#include "tubepred/metrics.h"

#include <algorithm>
#include <map>
#include <numeric>
#include <stdexcept>

namespace tubepred {

double TubeIou(const FrameBoxes& a, const FrameBoxes& b) {
  double sum = 0.0;
  std::size_t union_frames = 0;
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() || ib != b.end()) {
    ++union_frames;
    if (ib == b.end() || (ia != a.end() && ia->first < ib->first)) {
      ++ia;
    } else if (ia == a.end() || ib->first < ia->first) {
      ++ib;
    } else {
      sum += Iou(ia->second, ib->second);
      ++ia;
      ++ib;
    }
  }
  return union_frames == 0 ? 0.0 : sum / static_cast<double>(union_frames);
}

double EveryPointAp(std::span<const std::uint8_t> ranked_is_tp,
                    std::size_t num_gts) {
  if (num_gts == 0) throw std::invalid_argument("AP needs ground truth");
  const std::size_t n = ranked_is_tp.size();
  std::vector<double> precision(n);
  std::size_t tp = 0;
  for (std::size_t k = 0; k < n; ++k) {
    tp += ranked_is_tp[k] ? 1 : 0;
    precision[k] = static_cast<double>(tp) / static_cast<double>(k + 1);
  }
  for (std::size_t k = n; k-- > 1;) {
    precision[k - 1] = std::max(precision[k - 1], precision[k]);
  }
  // Recall only moves at true positives, by 1 / num_gts each time.
  double area = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    if (ranked_is_tp[k]) area += precision[k];
  }
  return area / static_cast<double>(num_gts);
}

TubeMatchProblem::TubeMatchProblem(std::span<const ScoredTube> detections,
                                   std::span<const GtTube> gts,
                                   Execution execution)
    : order_(detections.size()),
      num_gts_(gts.size()),
      overlaps_(detections.size()) {
  std::iota(order_.begin(), order_.end(), 0);
  std::stable_sort(order_.begin(), order_.end(), [&](std::size_t a, std::size_t b) {
    return detections[a].score > detections[b].score;
  });

  std::map<std::string, std::vector<std::size_t>> gts_by_video;
  for (std::size_t j = 0; j < gts.size(); ++j) {
    gts_by_video[gts[j].video].push_back(j);
  }
  std::map<std::string, std::vector<std::size_t>> dets_by_video;
  for (std::size_t i = 0; i < detections.size(); ++i) {
    if (gts_by_video.contains(detections[i].video)) {
      dets_by_video[detections[i].video].push_back(i);
    }
  }
  for (const auto& [video, det_ids] : dets_by_video) {
    const auto& gt_ids = gts_by_video.at(video);
    std::vector<const FrameBoxes*> det_boxes;
    std::vector<const FrameBoxes*> gt_boxes;
    for (std::size_t i : det_ids) det_boxes.push_back(&detections[i].boxes);
    for (std::size_t j : gt_ids) gt_boxes.push_back(&gts[j].boxes);
    const kernels::Matrix overlap =
        execution == Execution::kParallel
            ? kernels::TubeIouMatrix(det_boxes, gt_boxes)
            : kernels::serial::TubeIouMatrix(det_boxes, gt_boxes);
    for (std::size_t r = 0; r < det_ids.size(); ++r) {
      auto& row = overlaps_[det_ids[r]];
      for (std::size_t c = 0; c < gt_ids.size(); ++c) {
        row.emplace_back(gt_ids[c], overlap(r, c));
      }
    }
  }
}

std::vector<std::uint8_t> TubeMatchProblem::RankedTruePositives(
    double delta) const {
  std::vector<bool> claimed(num_gts_, false);
  std::vector<std::uint8_t> is_tp;
  is_tp.reserve(order_.size());
  for (std::size_t i : order_) {
    double best = -1.0;
    std::size_t best_gt = 0;
    for (const auto& [gt, overlap] : overlaps_[i]) {
      if (!claimed[gt] && overlap > best) {
        best = overlap;
        best_gt = gt;
      }
    }
    const bool tp = best >= delta;
    if (tp) claimed[best_gt] = true;
    is_tp.push_back(tp ? 1 : 0);
  }
  return is_tp;
}

std::optional<double> TubeMatchProblem::AveragePrecision(double delta) const {
  if (num_gts_ == 0) return std::nullopt;
  return EveryPointAp(RankedTruePositives(delta), num_gts_);
}

std::optional<double> AveragePrecision(std::span<const ScoredTube> detections,
                                       std::span<const GtTube> gts, double delta,
                                       Execution execution) {
  return TubeMatchProblem(detections, gts, execution).AveragePrecision(delta);
}

std::optional<double> MeanDefined(std::span<const std::optional<double>> values) {
  double sum = 0.0;
  int count = 0;
  for (const auto& v : values) {
    if (!v) continue;
    sum += *v;
    ++count;
  }
  if (count == 0) return std::nullopt;
  return sum / count;
}

MapResult MapAt(std::span<const ClassResults> classes, double delta,
                Execution execution) {
  MapResult out;
  out.per_class.reserve(classes.size());
  for (const auto& c : classes) {
    out.per_class.push_back(AveragePrecision(c.detections, c.gts, delta, execution));
  }
  out.map = MeanDefined(out.per_class);
  return out;
}

std::vector<double> AvgMapDeltas() {
  std::vector<double> deltas;
  for (int percent = 50; percent <= 95; percent += 5) {
    deltas.push_back(percent / 100.0);
  }
  return deltas;
}

std::optional<double> AvgMap(std::span<const ClassResults> classes,
                             Execution execution) {
  std::vector<TubeMatchProblem> problems;
  problems.reserve(classes.size());
  for (const auto& c : classes) problems.emplace_back(c.detections, c.gts, execution);
  std::vector<std::optional<double>> maps;
  for (double delta : AvgMapDeltas()) {
    std::vector<std::optional<double>> aps;
    for (const auto& p : problems) aps.push_back(p.AveragePrecision(delta));
    maps.push_back(MeanDefined(aps));
  }
  return MeanDefined(maps);
}

}  // namespace tubepred
