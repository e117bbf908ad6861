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


#include "tubepred/linking.h"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <tuple>

namespace tubepred {
namespace {

// Fills the open frame range (from, to) by interpolating between two boxes.
void Interpolate(FrameBoxes& boxes, int from, const BoundingBox& a, int to,
                 const BoundingBox& b) {
  for (int f = from + 1; f < to; ++f) {
    boxes[f] = Lerp(a, b, static_cast<double>(f - from) / (to - from));
  }
}

void AppendMember(ActionTube& tube, const TubeMember& member) {
  if (!tube.detected.empty()) {
    const auto& [tail, tail_box] = *tube.detected.rbegin();
    Interpolate(tube.detected, tail, tail_box, member.t, member.boxes.first);
  }
  // The shared frame takes the newer micro-tube's box.
  tube.detected[member.t] = member.boxes.first;
  Interpolate(tube.detected, member.t, member.boxes.first,
              member.t + member.delta, member.boxes.second);
  tube.detected[member.t + member.delta] = member.boxes.second;
  tube.members.push_back(member);
  double sum = 0.0;
  for (const auto& m : tube.members) sum += m.score;
  tube.score = sum / static_cast<double>(tube.members.size());
}

void ValidateStream(std::span<const DetectionStep> stream, int num_classes,
                    const LinkParams& params) {
  for (std::size_t i = 0; i < stream.size(); ++i) {
    if (i > 0) {
      if (stream[i].t <= stream[i - 1].t) {
        throw std::invalid_argument("unsorted stream");
      }
      if (stream[i].t - stream[i - 1].t != params.delta) {
        throw std::invalid_argument("temporal discontinuity");
      }
    }
    for (const auto& det : stream[i].detections) {
      if (det.t != stream[i].t || det.delta != params.delta) {
        throw std::invalid_argument("temporal discontinuity");
      }
      if (det.num_classes() != num_classes) {
        throw std::invalid_argument("class score count does not match C + 1");
      }
    }
  }
}

std::vector<ActionTube> LinkClass(std::span<const DetectionStep> stream,
                                  int class_id, const LinkParams& params) {
  std::vector<ActionTube> active;
  std::vector<ActionTube> finished;
  std::vector<ScoredMicroTube> candidates;
  std::vector<const MicroTubeDetection*> sources;
  std::vector<TubeMember> fresh;
  for (const auto& step : stream) {
    candidates.clear();
    sources.clear();
    for (const auto& det : step.detections) {
      const double s = det.score(class_id);
      if (s < params.score_threshold) continue;
      candidates.push_back({det.boxes, s});
      sources.push_back(&det);
    }
    fresh.clear();
    for (std::size_t k : Nms(candidates, params.nms_threshold, Execution::kSerial)) {
      const auto& det = *sources[k];
      fresh.push_back({det.t, det.delta, det.boxes, candidates[k].score,
                       det.predictions});
    }
    active = LinkStep(std::move(active), fresh, step.t, class_id, params);

    std::vector<ActionTube> still_active;
    for (auto& tube : active) {
      if (tube.missed_steps >= params.patience) {
        finished.push_back(std::move(tube));
      } else {
        still_active.push_back(std::move(tube));
      }
    }
    active = std::move(still_active);
  }
  for (auto& tube : active) finished.push_back(std::move(tube));
  return finished;
}

}  // namespace

void LinkParams::Validate() const {
  if (!(nms_threshold >= 0.0 && nms_threshold <= 1.0)) {
    throw std::invalid_argument("NMS threshold must lie in [0, 1]");
  }
  if (!(lambda >= 0.0)) throw std::invalid_argument("link lambda must be >= 0");
  if (!(iou_gate >= 0.0 && iou_gate <= 1.0)) {
    throw std::invalid_argument("IoU gate must lie in [0, 1]");
  }
  if (patience < 1) throw std::invalid_argument("patience must be >= 1");
  if (delta < 1) throw std::invalid_argument("delta must be >= 1");
}

std::vector<std::size_t> Nms(std::span<const ScoredMicroTube> items,
                             double threshold, Execution execution) {
  std::vector<std::size_t> order(items.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return items[a].score > items[b].score;
  });
  std::vector<MicroTubeBoxes> boxes;
  boxes.reserve(items.size());
  for (const auto& item : items) boxes.push_back(item.boxes);
  const kernels::Matrix overlap =
      execution == Execution::kParallel ? kernels::MicroTubeIouMatrix(boxes)
                                        : kernels::serial::MicroTubeIouMatrix(boxes);

  std::vector<bool> suppressed(items.size(), false);
  std::vector<std::size_t> kept;
  for (std::size_t rank = 0; rank < order.size(); ++rank) {
    const std::size_t i = order[rank];
    if (suppressed[i]) continue;
    kept.push_back(i);
    for (std::size_t later = rank + 1; later < order.size(); ++later) {
      const std::size_t j = order[later];
      if (!suppressed[j] && overlap(i, j) > threshold) suppressed[j] = true;
    }
  }
  return kept;
}

std::vector<ActionTube> LinkStep(std::vector<ActionTube> active,
                                 std::span<const TubeMember> fresh, int t,
                                 int class_id, const LinkParams& params) {
  for (const auto& m : fresh) {
    if (m.t != t) throw std::invalid_argument("temporal discontinuity");
  }
  for (const auto& tube : active) {
    const int tail = tube.last_frame();
    if (tail > t || (tube.missed_steps == 0 && tail != t)) {
      throw std::invalid_argument("temporal discontinuity");
    }
  }

  struct Link {
    double score;
    std::size_t tube;
    std::size_t member;
  };
  std::vector<Link> links;
  for (std::size_t i = 0; i < active.size(); ++i) {
    const BoundingBox& tail_box = active[i].detected.rbegin()->second;
    for (std::size_t j = 0; j < fresh.size(); ++j) {
      const double overlap = Iou(tail_box, fresh[j].boxes.first);
      if (overlap < params.iou_gate) continue;
      links.push_back({fresh[j].score + params.lambda * overlap, i, j});
    }
  }
  std::sort(links.begin(), links.end(), [](const Link& a, const Link& b) {
    if (a.score != b.score) return a.score > b.score;
    return std::tie(a.tube, a.member) < std::tie(b.tube, b.member);
  });

  std::vector<bool> tube_linked(active.size(), false);
  std::vector<bool> member_used(fresh.size(), false);
  for (const auto& link : links) {
    if (tube_linked[link.tube] || member_used[link.member]) continue;
    tube_linked[link.tube] = true;
    member_used[link.member] = true;
    AppendMember(active[link.tube], fresh[link.member]);
    active[link.tube].missed_steps = 0;
  }
  for (std::size_t i = 0; i < active.size(); ++i) {
    if (!tube_linked[i]) ++active[i].missed_steps;
  }
  for (std::size_t j = 0; j < fresh.size(); ++j) {
    if (member_used[j]) continue;
    ActionTube tube;
    tube.class_id = class_id;
    AppendMember(tube, fresh[j]);
    active.push_back(std::move(tube));
  }
  return active;
}

std::vector<ActionTube> BuildTubes(std::span<const DetectionStep> stream,
                                   int num_classes, const LinkParams& params,
                                   Execution execution) {
  params.Validate();
  if (num_classes < 1) throw std::invalid_argument("need at least one class");
  ValidateStream(stream, num_classes, params);

  std::vector<std::vector<ActionTube>> per_class(num_classes);
  kernels::ForEachIndex(per_class.size(), execution, [&](std::size_t c) {
    per_class[c] = LinkClass(stream, static_cast<int>(c), params);
  });

  std::vector<ActionTube> tubes;
  for (auto& group : per_class) {
    for (auto& tube : group) tubes.push_back(std::move(tube));
  }
  std::stable_sort(tubes.begin(), tubes.end(),
                   [](const ActionTube& a, const ActionTube& b) {
                     return a.score > b.score;
                   });
  return tubes;
}

}  // namespace tubepred
