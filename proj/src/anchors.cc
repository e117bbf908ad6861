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

#include "tubepred/anchors.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace tubepred {

void PriorBoxSpec::Validate() const {
  if (grids.empty()) throw std::invalid_argument("prior spec needs a grid");
  if (scales.size() != grids.size()) {
    throw std::invalid_argument("prior spec needs one scale per grid");
  }
  if (aspect_ratios.empty()) {
    throw std::invalid_argument("prior spec needs an aspect ratio");
  }
  for (const auto& g : grids) {
    if (g.rows < 1 || g.cols < 1) {
      throw std::invalid_argument("grid dimensions must be positive");
    }
  }
  for (double s : scales) {
    if (!(s > 0.0 && s <= 1.0)) {
      throw std::invalid_argument("prior scales must lie in (0, 1]");
    }
  }
  for (double r : aspect_ratios) {
    if (!(r > 0.0 && std::isfinite(r))) {
      throw std::invalid_argument("aspect ratios must be positive");
    }
  }
  if (frame.width < 1 || frame.height < 1) {
    throw std::invalid_argument("frame size must be positive");
  }
}

PriorBoxSpec PriorBoxSpec::Default(const FrameSize& frame) {
  PriorBoxSpec spec;
  for (int side : {38, 19, 10, 5, 3, 1}) spec.grids.push_back({side, side});
  spec.scales = {0.1, 0.2, 0.375, 0.55, 0.725, 0.9};
  spec.aspect_ratios = {1.0, 2.0, 0.5};
  spec.frame = frame;
  return spec;
}

PriorBoxSet GeneratePriors(const PriorBoxSpec& spec,
                           const EncodingVariances& variances) {
  spec.Validate();
  PriorBoxSet set;
  set.variances = variances;
  const double fw = spec.frame.width;
  const double fh = spec.frame.height;
  const double side = std::sqrt(fw * fh);
  for (std::size_t g = 0; g < spec.grids.size(); ++g) {
    const GridSize grid = spec.grids[g];
    const double step_x = fw / grid.cols;
    const double step_y = fh / grid.rows;
    for (int row = 0; row < grid.rows; ++row) {
      for (int col = 0; col < grid.cols; ++col) {
        const double cx = (col + 0.5) * step_x;
        const double cy = (row + 0.5) * step_y;
        for (double ratio : spec.aspect_ratios) {
          const double root = std::sqrt(ratio);
          set.boxes.push_back(BoxFromCenter(cx, cy, spec.scales[g] * side * root,
                                            spec.scales[g] * side / root));
        }
      }
    }
  }
  return set;
}

int MatchAssignment::num_matched() const {
  return static_cast<int>(std::count_if(per_prior.begin(), per_prior.end(),
                                        [](const auto& m) { return m.has_value(); }));
}

MatchAssignment MatchPriors(const PriorBoxSet& priors,
                            std::span<const GroundTruthMicroTube> gts,
                            double threshold, Execution execution) {
  if (!(threshold > 0.0 && threshold <= 1.0)) {
    throw std::invalid_argument("match threshold must lie in (0, 1]");
  }
  if (gts.size() > priors.size()) {
    throw std::invalid_argument("insufficient priors");
  }
  const std::size_t num_priors = priors.size();
  const std::size_t num_gts = gts.size();

  MatchAssignment result;
  result.per_prior.assign(num_priors, std::nullopt);
  result.forced_prior.assign(num_gts, -1);
  if (num_gts == 0) return result;

  std::vector<MicroTubeBoxes> gt_boxes;
  gt_boxes.reserve(num_gts);
  for (const auto& g : gts) gt_boxes.push_back(g.boxes);
  const kernels::Matrix overlap =
      execution == Execution::kParallel
          ? kernels::MeanIouMatrix(priors.boxes, gt_boxes)
          : kernels::serial::MeanIouMatrix(priors.boxes, gt_boxes);

  // Bipartite step. Each round picks the best (prior, gt) pair among free
  // priors and unassigned gts; scanning in index order with a strict
  // comparison yields the lowest-index tie-break.
  std::vector<bool> prior_taken(num_priors, false);
  std::vector<bool> gt_done(num_gts, false);
  for (std::size_t round = 0; round < num_gts; ++round) {
    double best = -1.0;
    std::size_t best_prior = 0;
    std::size_t best_gt = 0;
    for (std::size_t i = 0; i < num_priors; ++i) {
      if (prior_taken[i]) continue;
      for (std::size_t j = 0; j < num_gts; ++j) {
        if (gt_done[j]) continue;
        if (overlap(i, j) > best) {
          best = overlap(i, j);
          best_prior = i;
          best_gt = j;
        }
      }
    }
    prior_taken[best_prior] = true;
    gt_done[best_gt] = true;
    result.forced_prior[best_gt] = static_cast<int>(best_prior);
    result.per_prior[best_prior] =
        PriorMatch{static_cast<int>(best_gt), gts[best_gt].class_id, best, true};
  }

  // Threshold step.
  for (std::size_t i = 0; i < num_priors; ++i) {
    if (prior_taken[i]) continue;
    std::size_t best_gt = 0;
    for (std::size_t j = 1; j < num_gts; ++j) {
      if (overlap(i, j) > overlap(i, best_gt)) best_gt = j;
    }
    if (overlap(i, best_gt) >= threshold) {
      result.per_prior[i] = PriorMatch{static_cast<int>(best_gt),
                                       gts[best_gt].class_id,
                                       overlap(i, best_gt), false};
    }
  }
  return result;
}

}  // namespace tubepred
