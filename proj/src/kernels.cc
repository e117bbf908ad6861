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

#include "tubepred/kernels.h"

#include "tubepred/metrics.h"

namespace tubepred::kernels {

Matrix MeanIouMatrix(std::span<const BoundingBox> priors,
                     std::span<const MicroTubeBoxes> gts) {
  Matrix out(priors.size(), gts.size());
  const auto rows = static_cast<long long>(priors.size());
  const auto cols = static_cast<long long>(gts.size());
#pragma omp parallel for collapse(2) schedule(static)
  for (long long i = 0; i < rows; ++i) {
    for (long long j = 0; j < cols; ++j) {
      out(i, j) = MeanIou(priors[i], gts[j]);
    }
  }
  return out;
}

Matrix MicroTubeIouMatrix(std::span<const MicroTubeBoxes> tubes) {
  const auto n = static_cast<long long>(tubes.size());
  Matrix out(tubes.size(), tubes.size());
  // Rows have uneven lengths (upper triangle), hence the dynamic schedule.
#pragma omp parallel for schedule(dynamic, 8)
  for (long long i = 0; i < n; ++i) {
    out(i, i) = MicroTubeIou(tubes[i], tubes[i]);
    for (long long j = i + 1; j < n; ++j) {
      const double v = MicroTubeIou(tubes[i], tubes[j]);
      out(i, j) = v;
      out(j, i) = v;
    }
  }
  return out;
}

Matrix TubeIouMatrix(std::span<const FrameBoxes* const> dets,
                     std::span<const FrameBoxes* const> gts) {
  Matrix out(dets.size(), gts.size());
  const auto rows = static_cast<long long>(dets.size());
  const auto cols = static_cast<long long>(gts.size());
#pragma omp parallel for collapse(2) schedule(dynamic, 4)
  for (long long i = 0; i < rows; ++i) {
    for (long long j = 0; j < cols; ++j) {
      out(i, j) = TubeIou(*dets[i], *gts[j]);
    }
  }
  return out;
}

namespace serial {

Matrix MeanIouMatrix(std::span<const BoundingBox> priors,
                     std::span<const MicroTubeBoxes> gts) {
  Matrix out(priors.size(), gts.size());
  for (std::size_t i = 0; i < priors.size(); ++i) {
    for (std::size_t j = 0; j < gts.size(); ++j) {
      out(i, j) = MeanIou(priors[i], gts[j]);
    }
  }
  return out;
}

Matrix MicroTubeIouMatrix(std::span<const MicroTubeBoxes> tubes) {
  Matrix out(tubes.size(), tubes.size());
  for (std::size_t i = 0; i < tubes.size(); ++i) {
    for (std::size_t j = 0; j < tubes.size(); ++j) {
      out(i, j) = MicroTubeIou(tubes[i], tubes[j]);
    }
  }
  return out;
}

Matrix TubeIouMatrix(std::span<const FrameBoxes* const> dets,
                     std::span<const FrameBoxes* const> gts) {
  Matrix out(dets.size(), gts.size());
  for (std::size_t i = 0; i < dets.size(); ++i) {
    for (std::size_t j = 0; j < gts.size(); ++j) {
      out(i, j) = TubeIou(*dets[i], *gts[j]);
    }
  }
  return out;
}

}  // namespace serial
}  // namespace tubepred::kernels
