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

#ifndef TUBEPRED_GEOMETRY_H_
#define TUBEPRED_GEOMETRY_H_

#include <map>
#include <span>
#include <vector>

namespace tubepred {

// Axis-aligned box with real-valued corners in pixel coordinates. Extents are
// half-open, so area is (x_max - x_min) * (y_max - y_min).
struct BoundingBox {
  double x_min = 0.0;
  double y_min = 0.0;
  double x_max = 0.0;
  double y_max = 0.0;

  double width() const { return x_max - x_min; }
  double height() const { return y_max - y_min; }
  double area() const { return width() * height(); }
  double center_x() const { return 0.5 * (x_min + x_max); }
  double center_y() const { return 0.5 * (y_min + y_max); }

  // Corners ordered and finite.
  bool valid() const;

  friend bool operator==(const BoundingBox&, const BoundingBox&) = default;
};

// Builds a box from center and size.
BoundingBox BoxFromCenter(double cx, double cy, double w, double h);

struct FrameSize {
  int width = 1;
  int height = 1;

  friend bool operator==(const FrameSize&, const FrameSize&) = default;
};

// SSD-style encoding variances.
struct EncodingVariances {
  double center = 0.1;
  double size = 0.2;
};

struct OffsetCode {
  double d_cx = 0.0;
  double d_cy = 0.0;
  double d_w = 0.0;
  double d_h = 0.0;
};

// The two implicitly linked boxes of a micro-tube, at frames t and t + delta.
struct MicroTubeBoxes {
  BoundingBox first;
  BoundingBox second;

  friend bool operator==(const MicroTubeBoxes&, const MicroTubeBoxes&) = default;
};

// A box tagged with the frame it belongs to.
struct TimedBox {
  int frame = 0;
  BoundingBox box;
};

// Per-frame boxes keyed by frame index.
using FrameBoxes = std::map<int, BoundingBox>;

// Intersection over union in [0, 1]. Zero when either box has zero area.
double Iou(const BoundingBox& a, const BoundingBox& b);

// Mean IoU between `prior` and every box of a ground-truth micro-tube.
// Throws std::invalid_argument("empty micro-tube") when `gt_boxes` is empty.
double MeanIou(const BoundingBox& prior, std::span<const BoundingBox> gt_boxes);

double MeanIou(const BoundingBox& prior, const MicroTubeBoxes& gt);

// Mean of the frame-wise IoUs of two micro-tubes.
double MicroTubeIou(const MicroTubeBoxes& a, const MicroTubeBoxes& b);

// Center-size offset encoding of `box` relative to `prior`. Both boxes need
// positive area; throws std::invalid_argument("degenerate box") otherwise.
OffsetCode EncodeOffsets(const BoundingBox& box, const BoundingBox& prior,
                         const EncodingVariances& variances = {});

// Inverse of EncodeOffsets.
BoundingBox DecodeOffsets(const OffsetCode& code, const BoundingBox& prior,
                          const EncodingVariances& variances = {});

// Clamps every coordinate to [0, width] x [0, height].
BoundingBox ClipBox(const BoundingBox& box, const FrameSize& frame);

// Number of trailing history boxes used to estimate extrapolation velocity.
inline constexpr int kVelocityWindow = 5;

// Constant-velocity continuation of `history`.
//
// The per-coordinate velocity is the mean per-frame first difference over the
// last min(kVelocityWindow, history.size()) entries. Each target box is the
// last history box moved by velocity * (target_frame - last_frame), clipped to
// `frame`. `history` must be ordered by strictly increasing frame, hold at
// least two boxes ("insufficient history" otherwise), and every target frame
// must lie after the last history frame.
std::vector<BoundingBox> Extrapolate(std::span<const TimedBox> history,
                                     std::span<const int> target_frames,
                                     const FrameSize& frame);

// Linear interpolation between two boxes, `alpha` in [0, 1].
BoundingBox Lerp(const BoundingBox& a, const BoundingBox& b, double alpha);

}  // namespace tubepred

#endif  // TUBEPRED_GEOMETRY_H_
