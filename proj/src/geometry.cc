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

#include "tubepred/geometry.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace tubepred {

bool BoundingBox::valid() const {
  return std::isfinite(x_min) && std::isfinite(y_min) && std::isfinite(x_max) &&
         std::isfinite(y_max) && x_min <= x_max && y_min <= y_max;
}

BoundingBox BoxFromCenter(double cx, double cy, double w, double h) {
  return {cx - 0.5 * w, cy - 0.5 * h, cx + 0.5 * w, cy + 0.5 * h};
}

double Iou(const BoundingBox& a, const BoundingBox& b) {
  const double area_a = a.area();
  const double area_b = b.area();
  if (area_a <= 0.0 || area_b <= 0.0) return 0.0;
  const double iw = std::min(a.x_max, b.x_max) - std::max(a.x_min, b.x_min);
  const double ih = std::min(a.y_max, b.y_max) - std::max(a.y_min, b.y_min);
  if (iw <= 0.0 || ih <= 0.0) return 0.0;
  const double inter = iw * ih;
  return std::clamp(inter / (area_a + area_b - inter), 0.0, 1.0);
}

double MeanIou(const BoundingBox& prior, std::span<const BoundingBox> gt_boxes) {
  if (gt_boxes.empty()) throw std::invalid_argument("empty micro-tube");
  double sum = 0.0;
  for (const auto& g : gt_boxes) sum += Iou(prior, g);
  return sum / static_cast<double>(gt_boxes.size());
}

double MeanIou(const BoundingBox& prior, const MicroTubeBoxes& gt) {
  return 0.5 * (Iou(prior, gt.first) + Iou(prior, gt.second));
}

double MicroTubeIou(const MicroTubeBoxes& a, const MicroTubeBoxes& b) {
  return 0.5 * (Iou(a.first, b.first) + Iou(a.second, b.second));
}

OffsetCode EncodeOffsets(const BoundingBox& box, const BoundingBox& prior,
                         const EncodingVariances& variances) {
  if (!(box.width() > 0.0 && box.height() > 0.0 && prior.width() > 0.0 &&
        prior.height() > 0.0)) {
    throw std::invalid_argument("degenerate box");
  }
  if (!(variances.center > 0.0 && variances.size > 0.0)) {
    throw std::invalid_argument("encoding variances must be positive");
  }
  const double pw = prior.width();
  const double ph = prior.height();
  return {
      (box.center_x() - prior.center_x()) / (pw * variances.center),
      (box.center_y() - prior.center_y()) / (ph * variances.center),
      std::log(box.width() / pw) / variances.size,
      std::log(box.height() / ph) / variances.size,
  };
}

BoundingBox DecodeOffsets(const OffsetCode& code, const BoundingBox& prior,
                          const EncodingVariances& variances) {
  if (!(std::isfinite(code.d_cx) && std::isfinite(code.d_cy) &&
        std::isfinite(code.d_w) && std::isfinite(code.d_h))) {
    throw std::invalid_argument("non-finite offset code");
  }
  if (!(prior.width() > 0.0 && prior.height() > 0.0)) {
    throw std::invalid_argument("degenerate box");
  }
  const double pw = prior.width();
  const double ph = prior.height();
  const double cx = prior.center_x() + code.d_cx * variances.center * pw;
  const double cy = prior.center_y() + code.d_cy * variances.center * ph;
  const double w = pw * std::exp(code.d_w * variances.size);
  const double h = ph * std::exp(code.d_h * variances.size);
  return BoxFromCenter(cx, cy, w, h);
}

BoundingBox ClipBox(const BoundingBox& box, const FrameSize& frame) {
  const double w = frame.width;
  const double h = frame.height;
  return {std::clamp(box.x_min, 0.0, w), std::clamp(box.y_min, 0.0, h),
          std::clamp(box.x_max, 0.0, w), std::clamp(box.y_max, 0.0, h)};
}

std::vector<BoundingBox> Extrapolate(std::span<const TimedBox> history,
                                     std::span<const int> target_frames,
                                     const FrameSize& frame) {
  if (history.size() < 2) throw std::invalid_argument("insufficient history");
  for (std::size_t i = 1; i < history.size(); ++i) {
    if (history[i].frame <= history[i - 1].frame) {
      throw std::invalid_argument("history frames must be strictly increasing");
    }
  }
  const std::size_t window =
      std::min<std::size_t>(kVelocityWindow, history.size());
  const auto recent = history.subspan(history.size() - window);

  double vx0 = 0.0, vy0 = 0.0, vx1 = 0.0, vy1 = 0.0;
  for (std::size_t i = 1; i < recent.size(); ++i) {
    const double gap = recent[i].frame - recent[i - 1].frame;
    vx0 += (recent[i].box.x_min - recent[i - 1].box.x_min) / gap;
    vy0 += (recent[i].box.y_min - recent[i - 1].box.y_min) / gap;
    vx1 += (recent[i].box.x_max - recent[i - 1].box.x_max) / gap;
    vy1 += (recent[i].box.y_max - recent[i - 1].box.y_max) / gap;
  }
  const double steps = static_cast<double>(recent.size() - 1);
  vx0 /= steps;
  vy0 /= steps;
  vx1 /= steps;
  vy1 /= steps;

  const TimedBox& last = history.back();
  std::vector<BoundingBox> out;
  out.reserve(target_frames.size());
  for (int f : target_frames) {
    if (f <= last.frame) {
      throw std::invalid_argument("target frame precedes end of history");
    }
    const double dt = f - last.frame;
    BoundingBox moved{last.box.x_min + vx0 * dt, last.box.y_min + vy0 * dt,
                      last.box.x_max + vx1 * dt, last.box.y_max + vy1 * dt};
    // Coordinates moving at different rates can cross; keep the box ordered.
    if (moved.x_max < moved.x_min) moved.x_min = moved.x_max = moved.center_x();
    if (moved.y_max < moved.y_min) moved.y_min = moved.y_max = moved.center_y();
    out.push_back(ClipBox(moved, frame));
  }
  return out;
}

BoundingBox Lerp(const BoundingBox& a, const BoundingBox& b, double alpha) {
  const double beta = 1.0 - alpha;
  return {beta * a.x_min + alpha * b.x_min, beta * a.y_min + alpha * b.y_min,
          beta * a.x_max + alpha * b.x_max, beta * a.y_max + alpha * b.y_max};
}

}  // namespace tubepred
