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


// Brute-force reference implementations shared by the unit and acceptance
// tests. Each one is written from the definition, deliberately avoiding the
// library code path it checks.

#ifndef TUBEPRED_TESTS_ORACLES_H_
#define TUBEPRED_TESTS_ORACLES_H_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "tubepred/geometry.h"
#include "tubepred/linking.h"
#include "tubepred/metrics.h"

namespace tubepred::oracle {

// IoU by counting the cells of a 1/res grid whose centers fall in each box.
// Exact for boxes whose corners lie on that grid.
inline double RasterIou(const BoundingBox& a, const BoundingBox& b, int res) {
  const auto inside = [](const BoundingBox& box, double x, double y) {
    return x > box.x_min && x < box.x_max && y > box.y_min && y < box.y_max;
  };
  const int x_lo = static_cast<int>(std::floor(std::min(a.x_min, b.x_min) * res));
  const int x_hi = static_cast<int>(std::ceil(std::max(a.x_max, b.x_max) * res));
  const int y_lo = static_cast<int>(std::floor(std::min(a.y_min, b.y_min) * res));
  const int y_hi = static_cast<int>(std::ceil(std::max(a.y_max, b.y_max) * res));
  long inter = 0, uni = 0;
  for (int i = x_lo; i < x_hi; ++i) {
    const double x = (i + 0.5) / res;
    for (int j = y_lo; j < y_hi; ++j) {
      const double y = (j + 0.5) / res;
      const bool in_a = inside(a, x, y), in_b = inside(b, x, y);
      inter += in_a && in_b;
      uni += in_a || in_b;
    }
  }
  if (a.area() <= 0.0 || b.area() <= 0.0 || uni == 0) return 0.0;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

// A box with corners on the 1/res grid inside [0, 34]^2.
inline BoundingBox SnappedBox(std::mt19937_64& rng, int res) {
  std::uniform_int_distribution<int> corner(0, 24 * res), extent(1, 10 * res);
  const double x = corner(rng), y = corner(rng);
  return {x / res, y / res, (x + extent(rng)) / res, (y + extent(rng)) / res};
}

inline BoundingBox RandomBox(std::mt19937_64& rng, double lo = 0.0,
                             double hi = 100.0, double max_size = 40.0) {
  std::uniform_real_distribution<double> pos(lo, hi), size(1.0, max_size);
  const double x = pos(rng), y = pos(rng);
  return {x, y, x + size(rng), y + size(rng)};
}

// Prior matching from the definition: sort every (prior, gt) pair by
// (-overlap, prior, gt) and take pairs whose prior and gt are both free, then
// threshold the leftover priors against their best gt (lowest index on ties).
struct OracleMatch {
  int gt = -1;
  bool forced = false;
};

inline std::vector<std::optional<OracleMatch>> MatchPriors(
    const std::vector<BoundingBox>& priors,
    const std::vector<MicroTubeBoxes>& gts, double threshold) {
  const auto overlap = [&](std::size_t i, std::size_t j) {
    return 0.5 * (Iou(priors[i], gts[j].first) + Iou(priors[i], gts[j].second));
  };
  std::vector<std::tuple<double, std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < priors.size(); ++i) {
    for (std::size_t j = 0; j < gts.size(); ++j) pairs.emplace_back(-overlap(i, j), i, j);
  }
  std::sort(pairs.begin(), pairs.end());
  std::vector<std::optional<OracleMatch>> out(priors.size());
  std::set<std::size_t> done_gts;
  for (const auto& [neg, i, j] : pairs) {
    if (out[i] || done_gts.count(j)) continue;
    out[i] = OracleMatch{static_cast<int>(j), true};
    done_gts.insert(j);
  }
  for (std::size_t i = 0; i < priors.size(); ++i) {
    if (out[i] || gts.empty()) continue;
    std::size_t best = 0;
    for (std::size_t j = 0; j < gts.size(); ++j) {
      if (overlap(i, j) > overlap(i, best)) best = j;
    }
    if (overlap(i, best) >= threshold) out[i] = OracleMatch{static_cast<int>(best), false};
  }
  return out;
}

// O(n^2) NMS: walk items by (descending score, index); keep an item unless an
// already kept item overlaps it by more than the threshold.
inline std::vector<std::size_t> Nms(const std::vector<ScoredMicroTube>& items,
                                    double threshold) {
  std::vector<std::pair<double, std::size_t>> ranked;
  for (std::size_t i = 0; i < items.size(); ++i) ranked.emplace_back(-items[i].score, i);
  std::sort(ranked.begin(), ranked.end());
  std::vector<std::size_t> kept;
  for (const auto& [neg, i] : ranked) {
    bool keep = true;
    for (std::size_t k : kept) {
      const double m = 0.5 * (Iou(items[k].boxes.first, items[i].boxes.first) +
                              Iou(items[k].boxes.second, items[i].boxes.second));
      if (m > threshold) keep = false;
    }
    if (keep) kept.push_back(i);
  }
  return kept;
}

// Mean per-frame IoU over the union of frames; absent frames contribute 0.
inline double TubeIou(const FrameBoxes& a, const FrameBoxes& b) {
  std::set<int> frames;
  for (const auto& [f, box] : a) frames.insert(f);
  for (const auto& [f, box] : b) frames.insert(f);
  if (frames.empty()) return 0.0;
  double sum = 0.0;
  for (int f : frames) {
    const auto ia = a.find(f), ib = b.find(f);
    if (ia != a.end() && ib != b.end()) sum += Iou(ia->second, ib->second);
  }
  return sum / static_cast<double>(frames.size());
}

// Every-point AP the VOC way: precision/recall arrays padded with sentinels,
// made monotone from the right, integrated where recall changes.
inline std::optional<double> AveragePrecision(const std::vector<ScoredTube>& dets,
                                              const std::vector<GtTube>& gts,
                                              double delta) {
  if (gts.empty()) return std::nullopt;
  std::vector<std::size_t> order(dets.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    return dets[x].score > dets[y].score;
  });
  std::vector<bool> claimed(gts.size(), false);
  std::vector<double> rec = {0.0}, prec = {0.0};
  int tp = 0, seen = 0;
  for (std::size_t i : order) {
    ++seen;
    int best = -1;
    double best_iou = -1.0;
    for (std::size_t j = 0; j < gts.size(); ++j) {
      if (claimed[j] || gts[j].video != dets[i].video) continue;
      const double o = oracle::TubeIou(dets[i].boxes, gts[j].boxes);
      if (o > best_iou) {
        best_iou = o;
        best = static_cast<int>(j);
      }
    }
    if (best >= 0 && best_iou >= delta) {
      claimed[best] = true;
      ++tp;
    }
    rec.push_back(static_cast<double>(tp) / gts.size());
    prec.push_back(static_cast<double>(tp) / seen);
  }
  rec.push_back(1.0);
  prec.push_back(0.0);
  for (std::size_t k = prec.size() - 1; k > 0; --k) prec[k - 1] = std::max(prec[k - 1], prec[k]);
  double ap = 0.0;
  for (std::size_t k = 1; k < rec.size(); ++k) ap += (rec[k] - rec[k - 1]) * prec[k];
  return ap;
}

}  // namespace tubepred::oracle

#endif  // TUBEPRED_TESTS_ORACLES_H_
