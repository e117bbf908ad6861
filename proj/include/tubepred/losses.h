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

// Multi-task training objective of the tube prediction network, written as
// plain functions over flat arrays so each term can be checked numerically.
//
// Layouts (P priors, C foreground classes, n future steps):
//   class logits        P x (C + 1), column 0 is background
//   micro-tube offsets  P x 8, the two encoded boxes at t and t + delta
//   prediction offsets  P x 4(1 + n), past box first, then the n future boxes
//   prediction mask     P x (1 + n), nonzero when that target box exists

#ifndef TUBEPRED_LOSSES_H_
#define TUBEPRED_LOSSES_H_

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "tubepred/anchors.h"
#include "tubepred/geometry.h"

namespace tubepred {

// Sum over coordinates of 0.5 d^2 when |d| < 1, |d| - 0.5 otherwise.
double SmoothL1(std::span<const double> pred, std::span<const double> target);
std::vector<double> SmoothL1Gradient(std::span<const double> pred,
                                     std::span<const double> target);

// -log softmax(logits)[label] with max subtraction.
double SoftmaxCrossEntropy(std::span<const double> logits, int label);
std::vector<double> SoftmaxCrossEntropyGradient(std::span<const double> logits,
                                                int label);

inline constexpr double kDefaultNegativeRatio = 3.0;

// Picks the hardest negatives: the min(floor(ratio * n_matched), #candidates)
// candidates with highest loss, or the single hardest one when n_matched is 0.
// Ties go to the lower index. Returned in selection order.
std::vector<std::size_t> HardNegativeMining(std::span<const double> losses,
                                            std::span<const std::uint8_t> is_candidate,
                                            int n_matched,
                                            double ratio = kDefaultNegativeRatio);

struct LossTargets {
  std::vector<double> microtube;   // P x 8
  std::vector<double> prediction;  // P x 4(1 + n)
  std::vector<std::uint8_t> mask;  // P x (1 + n)
};

// Encodes every matched prior's ground truth against that prior. Rows of
// unmatched priors stay zero with a zero mask. With `past_offset` == 0 the past
// slot duplicates the micro-tube's first box, so it is masked out.
LossTargets EncodeLossTargets(const PriorBoxSet& priors,
                              std::span<const GroundTruthMicroTube> gts,
                              const MatchAssignment& assignment, int num_future,
                              int past_offset);

struct LossInputs {
  int num_priors = 0;
  int num_classes = 0;  // foreground classes; logits have num_classes + 1
  int num_future = 0;
  std::vector<double> class_logits;
  std::vector<double> microtube_offsets;
  std::vector<double> prediction_offsets;
  MatchAssignment assignment;
  LossTargets targets;
  double alpha = 1.0;
  double beta = 1.0;
  double negative_ratio = kDefaultNegativeRatio;

  // Throws std::invalid_argument on any dimension mismatch.
  void Validate() const;
};

struct LossBreakdown {
  double total = 0.0;
  double cls = 0.0;
  double reg = 0.0;
  double pred = 0.0;
  int n_matched = 0;
};

// (L_cls + alpha L_reg + beta L_pred) / max(N, 1). Matched priors use label
// class_id + 1; mined negatives use label 0.
LossBreakdown TotalLoss(const LossInputs& inputs);

using ScalarFn = std::function<double(std::span<const double>)>;
using GradientFn = std::function<std::vector<double>(std::span<const double>)>;

// Largest relative error between `gradient(x)` and central differences of `f`
// with step `epsilon`. The denominator is floored at 1e-3 so coordinates with
// near-zero gradient are judged on absolute error. Coordinates flagged in
// `skip` (when non-empty) are not compared.
double MaxRelativeGradientError(const ScalarFn& f, const GradientFn& gradient,
                                std::span<const double> x, double epsilon,
                                std::span<const std::uint8_t> skip = {});

struct GradCheckReport {
  double smooth_l1_max_rel_error = 0.0;
  double cross_entropy_max_rel_error = 0.0;
  int smooth_l1_points = 0;
  int cross_entropy_points = 0;
  // Coordinates within 2 * epsilon of the |d| = 1 kink are not differentiated.
  int kink_points_skipped = 0;

  double max_rel_error() const;
};

// Random-probe gradient check of SmoothL1 and SoftmaxCrossEntropy.
GradCheckReport GradCheck(std::uint64_t seed, int trials = 200,
                          double epsilon = 1e-5);

}  // namespace tubepred

#endif  // TUBEPRED_LOSSES_H_
