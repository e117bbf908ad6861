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

#include "tubepred/losses.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>

namespace tubepred {
namespace {

void CheckSameLength(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw std::invalid_argument("smooth L1 length mismatch");
  }
}

void CheckLabel(std::span<const double> logits, int label) {
  if (label < 0 || static_cast<std::size_t>(label) >= logits.size()) {
    throw std::invalid_argument("class label out of range");
  }
}

void Append(std::vector<double>& dst, const OffsetCode& code) {
  dst.insert(dst.end(), {code.d_cx, code.d_cy, code.d_w, code.d_h});
}

}  // namespace

double SmoothL1(std::span<const double> pred, std::span<const double> target) {
  CheckSameLength(pred, target);
  double sum = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double d = std::abs(pred[i] - target[i]);
    sum += d < 1.0 ? 0.5 * d * d : d - 0.5;
  }
  return sum;
}

std::vector<double> SmoothL1Gradient(std::span<const double> pred,
                                     std::span<const double> target) {
  CheckSameLength(pred, target);
  std::vector<double> grad(pred.size());
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double d = pred[i] - target[i];
    grad[i] = std::abs(d) < 1.0 ? d : (d > 0.0 ? 1.0 : -1.0);
  }
  return grad;
}

double SoftmaxCrossEntropy(std::span<const double> logits, int label) {
  CheckLabel(logits, label);
  const auto peak_at = std::max_element(logits.begin(), logits.end());
  const double peak = *peak_at;
  // log(sum) = log1p(sum without the peak's own 1), exact for saturated logits.
  double rest = 0.0;
  for (auto it = logits.begin(); it != logits.end(); ++it) {
    if (it != peak_at) rest += std::exp(*it - peak);
  }
  return std::log1p(rest) - (logits[label] - peak);
}

std::vector<double> SoftmaxCrossEntropyGradient(std::span<const double> logits,
                                                int label) {
  CheckLabel(logits, label);
  const double peak = *std::max_element(logits.begin(), logits.end());
  std::vector<double> grad(logits.size());
  double denom = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    grad[i] = std::exp(logits[i] - peak);
    denom += grad[i];
  }
  for (double& g : grad) g /= denom;
  grad[label] -= 1.0;
  return grad;
}

std::vector<std::size_t> HardNegativeMining(std::span<const double> losses,
                                            std::span<const std::uint8_t> is_candidate,
                                            int n_matched, double ratio) {
  if (!(ratio > 0.0)) throw std::invalid_argument("negative ratio must be > 0");
  if (losses.size() != is_candidate.size()) {
    throw std::invalid_argument("candidate mask length mismatch");
  }
  std::vector<std::size_t> candidates;
  for (std::size_t i = 0; i < losses.size(); ++i) {
    if (is_candidate[i]) candidates.push_back(i);
  }
  const std::size_t quota =
      n_matched <= 0
          ? 1
          : static_cast<std::size_t>(std::floor(ratio * n_matched));
  const std::size_t keep = std::min(quota, candidates.size());
  std::partial_sort(candidates.begin(), candidates.begin() + keep,
                    candidates.end(), [&](std::size_t a, std::size_t b) {
                      if (losses[a] != losses[b]) return losses[a] > losses[b];
                      return a < b;
                    });
  candidates.resize(keep);
  return candidates;
}

LossTargets EncodeLossTargets(const PriorBoxSet& priors,
                              std::span<const GroundTruthMicroTube> gts,
                              const MatchAssignment& assignment, int num_future,
                              int past_offset) {
  if (assignment.per_prior.size() != priors.size()) {
    throw std::invalid_argument("assignment does not cover the prior set");
  }
  const std::size_t slots = 1 + static_cast<std::size_t>(num_future);
  LossTargets out;
  out.microtube.reserve(priors.size() * 8);
  out.prediction.reserve(priors.size() * 4 * slots);
  out.mask.reserve(priors.size() * slots);
  for (std::size_t i = 0; i < priors.size(); ++i) {
    const auto& match = assignment.per_prior[i];
    if (!match) {
      out.microtube.insert(out.microtube.end(), 8, 0.0);
      out.prediction.insert(out.prediction.end(), 4 * slots, 0.0);
      out.mask.insert(out.mask.end(), slots, 0);
      continue;
    }
    const auto& prior = priors.boxes[i];
    const auto& gt = gts[match->gt_index];
    Append(out.microtube, EncodeOffsets(gt.boxes.first, prior, priors.variances));
    Append(out.microtube, EncodeOffsets(gt.boxes.second, prior, priors.variances));
    for (std::size_t k = 0; k < slots; ++k) {
      const bool present = k < gt.horizon_boxes.size() &&
                           gt.horizon_boxes[k].has_value() &&
                           gt.horizon_boxes[k]->area() > 0.0 &&
                           !(k == 0 && past_offset == 0);
      if (present) {
        Append(out.prediction,
               EncodeOffsets(*gt.horizon_boxes[k], prior, priors.variances));
      } else {
        out.prediction.insert(out.prediction.end(), 4, 0.0);
      }
      out.mask.push_back(present ? 1 : 0);
    }
  }
  return out;
}

void LossInputs::Validate() const {
  if (num_priors < 0 || num_classes < 0 || num_future < 0) {
    throw std::invalid_argument("loss dimensions must be non-negative");
  }
  const auto p = static_cast<std::size_t>(num_priors);
  const std::size_t slots = 1 + static_cast<std::size_t>(num_future);
  const auto expect = [](std::size_t got, std::size_t want, const char* what) {
    if (got != want) {
      throw std::invalid_argument(std::string("dimension mismatch: ") + what);
    }
  };
  expect(class_logits.size(), p * (num_classes + 1), "class logits");
  expect(microtube_offsets.size(), p * 8, "micro-tube offsets");
  expect(prediction_offsets.size(), p * 4 * slots, "prediction offsets");
  expect(assignment.per_prior.size(), p, "match assignment");
  expect(targets.microtube.size(), p * 8, "micro-tube targets");
  expect(targets.prediction.size(), p * 4 * slots, "prediction targets");
  expect(targets.mask.size(), p * slots, "prediction mask");
  if (!(alpha >= 0.0 && beta >= 0.0)) {
    throw std::invalid_argument("alpha and beta must be non-negative");
  }
  for (const auto& m : assignment.per_prior) {
    if (m && (m->class_id < 0 || m->class_id >= num_classes)) {
      throw std::invalid_argument("matched class outside the logit range");
    }
  }
}

LossBreakdown TotalLoss(const LossInputs& in) {
  in.Validate();
  const auto p = static_cast<std::size_t>(in.num_priors);
  const std::size_t width = in.num_classes + 1;
  const std::size_t slots = 1 + static_cast<std::size_t>(in.num_future);
  const std::span<const double> logits(in.class_logits);

  LossBreakdown out;
  std::vector<double> background_loss(p, 0.0);
  std::vector<std::uint8_t> is_negative(p, 0);
  for (std::size_t i = 0; i < p; ++i) {
    const auto row = logits.subspan(i * width, width);
    const auto& match = in.assignment.per_prior[i];
    if (!match) {
      background_loss[i] = SoftmaxCrossEntropy(row, 0);
      is_negative[i] = 1;
      continue;
    }
    ++out.n_matched;
    out.cls += SoftmaxCrossEntropy(row, match->class_id + 1);
    out.reg += SmoothL1(std::span(in.microtube_offsets).subspan(i * 8, 8),
                        std::span(in.targets.microtube).subspan(i * 8, 8));
    for (std::size_t k = 0; k < slots; ++k) {
      if (!in.targets.mask[i * slots + k]) continue;
      const std::size_t at = (i * slots + k) * 4;
      out.pred += SmoothL1(std::span(in.prediction_offsets).subspan(at, 4),
                           std::span(in.targets.prediction).subspan(at, 4));
    }
  }
  for (std::size_t i : HardNegativeMining(background_loss, is_negative,
                                          out.n_matched, in.negative_ratio)) {
    out.cls += background_loss[i];
  }
  out.total = (out.cls + in.alpha * out.reg + in.beta * out.pred) /
              std::max(out.n_matched, 1);
  return out;
}

double MaxRelativeGradientError(const ScalarFn& f, const GradientFn& gradient,
                                std::span<const double> x, double epsilon,
                                std::span<const std::uint8_t> skip) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be > 0");
  const std::vector<double> analytic = gradient(x);
  std::vector<double> probe(x.begin(), x.end());
  double worst = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!skip.empty() && skip[i]) continue;
    probe[i] = x[i] + epsilon;
    const double up = f(probe);
    probe[i] = x[i] - epsilon;
    const double down = f(probe);
    probe[i] = x[i];
    const double numeric = (up - down) / (2.0 * epsilon);
    const double denom =
        std::max({std::abs(numeric), std::abs(analytic[i]), 1e-3});
    worst = std::max(worst, std::abs(numeric - analytic[i]) / denom);
  }
  return worst;
}

double GradCheckReport::max_rel_error() const {
  return std::max(smooth_l1_max_rel_error, cross_entropy_max_rel_error);
}

GradCheckReport GradCheck(std::uint64_t seed, int trials, double epsilon) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> diff(-3.0, 3.0);
  std::normal_distribution<double> logit(0.0, 3.0);
  std::uniform_int_distribution<int> width(2, 22);

  GradCheckReport report;
  for (int trial = 0; trial < trials; ++trial) {
    const std::size_t n = 8;
    std::vector<double> target(n), pred(n);
    std::vector<std::uint8_t> near_kink(n);
    for (std::size_t i = 0; i < n; ++i) {
      target[i] = diff(rng);
      pred[i] = target[i] + diff(rng);
      near_kink[i] = std::abs(std::abs(pred[i] - target[i]) - 1.0) < 2 * epsilon;
      report.kink_points_skipped += near_kink[i];
    }
    const double sl1 = MaxRelativeGradientError(
        [&](std::span<const double> p) { return SmoothL1(p, target); },
        [&](std::span<const double> p) { return SmoothL1Gradient(p, target); },
        pred, epsilon, near_kink);
    report.smooth_l1_max_rel_error = std::max(report.smooth_l1_max_rel_error, sl1);
    report.smooth_l1_points += static_cast<int>(n);

    const int classes = width(rng);
    std::vector<double> logits(classes);
    for (double& z : logits) z = logit(rng);
    const int label = std::uniform_int_distribution<int>(0, classes - 1)(rng);
    const double ce = MaxRelativeGradientError(
        [&](std::span<const double> z) { return SoftmaxCrossEntropy(z, label); },
        [&](std::span<const double> z) {
          return SoftmaxCrossEntropyGradient(z, label);
        },
        logits, epsilon);
    report.cross_entropy_max_rel_error =
        std::max(report.cross_entropy_max_rel_error, ce);
    report.cross_entropy_points += classes;
  }
  return report;
}

}  // namespace tubepred
