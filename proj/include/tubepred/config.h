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


#ifndef TUBEPRED_CONFIG_H_
#define TUBEPRED_CONFIG_H_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "tubepred/anchors.h"
#include "tubepred/evaluation.h"
#include "tubepred/linking.h"
#include "tubepred/synth.h"
#include "tubepred/tube.h"

namespace tubepred {

// Every tunable of a run. Loaded from a JSON document whose keys mirror the
// command-line flags; flags given on the command line take precedence.
//
//   {"manifest": "...", "detections": "...", "output": "...", "seed": 0,
//    "nms": 0.45, "link_lambda": 1.0, "iou_gate": 0.1, "patience": 1,
//    "score_threshold": 0.01, "delta": 1, "horizon": [0, 5, 3],
//    "conflict": "most-recent" | "average", "match_threshold": 0.5,
//    "alpha": 1.0, "beta": 1.0, "delta_list": [...], "pct_list": [...],
//    "truncate_online_gt": true, "models": [[0, 5, 0], [0, 5, 3]],
//    "priors": {"grids": [[38, 38], ...], "scales": [...],
//               "aspect_ratios": [1, 2, 0.5], "frame": [320, 240]},
//    "scenario": {"videos": 100, "frames": 40, "frame": [320, 240],
//                 "classes": 3, "actors": 3, "center_sigma": 0.0,
//                 "size_sigma": 0.0, "prediction_sigma": 0.0,
//                 "score_temperature": 0.0, "score_margin": 8.0,
//                 "false_positive_rate": 0.0, "miss_rate": 0.0}}
struct RunConfig {
  std::string manifest;
  std::string detections;
  std::string output;
  std::uint64_t seed = 0;

  LinkParams link;
  PredictionHorizon horizon;
  // True once the horizon was set explicitly rather than left at its default.
  bool horizon_explicit = false;
  ConflictRule conflict = ConflictRule::kMostRecent;
  double match_threshold = kDefaultMatchThreshold;
  double alpha = 1.0;
  double beta = 1.0;
  std::vector<double> deltas = EvalOptions::DefaultDeltas();
  std::vector<int> observed_pcts = EvalOptions::DefaultObservedPcts();
  bool truncate_online_gt = true;

  // Horizons swept by `sweep` on synthetic data, one curve each.
  std::vector<PredictionHorizon> models = {
      {0, 5, 0}, {0, 5, 3}, {4, 5, 3}, {0, 5, 1}, {4, 5, 1}};
  RandomScenarioParams scenario;
  PriorBoxSpec priors = PriorBoxSpec::Default();

  EvalOptions ToEvalOptions() const;
  RandomScenarioParams ScenarioFor(const PredictionHorizon& horizon) const;
};

// Throws ParseError naming the offending key.
RunConfig ParseConfig(std::istream& in, const std::string& source = "<stream>");
RunConfig LoadConfig(const std::filesystem::path& path);

// "p,f,n" -> horizon.
PredictionHorizon ParseHorizon(const std::string& text);
std::vector<double> ParseDoubleList(const std::string& text);
std::vector<int> ParseIntList(const std::string& text);

}  // namespace tubepred

#endif  // TUBEPRED_CONFIG_H_
