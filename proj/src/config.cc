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


#include "tubepred/config.h"

#include <fmt/format.h>

#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "tubepred/dataio.h"

namespace tubepred {
namespace {

using nlohmann::json;

template <typename T>
std::vector<T> ParseList(const std::string& text, const char* what) {
  std::vector<T> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::stringstream field(item);
    T value{};
    if (!(field >> value) || !(field >> std::ws).eof()) {
      throw std::invalid_argument(fmt::format("bad {} list entry '{}'", what, item));
    }
    out.push_back(value);
  }
  if (out.empty()) throw std::invalid_argument(fmt::format("empty {} list", what));
  return out;
}

PredictionHorizon HorizonFromJson(const json& value) {
  if (!value.is_array() || value.size() != 3) {
    throw std::invalid_argument("horizon must be [past_offset, future_step, num_future]");
  }
  PredictionHorizon h{value[0].get<int>(), value[1].get<int>(), value[2].get<int>()};
  h.Validate();
  return h;
}

}  // namespace

EvalOptions RunConfig::ToEvalOptions() const {
  EvalOptions options;
  options.link = link;
  options.horizon = horizon;
  options.conflict = conflict;
  options.deltas = deltas;
  options.observed_pcts = observed_pcts;
  options.truncate_online_gt = truncate_online_gt;
  options.Validate();
  return options;
}

RandomScenarioParams RunConfig::ScenarioFor(const PredictionHorizon& h) const {
  RandomScenarioParams params = scenario;
  params.seed = seed;
  params.horizon = h;
  params.delta = link.delta;
  return params;
}

RunConfig ParseConfig(std::istream& in, const std::string& source) {
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError(source, "document", fmt::format("invalid JSON ({})", e.what()));
  }
  if (!doc.is_object()) throw ParseError(source, "document", "expected an object");

  RunConfig cfg;
  std::string key;
  try {
    for (const auto& [k, value] : doc.items()) {
      key = k;
      if (k == "manifest") {
        cfg.manifest = value.get<std::string>();
      } else if (k == "detections") {
        cfg.detections = value.get<std::string>();
      } else if (k == "output") {
        cfg.output = value.get<std::string>();
      } else if (k == "seed") {
        cfg.seed = value.get<std::uint64_t>();
      } else if (k == "nms") {
        cfg.link.nms_threshold = value.get<double>();
      } else if (k == "link_lambda") {
        cfg.link.lambda = value.get<double>();
      } else if (k == "iou_gate") {
        cfg.link.iou_gate = value.get<double>();
      } else if (k == "patience") {
        cfg.link.patience = value.get<int>();
      } else if (k == "score_threshold") {
        cfg.link.score_threshold = value.get<double>();
      } else if (k == "delta") {
        cfg.link.delta = value.get<int>();
      } else if (k == "horizon") {
        cfg.horizon = HorizonFromJson(value);
        cfg.horizon_explicit = true;
      } else if (k == "conflict") {
        const auto rule = value.get<std::string>();
        if (rule == "most-recent") {
          cfg.conflict = ConflictRule::kMostRecent;
        } else if (rule == "average") {
          cfg.conflict = ConflictRule::kAverage;
        } else {
          throw std::invalid_argument("expected 'most-recent' or 'average'");
        }
      } else if (k == "match_threshold") {
        cfg.match_threshold = value.get<double>();
      } else if (k == "alpha") {
        cfg.alpha = value.get<double>();
      } else if (k == "beta") {
        cfg.beta = value.get<double>();
      } else if (k == "delta_list") {
        cfg.deltas = value.get<std::vector<double>>();
      } else if (k == "pct_list") {
        cfg.observed_pcts = value.get<std::vector<int>>();
      } else if (k == "truncate_online_gt") {
        cfg.truncate_online_gt = value.get<bool>();
      } else if (k == "models") {
        cfg.models.clear();
        for (const auto& h : value) cfg.models.push_back(HorizonFromJson(h));
      } else if (k == "priors") {
        auto& spec = cfg.priors;
        for (const auto& [pk, pv] : value.items()) {
          key = "priors." + pk;
          if (pk == "grids") {
            spec.grids.clear();
            for (const auto& g : pv) spec.grids.push_back({g.at(0).get<int>(), g.at(1).get<int>()});
          } else if (pk == "scales") {
            spec.scales = pv.get<std::vector<double>>();
          } else if (pk == "aspect_ratios") {
            spec.aspect_ratios = pv.get<std::vector<double>>();
          } else if (pk == "frame") {
            spec.frame = {pv.at(0).get<int>(), pv.at(1).get<int>()};
          } else {
            throw std::invalid_argument("unknown key");
          }
        }
        key = "priors";
        spec.Validate();
      } else if (k == "scenario") {
        auto& s = cfg.scenario;
        for (const auto& [sk, sv] : value.items()) {
          key = "scenario." + sk;
          if (sk == "videos") s.num_videos = sv.get<int>();
          else if (sk == "frames") s.num_frames = sv.get<int>();
          else if (sk == "frame") s.frame = {sv.at(0).get<int>(), sv.at(1).get<int>()};
          else if (sk == "classes") s.num_classes = sv.get<int>();
          else if (sk == "actors") s.actors_per_video = sv.get<int>();
          else if (sk == "center_sigma") s.noise.center_sigma = sv.get<double>();
          else if (sk == "size_sigma") s.noise.size_sigma = sv.get<double>();
          else if (sk == "prediction_sigma") s.noise.prediction_sigma = sv.get<double>();
          else if (sk == "score_temperature") s.noise.score_temperature = sv.get<double>();
          else if (sk == "score_margin") s.noise.score_margin = sv.get<double>();
          else if (sk == "false_positive_rate") s.noise.false_positive_rate = sv.get<double>();
          else if (sk == "miss_rate") s.noise.miss_rate = sv.get<double>();
          else throw std::invalid_argument("unknown key");
        }
      } else {
        throw std::invalid_argument("unknown key");
      }
    }
    cfg.link.Validate();
    if (!(cfg.match_threshold > 0.0 && cfg.match_threshold <= 1.0)) {
      key = "match_threshold";
      throw std::invalid_argument("must lie in (0, 1]");
    }
  } catch (const ParseError&) {
    throw;
  } catch (const std::exception& e) {
    throw ParseError(source, key.empty() ? "document" : key, e.what());
  }
  return cfg;
}

RunConfig LoadConfig(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(fmt::format("cannot open '{}'", path.string()));
  return ParseConfig(in, path.string());
}

PredictionHorizon ParseHorizon(const std::string& text) {
  const auto v = ParseList<int>(text, "horizon");
  if (v.size() != 3) {
    throw std::invalid_argument("horizon must be 'past_offset,future_step,num_future'");
  }
  PredictionHorizon h{v[0], v[1], v[2]};
  h.Validate();
  return h;
}

std::vector<double> ParseDoubleList(const std::string& text) {
  return ParseList<double>(text, "threshold");
}

std::vector<int> ParseIntList(const std::string& text) {
  return ParseList<int>(text, "percentage");
}

}  // namespace tubepred
