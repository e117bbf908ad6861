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


// tubepred: synthesize, link, predict and evaluate action tubes.

#include <fmt/format.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "tubepred/config.h"
#include "tubepred/dataio.h"
#include "tubepred/evaluation.h"
#include "tubepred/losses.h"
#include "tubepred/synth.h"

namespace tubepred {
namespace {

namespace fs = std::filesystem;

// Flags shared by every subcommand. Unset flags leave the config value alone.
struct Overrides {
  std::string config;
  std::optional<std::string> manifest, detections, output;
  std::optional<std::uint64_t> seed;
  std::optional<double> nms, link_lambda, iou_gate, score_threshold;
  std::optional<int> patience, delta;
  std::optional<std::string> horizon, conflict, delta_list, pct_list;
  bool full_online_gt = false;
};

void AddCommon(CLI::App* sub, Overrides& o) {
  sub->add_option("--config", o.config, "JSON run configuration")
      ->check(CLI::ExistingFile);
  sub->add_option("--manifest", o.manifest, "dataset manifest (JSON)");
  sub->add_option("--detections", o.detections, "micro-tube detections (JSON lines)");
  sub->add_option("-o,--output", o.output, "output path");
  sub->add_option("--seed", o.seed, "random seed");
  sub->add_option("--nms", o.nms, "micro-tube NMS threshold");
  sub->add_option("--link-lambda", o.link_lambda, "weight of the overlap in the link score");
  sub->add_option("--iou-gate", o.iou_gate, "minimum overlap for a link");
  sub->add_option("--patience", o.patience, "missed steps before a tube ends");
  sub->add_option("--score-threshold", o.score_threshold, "per-class score floor");
  sub->add_option("--delta", o.delta, "frame gap inside a micro-tube");
  sub->add_option("--horizon", o.horizon, "prediction horizon as past,step,count");
  sub->add_option("--conflict", o.conflict, "most-recent or average")
      ->check(CLI::IsMember({"most-recent", "average"}));
  sub->add_option("--delta-list", o.delta_list, "comma-separated overlap thresholds");
  sub->add_option("--pct-list", o.pct_list, "comma-separated observation percentages");
  sub->add_flag("--full-online-gt", o.full_online_gt,
                "score online detections against the full ground truth");
}

RunConfig Resolve(const Overrides& o) {
  RunConfig cfg = o.config.empty() ? RunConfig{} : LoadConfig(o.config);
  if (o.manifest) cfg.manifest = *o.manifest;
  if (o.detections) cfg.detections = *o.detections;
  if (o.output) cfg.output = *o.output;
  if (o.seed) cfg.seed = *o.seed;
  if (o.nms) cfg.link.nms_threshold = *o.nms;
  if (o.link_lambda) cfg.link.lambda = *o.link_lambda;
  if (o.iou_gate) cfg.link.iou_gate = *o.iou_gate;
  if (o.patience) cfg.link.patience = *o.patience;
  if (o.score_threshold) cfg.link.score_threshold = *o.score_threshold;
  if (o.delta) cfg.link.delta = *o.delta;
  if (o.horizon) {
    cfg.horizon = ParseHorizon(*o.horizon);
    cfg.horizon_explicit = true;
  }
  if (o.conflict) {
    cfg.conflict = *o.conflict == "average" ? ConflictRule::kAverage
                                            : ConflictRule::kMostRecent;
  }
  if (o.delta_list) cfg.deltas = ParseDoubleList(*o.delta_list);
  if (o.pct_list) cfg.observed_pcts = ParseIntList(*o.pct_list);
  if (o.full_online_gt) cfg.truncate_online_gt = false;
  cfg.link.Validate();
  return cfg;
}

const std::string& Require(const std::string& value, const char* what) {
  if (value.empty()) throw std::invalid_argument(fmt::format("missing {}", what));
  return value;
}

// The horizon the detections were produced with. A file that mixes horizons
// or disagrees with an explicit horizon is rejected.
PredictionHorizon ResolveHorizon(const RunConfig& cfg,
                                 std::span<const DetectionRecord> records) {
  if (records.empty()) return cfg.horizon;
  const PredictionHorizon found = records.front().horizon;
  for (const auto& r : records) {
    if (!(r.horizon == found)) {
      throw std::invalid_argument("detections mix several prediction horizons");
    }
  }
  if (cfg.horizon_explicit && !(cfg.horizon == found)) {
    throw std::invalid_argument(fmt::format(
        "horizon {} does not match the detections ({})", cfg.horizon.Tag(),
        found.Tag()));
  }
  return found;
}

struct Inputs {
  DatasetManifest manifest;
  std::vector<DetectionRecord> records;
  DetectionsByVideo by_video;
  PredictionHorizon horizon;
};

Inputs LoadInputs(const RunConfig& cfg, const std::string& detections) {
  Inputs in;
  in.manifest = ReadManifest(fs::path(Require(cfg.manifest, "--manifest")));
  in.records = ReadDetections(fs::path(Require(detections, "--detections")));
  in.by_video = GroupByVideo(in.records);
  in.horizon = ResolveHorizon(cfg, in.records);
  return in;
}

template <typename WriteFn>
void Emit(const std::string& output, WriteFn&& write) {
  if (output.empty() || output == "-") {
    write(std::cout);
    std::cout.flush();
    return;
  }
  std::ofstream out(output);
  if (!out) throw std::runtime_error(fmt::format("cannot write '{}'", output));
  write(out);
  if (!out) throw std::runtime_error(fmt::format("write to '{}' failed", output));
}

int RunSynth(const RunConfig& cfg) {
  const fs::path dir(Require(cfg.output, "--output directory"));
  fs::create_directories(dir);
  const SynthOutput data = Generate(MakeRandomScenario(cfg.ScenarioFor(cfg.horizon)));
  WriteManifest(dir / "manifest.json", data.manifest);
  WriteDetections(dir / "detections.jsonl", data.detections);
  std::cerr << fmt::format("wrote {} videos and {} detections to {}\n",
                           data.manifest.videos.size(), data.detections.size(),
                           dir.string());
  return 0;
}

// Links every video observed up to `observed_pct`; predicted segments are
// kept only when `with_prediction` is set.
int RunTubes(const RunConfig& cfg, int observed_pct, bool with_prediction) {
  if (observed_pct < 1 || observed_pct > 100) {
    throw std::invalid_argument("--pct must lie in [1, 100]");
  }
  const Inputs in = LoadInputs(cfg, cfg.detections);
  EvalOptions options = cfg.ToEvalOptions();
  options.horizon = in.horizon;
  std::vector<VideoTubes> videos(in.manifest.videos.size());
  kernels::ForEachIndex(videos.size(), Execution::kParallel, [&](std::size_t v) {
    const VideoAnnotation& video = in.manifest.videos[v];
    VideoTubes& out = videos[v];
    out.id = video.id;
    out.num_frames = video.num_frames;
    out.observed_frame = ObservedFrame(observed_pct, video.num_frames);
    const auto it = in.by_video.find(video.id);
    if (it == in.by_video.end()) return;
    out.tubes = ObserveAndPredict(video, it->second, in.manifest.num_classes(),
                                  out.observed_frame, options);
    if (!with_prediction) {
      for (auto& tube : out.tubes) tube.predicted.clear();
    }
  });
  Emit(cfg.output, [&](std::ostream& os) { WriteTubes(os, videos); });
  return 0;
}

int RunEval(const RunConfig& cfg) {
  const Inputs in = LoadInputs(cfg, cfg.detections);
  EvalOptions options = cfg.ToEvalOptions();
  options.horizon = in.horizon;
  const EvalReport report = EvaluateSweep(in.manifest, in.by_video, options);
  Emit(cfg.output, [&](std::ostream& os) { WriteReport(os, report); });
  return 0;
}

int RunSweep(const RunConfig& cfg, const std::vector<std::string>& models) {
  std::vector<SweepRow> rows;
  const auto append = [&](const std::string& tag, const EvalReport& report) {
    const auto part = SweepRows(tag, report);
    rows.insert(rows.end(), part.begin(), part.end());
  };
  if (!models.empty() || !cfg.detections.empty()) {
    std::vector<std::pair<std::string, std::string>> sources;
    for (const auto& m : models) {
      const auto eq = m.find('=');
      if (eq == std::string::npos || eq == 0 || eq + 1 == m.size()) {
        throw std::invalid_argument(fmt::format("--model expects tag=path, got '{}'", m));
      }
      sources.emplace_back(m.substr(0, eq), m.substr(eq + 1));
    }
    if (sources.empty()) sources.emplace_back("", cfg.detections);
    for (const auto& [tag, path] : sources) {
      const Inputs in = LoadInputs(cfg, path);
      EvalOptions options = cfg.ToEvalOptions();
      options.horizon = in.horizon;
      append(tag.empty() ? in.horizon.Tag() : tag,
             EvaluateSweep(in.manifest, in.by_video, options));
    }
  } else {
    if (!cfg.manifest.empty()) {
      throw std::invalid_argument("--manifest needs --detections or --model");
    }
    for (const auto& horizon : cfg.models) {
      const SynthOutput data = Generate(MakeRandomScenario(cfg.ScenarioFor(horizon)));
      EvalOptions options = cfg.ToEvalOptions();
      options.horizon = horizon;
      append(horizon.Tag(),
             EvaluateSweep(data.manifest, GroupByVideo(data.detections), options));
    }
  }
  Emit(cfg.output, [&](std::ostream& os) { WriteSweep(os, rows); });
  return 0;
}

int RunCheckLoss(const RunConfig& cfg, int trials, double epsilon,
                 double tolerance) {
  const GradCheckReport r = GradCheck(cfg.seed, trials, epsilon);
  const bool ok = r.max_rel_error() < tolerance;
  std::cout << fmt::format(
      "smooth_l1      max_rel_error={:.3e} points={}\n"
      "cross_entropy  max_rel_error={:.3e} points={}\n"
      "kink_points_skipped={}\n"
      "max_rel_error={:.3e} tolerance={:.1e} {}\n",
      r.smooth_l1_max_rel_error, r.smooth_l1_points,
      r.cross_entropy_max_rel_error, r.cross_entropy_points,
      r.kink_points_skipped, r.max_rel_error(), tolerance, ok ? "PASS" : "FAIL");
  return ok ? 0 : 1;
}

int Main(int argc, char** argv) {
  CLI::App app{"Online action-tube linking, future prediction and evaluation"};
  app.require_subcommand(1);
  Overrides o;

  auto* synth = app.add_subcommand("synth", "generate a synthetic dataset and detections");
  AddCommon(synth, o);
  std::optional<int> videos, frames;
  std::optional<double> center_sigma, miss_rate, fp_rate, temperature, pred_sigma;
  synth->add_option("--videos", videos, "number of videos");
  synth->add_option("--frames", frames, "frames per video");
  synth->add_option("--center-sigma", center_sigma, "box center jitter in pixels");
  synth->add_option("--prediction-sigma", pred_sigma, "predicted box jitter in pixels");
  synth->add_option("--score-temperature", temperature, "class score noise");
  synth->add_option("--miss-rate", miss_rate, "per actor and frame pair");
  synth->add_option("--false-positive-rate", fp_rate, "per frame pair");

  int pct = 100;
  auto* link = app.add_subcommand("link", "link detections into tubes");
  AddCommon(link, o);
  link->add_option("--pct", pct, "observation percentage");
  auto* predict = app.add_subcommand("predict", "link and predict the unobserved future");
  AddCommon(predict, o);
  predict->add_option("--pct", pct, "observation percentage");

  auto* eval = app.add_subcommand("eval", "write the metric report CSV");
  AddCommon(eval, o);

  std::vector<std::string> models;
  auto* sweep = app.add_subcommand(
      "sweep", "metric-vs-observation table per model, on synthetic data by default");
  AddCommon(sweep, o);
  sweep->add_option("--model", models, "tag=detections.jsonl, repeatable");

  int trials = 200;
  double epsilon = 1e-5;
  double tolerance = 1e-4;
  auto* check = app.add_subcommand("check-loss", "finite-difference check of the loss gradients");
  AddCommon(check, o);
  check->add_option("--trials", trials, "random probes")->check(CLI::PositiveNumber);
  check->add_option("--epsilon", epsilon, "finite-difference step")->check(CLI::PositiveNumber);
  check->add_option("--tolerance", tolerance, "maximum relative error");

  CLI11_PARSE(app, argc, argv);

  try {
    RunConfig cfg = Resolve(o);
    if (synth->parsed()) {
      auto& s = cfg.scenario;
      if (videos) s.num_videos = *videos;
      if (frames) s.num_frames = *frames;
      if (center_sigma) s.noise.center_sigma = *center_sigma;
      if (pred_sigma) s.noise.prediction_sigma = *pred_sigma;
      if (temperature) s.noise.score_temperature = *temperature;
      if (miss_rate) s.noise.miss_rate = *miss_rate;
      if (fp_rate) s.noise.false_positive_rate = *fp_rate;
      return RunSynth(cfg);
    }
    if (link->parsed()) return RunTubes(cfg, pct, false);
    if (predict->parsed()) return RunTubes(cfg, pct, true);
    if (eval->parsed()) return RunEval(cfg);
    if (sweep->parsed()) return RunSweep(cfg, models);
    if (check->parsed()) return RunCheckLoss(cfg, trials, epsilon, tolerance);
  } catch (const std::exception& e) {
    std::cerr << "tubepred: error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

}  // namespace
}  // namespace tubepred

int main(int argc, char** argv) { return tubepred::Main(argc, argv); }
