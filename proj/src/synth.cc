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


#include "tubepred/synth.h"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace tubepred {
namespace {

double VelocityX(const std::vector<VelocitySegment>& schedule, int frame) {
  double v = schedule.front().vx;
  for (const auto& seg : schedule) {
    if (seg.start_frame <= frame) v = seg.vx;
  }
  return v;
}

double VelocityY(const std::vector<VelocitySegment>& schedule, int frame) {
  double v = schedule.front().vy;
  for (const auto& seg : schedule) {
    if (seg.start_frame <= frame) v = seg.vy;
  }
  return v;
}

BoundingBox Jitter(const BoundingBox& box, double center_sigma, double size_sigma,
                   std::normal_distribution<double>& normal, std::mt19937_64& rng,
                   const FrameSize& frame) {
  const double dx = center_sigma * normal(rng);
  const double dy = center_sigma * normal(rng);
  const double dw = size_sigma * normal(rng);
  const double dh = size_sigma * normal(rng);
  // Moves the corners directly so zero noise reproduces the box bit for bit.
  const double grow_x = 0.5 * (std::max(box.width() + dw, 1.0) - box.width());
  const double grow_y = 0.5 * (std::max(box.height() + dh, 1.0) - box.height());
  return ClipBox({box.x_min + dx - grow_x, box.y_min + dy - grow_y,
                  box.x_max + dx + grow_x, box.y_max + dy + grow_y},
                 frame);
}

std::vector<double> Softmax(std::vector<double> logits) {
  const double peak = *std::max_element(logits.begin(), logits.end());
  double sum = 0.0;
  for (double& z : logits) {
    z = std::exp(z - peak);
    sum += z;
  }
  for (double& z : logits) z /= sum;
  return logits;
}

// Logits: `favoured` gets `margin`, every other entry 0, all plus noise.
std::vector<double> Scores(int num_classes, int favoured, double margin,
                           double temperature,
                           std::normal_distribution<double>& normal,
                           std::mt19937_64& rng) {
  std::vector<double> logits(num_classes + 1, 0.0);
  logits[favoured] = margin;
  for (double& z : logits) z += temperature * normal(rng);
  return Softmax(std::move(logits));
}

void GenerateVideo(const ScenarioSpec& spec, std::size_t index, SynthOutput& out) {
  const VideoSpec& video = spec.videos[index];
  const NoiseSpec& noise = spec.noise;
  const int num_classes = static_cast<int>(spec.class_names.size());
  const PredictionHorizon& horizon = spec.horizon;

  std::seed_seq seq{static_cast<std::uint32_t>(spec.seed),
                    static_cast<std::uint32_t>(spec.seed >> 32),
                    static_cast<std::uint32_t>(index)};
  std::mt19937_64 rng(seq);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);

  VideoAnnotation annotation;
  annotation.id = video.id;
  annotation.num_frames = video.num_frames;
  annotation.frame = video.frame;
  for (const auto& actor : video.actors) {
    GroundTruthTube tube;
    tube.class_id = actor.class_id;
    for (int f = 1; f <= video.num_frames; ++f) {
      tube.boxes[f] = ClipBox(actor.BoxAt(f), video.frame);
    }
    annotation.tubes.push_back(std::move(tube));
  }

  const auto payload_for = [&](const auto& box_at, int t, double sigma) {
    std::vector<BoundingBox> payload;
    payload.push_back(box_at(t - horizon.past_offset));
    for (int k = 1; k <= horizon.num_future; ++k) {
      payload.push_back(box_at(t + k * horizon.future_step));
    }
    for (auto& box : payload) box = Jitter(box, sigma, 0.0, normal, rng, video.frame);
    return payload;
  };

  for (int t = 1; t + spec.delta <= video.num_frames; t += spec.delta) {
    for (const auto& actor : video.actors) {
      const bool missed = uniform(rng) < noise.miss_rate;
      const auto truth = [&](int f) { return ClipBox(actor.BoxAt(f), video.frame); };
      MicroTubeDetection det;
      det.t = t;
      det.delta = spec.delta;
      det.boxes.first = Jitter(truth(t), noise.center_sigma, noise.size_sigma,
                               normal, rng, video.frame);
      det.boxes.second = Jitter(truth(t + spec.delta), noise.center_sigma,
                                noise.size_sigma, normal, rng, video.frame);
      det.predictions = payload_for(truth, t, noise.prediction_sigma);
      det.class_scores = Scores(num_classes, actor.class_id + 1, noise.score_margin,
                                noise.score_temperature, normal, rng);
      if (!missed) out.detections.push_back({video.id, horizon, std::move(det)});
    }

    const bool spawn = uniform(rng) < noise.false_positive_rate;
    const double w = (0.1 + 0.3 * uniform(rng)) * video.frame.width;
    const double h = (0.1 + 0.3 * uniform(rng)) * video.frame.height;
    const double cx = uniform(rng) * video.frame.width;
    const double cy = uniform(rng) * video.frame.height;
    const int cls = std::min(static_cast<int>(uniform(rng) * num_classes), num_classes - 1);
    MicroTubeDetection fp;
    fp.t = t;
    fp.delta = spec.delta;
    const BoundingBox box = ClipBox(BoxFromCenter(cx, cy, w, h), video.frame);
    fp.boxes = {box, box};
    fp.predictions.assign(horizon.payload_boxes(), box);
    // Background-dominated scores with a weak vote for a random class.
    std::vector<double> logits(num_classes + 1, 0.0);
    logits[0] = noise.score_margin;
    logits[cls + 1] = noise.score_margin - 3.0;
    for (double& z : logits) z += noise.score_temperature * normal(rng);
    fp.class_scores = Softmax(std::move(logits));
    if (spawn && box.area() > 0.0) {
      out.detections.push_back({video.id, horizon, std::move(fp)});
    }
  }
  out.manifest.videos.push_back(std::move(annotation));
}

}  // namespace

BoundingBox ActorSpec::BoxAt(int frame) const {
  if (schedule.empty()) return initial;
  double dx = 0.0;
  double dy = 0.0;
  for (int g = 1; g < frame; ++g) {
    dx += VelocityX(schedule, g);
    dy += VelocityY(schedule, g);
  }
  for (int g = frame; g < 1; ++g) {
    dx -= schedule.front().vx;
    dy -= schedule.front().vy;
  }
  return {initial.x_min + dx, initial.y_min + dy, initial.x_max + dx,
          initial.y_max + dy};
}

void ScenarioSpec::Validate() const {
  if (class_names.empty()) throw std::invalid_argument("scenario needs classes");
  horizon.Validate();
  if (delta < 1) throw std::invalid_argument("delta must be >= 1");
  const auto rate_ok = [](double r) { return r >= 0.0 && r <= 1.0; };
  if (!rate_ok(noise.miss_rate) || !rate_ok(noise.false_positive_rate)) {
    throw std::invalid_argument("noise rates must lie in [0, 1]");
  }
  if (!(noise.center_sigma >= 0.0 && noise.size_sigma >= 0.0 &&
        noise.prediction_sigma >= 0.0 && noise.score_temperature >= 0.0)) {
    throw std::invalid_argument("noise scales must be >= 0");
  }
  for (const auto& video : videos) {
    if (video.num_frames < 2) {
      throw std::invalid_argument(fmt::format("video '{}' needs >= 2 frames", video.id));
    }
    if (video.frame.width < 1 || video.frame.height < 1) {
      throw std::invalid_argument("frame size must be positive");
    }
    for (std::size_t a = 0; a < video.actors.size(); ++a) {
      const ActorSpec& actor = video.actors[a];
      if (actor.class_id < 0 || actor.class_id >= static_cast<int>(class_names.size())) {
        throw std::invalid_argument("actor class outside the class list");
      }
      const BoundingBox& b = actor.initial;
      if (!b.valid() || b.area() <= 0.0 || b.x_min < 0.0 || b.y_min < 0.0 ||
          b.x_max > video.frame.width || b.y_max > video.frame.height) {
        throw std::invalid_argument(fmt::format(
            "video '{}' actor {} does not start inside the frame", video.id, a));
      }
      for (const auto& seg : actor.schedule) {
        if (!std::isfinite(seg.vx) || !std::isfinite(seg.vy)) {
          throw std::invalid_argument("velocities must be finite");
        }
      }
      for (int f = 1; f <= video.num_frames; ++f) {
        if (ClipBox(actor.BoxAt(f), video.frame).area() <= 0.0) {
          throw std::invalid_argument(fmt::format(
              "video '{}' actor {} leaves the frame at frame {}", video.id, a, f));
        }
      }
    }
  }
}

SynthOutput Generate(const ScenarioSpec& spec) {
  spec.Validate();
  SynthOutput out;
  out.manifest.class_names = spec.class_names;
  for (std::size_t v = 0; v < spec.videos.size(); ++v) GenerateVideo(spec, v, out);
  return out;
}

ScenarioSpec MakeRandomScenario(const RandomScenarioParams& params) {
  if (params.num_videos < 0 || params.num_classes < 1 || params.actors_per_video < 0 ||
      params.num_frames < 2) {
    throw std::invalid_argument("invalid random scenario parameters");
  }
  ScenarioSpec spec;
  spec.seed = params.seed;
  spec.noise = params.noise;
  spec.horizon = params.horizon;
  spec.delta = params.delta;
  for (int c = 0; c < params.num_classes; ++c) {
    spec.class_names.push_back(fmt::format("action{}", c));
  }

  std::mt19937_64 rng(params.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double fw = params.frame.width;
  const double fh = params.frame.height;
  const int bands = std::max(params.actors_per_video, 1);
  const double band_h = fh / bands;
  const double span = params.num_frames - 1;
  for (int v = 0; v < params.num_videos; ++v) {
    VideoSpec video;
    video.id = fmt::format("v{:04d}", v + 1);
    video.num_frames = params.num_frames;
    video.frame = params.frame;
    const int cls = std::min(static_cast<int>(unit(rng) * params.num_classes),
                             params.num_classes - 1);
    for (int a = 0; a < params.actors_per_video; ++a) {
      const double h = band_h * (0.5 + 0.4 * unit(rng));
      const double w = fw * (0.1 + 0.15 * unit(rng));
      // Start and end positions both inside the frame and the band.
      const double x0 = unit(rng) * (fw - w);
      const double x1 = unit(rng) * (fw - w);
      const double y0 = a * band_h + unit(rng) * (band_h - h);
      const double y1 = a * band_h + unit(rng) * (band_h - h);
      ActorSpec actor;
      actor.class_id = cls;
      actor.initial = {x0, y0, x0 + w, y0 + h};
      actor.schedule = {{1, (x1 - x0) / span, (y1 - y0) / span}};
      video.actors.push_back(std::move(actor));
    }
    spec.videos.push_back(std::move(video));
  }
  return spec;
}

}  // namespace tubepred
