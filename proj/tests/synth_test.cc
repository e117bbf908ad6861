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

#include <gtest/gtest.h>

#include <sstream>
#include <stdexcept>

#include "tubepred/dataio.h"

namespace tubepred {
namespace {

RandomScenarioParams Params() {
  RandomScenarioParams p;
  p.num_videos = 6;
  p.num_frames = 30;
  p.horizon = {4, 5, 3};
  return p;
}

TEST(SynthTest, ZeroNoiseReproducesGroundTruth) {
  const SynthOutput out = Generate(MakeRandomScenario(Params()));
  ASSERT_EQ(out.manifest.videos.size(), 6u);
  // Three actors per frame pair, none missed, no false positives.
  EXPECT_EQ(out.detections.size(), 6u * 29u * 3u);
  for (const auto& rec : out.detections) {
    const VideoAnnotation* video = out.manifest.Find(rec.video);
    ASSERT_NE(video, nullptr);
    const auto& det = rec.detection;
    int hits = 0;
    for (const auto& tube : video->tubes) {
      if (tube.boxes.at(det.t) == det.boxes.first &&
          tube.boxes.at(det.t + 1) == det.boxes.second) {
        ++hits;
        EXPECT_EQ(det.class_scores.size(), 4u);
        EXPECT_GT(det.score(tube.class_id), 0.99);
        // Payload boxes that fall inside the video match the annotation too.
        const int past = det.t - rec.horizon.past_offset;
        if (past >= 1) EXPECT_EQ(det.predictions[0], tube.boxes.at(past));
        for (int k = 1; k <= rec.horizon.num_future; ++k) {
          const int f = det.t + k * rec.horizon.future_step;
          if (f <= video->num_frames) EXPECT_EQ(det.predictions[k], tube.boxes.at(f));
        }
      }
    }
    EXPECT_EQ(hits, 1);
  }
}

TEST(SynthTest, FullMissRateEmptiesTheStream) {
  RandomScenarioParams p = Params();
  p.noise.miss_rate = 1.0;
  EXPECT_TRUE(Generate(MakeRandomScenario(p)).detections.empty());
}

TEST(SynthTest, FixedSeedIsByteIdentical) {
  RandomScenarioParams p = Params();
  p.seed = 99;
  p.noise.center_sigma = 4.0;
  p.noise.score_temperature = 1.5;
  p.noise.false_positive_rate = 0.4;
  p.noise.miss_rate = 0.1;
  const auto dump = [&] {
    const SynthOutput out = Generate(MakeRandomScenario(p));
    std::ostringstream s;
    WriteManifest(s, out.manifest);
    WriteDetections(s, out.detections);
    return s.str();
  };
  const std::string a = dump();
  EXPECT_EQ(a, dump());
  p.seed = 100;
  EXPECT_NE(a, dump());
}

TEST(SynthTest, NoiseLevelsShareTheUnderlyingDraws) {
  RandomScenarioParams p = Params();
  p.noise.center_sigma = 1.0;
  const auto small = Generate(MakeRandomScenario(p));
  p.noise.center_sigma = 2.0;
  const auto large = Generate(MakeRandomScenario(p));
  ASSERT_EQ(small.detections.size(), large.detections.size());
  // Same draws at twice the scale: displacements double (away from clipping).
  const auto truth = Generate(MakeRandomScenario(Params()));
  int compared = 0;
  for (std::size_t i = 0; i < truth.detections.size(); ++i) {
    const auto& g = truth.detections[i].detection.boxes.first;
    const auto& s = small.detections[i].detection.boxes.first;
    const auto& l = large.detections[i].detection.boxes.first;
    if (l.x_min <= 0.0 || l.x_max >= 320.0 || s.x_min <= 0.0 || s.x_max >= 320.0) continue;
    EXPECT_NEAR(l.x_min - g.x_min, 2.0 * (s.x_min - g.x_min), 1e-9);
    ++compared;
  }
  EXPECT_GT(compared, 100);
}

TEST(SynthTest, ActorLeavingTheFrameIsRejected) {
  ScenarioSpec spec;
  spec.class_names = {"run"};
  VideoSpec video{"v", 20, {100, 100}, {}};
  video.actors.push_back({0, {10, 10, 30, 30}, {{1, 8.0, 0.0}}});
  spec.videos.push_back(video);
  try {
    spec.Validate();
    FAIL() << "expected rejection";
  } catch (const std::invalid_argument& e) {
    EXPECT_STREQ(e.what(), "video 'v' actor 0 leaves the frame at frame 13");
  }
}

TEST(SynthTest, ActorStartingOutsideIsRejected) {
  ScenarioSpec spec;
  spec.class_names = {"run"};
  VideoSpec video{"v", 20, {100, 100}, {}};
  video.actors.push_back({0, {90, 10, 130, 30}, {}});
  spec.videos.push_back(video);
  EXPECT_THROW(spec.Validate(), std::invalid_argument);
}

TEST(SynthTest, RatesOutsideUnitIntervalAreRejected) {
  for (double bad : {-0.1, 1.5}) {
    RandomScenarioParams p = Params();
    p.noise.miss_rate = bad;
    EXPECT_THROW(Generate(MakeRandomScenario(p)), std::invalid_argument);
    p = Params();
    p.noise.false_positive_rate = bad;
    EXPECT_THROW(Generate(MakeRandomScenario(p)), std::invalid_argument);
  }
  RandomScenarioParams p = Params();
  p.noise.center_sigma = -1.0;
  EXPECT_THROW(Generate(MakeRandomScenario(p)), std::invalid_argument);
}

TEST(SynthTest, PiecewiseVelocity) {
  ActorSpec actor{0, {0, 0, 10, 10}, {{1, 1.0, 0.0}, {4, 0.0, 2.0}}};
  EXPECT_EQ(actor.BoxAt(1), (BoundingBox{0, 0, 10, 10}));
  EXPECT_EQ(actor.BoxAt(4), (BoundingBox{3, 0, 13, 10}));
  EXPECT_EQ(actor.BoxAt(6), (BoundingBox{3, 4, 13, 14}));
  EXPECT_EQ(actor.BoxAt(-1), (BoundingBox{-2, 0, 8, 10}));
}

TEST(SynthTest, DeltaTwoStepsEveryOtherFrame) {
  RandomScenarioParams p = Params();
  p.delta = 2;
  const auto out = Generate(MakeRandomScenario(p));
  for (const auto& rec : out.detections) {
    EXPECT_EQ(rec.detection.t % 2, 1);
    EXPECT_EQ(rec.detection.delta, 2);
    EXPECT_LE(rec.detection.t + 2, 30);
  }
}

}  // namespace
}  // namespace tubepred
