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


#include "tubepred/linking.h"

#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <set>
#include <stdexcept>
#include <vector>

#include "oracles.h"
#include "tubepred/dataset.h"
#include "tubepred/synth.h"

namespace tubepred {
namespace {

MicroTubeDetection Det(int t, const BoundingBox& a, const BoundingBox& b,
                       std::vector<double> scores) {
  MicroTubeDetection d;
  d.t = t;
  d.boxes = {a, b};
  d.class_scores = std::move(scores);
  return d;
}

TubeMember Member(int t, const BoundingBox& a, const BoundingBox& b, double score) {
  return {t, 1, {a, b}, score, {}};
}

BoundingBox Shift(const BoundingBox& b, double dx) {
  return {b.x_min + dx, b.y_min, b.x_max + dx, b.y_max};
}

TEST(NmsTest, SingleItemIsKept) {
  const std::vector<ScoredMicroTube> items = {{{{0, 0, 5, 5}, {0, 0, 5, 5}}, 0.3}};
  EXPECT_EQ(Nms(items), (std::vector<std::size_t>{0}));
}

TEST(NmsTest, DuplicateKeepsHigherScore) {
  const MicroTubeBoxes m{{0, 0, 5, 5}, {1, 1, 6, 6}};
  const std::vector<ScoredMicroTube> items = {{m, 0.8}, {m, 0.9}};
  EXPECT_EQ(Nms(items), (std::vector<std::size_t>{1}));
}

TEST(NmsTest, ThresholdSeparatesNearbyOverlaps) {
  const BoundingBox keeper{0, 0, 10, 10};
  // IoU with the keeper: 44 / 100 and 46 / 100 at both frames.
  const BoundingBox left{0, 0, 4.4, 10}, bottom{0, 5.4, 10, 10};
  ASSERT_DOUBLE_EQ(Iou(keeper, left), 0.44);
  ASSERT_DOUBLE_EQ(Iou(keeper, bottom), 0.46);
  const std::vector<ScoredMicroTube> items = {
      {{keeper, keeper}, 0.9}, {{left, left}, 0.8}, {{bottom, bottom}, 0.7}};
  EXPECT_EQ(Nms(items, 0.45), (std::vector<std::size_t>{0, 1}));
  EXPECT_EQ(Nms(items, 0.45), oracle::Nms(items, 0.45));
}

TEST(NmsTest, AgreesWithBruteForce) {
  std::mt19937_64 rng(61);
  std::uniform_int_distribution<int> size(0, 50);
  std::uniform_real_distribution<double> score(0.0, 1.0);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<ScoredMicroTube> items(size(rng));
    for (auto& item : items) {
      const BoundingBox a = oracle::RandomBox(rng, 0, 80, 40);
      item = {{a, Shift(a, score(rng) * 6)}, score(rng)};
    }
    const auto kept = Nms(items, 0.45);
    EXPECT_EQ(kept, oracle::Nms(items, 0.45));
    EXPECT_EQ(kept, Nms(items, 0.45, Execution::kSerial));
  }
}

TEST(NmsTest, IndependentOfInputOrder) {
  std::mt19937_64 rng(67);
  std::uniform_real_distribution<double> score(0.0, 1.0);
  std::vector<ScoredMicroTube> items(30);
  for (auto& item : items) {
    const BoundingBox a = oracle::RandomBox(rng, 0, 50, 40);
    item = {{a, a}, score(rng)};
  }
  std::vector<ScoredMicroTube> shuffled = items;
  std::shuffle(shuffled.begin(), shuffled.end(), rng);
  std::set<double> a, b;
  for (std::size_t k : Nms(items)) a.insert(items[k].score);
  for (std::size_t k : Nms(shuffled)) b.insert(shuffled[k].score);
  EXPECT_EQ(a, b);
}

TEST(LinkStepTest, PerfectContinuationExtendsTheTube) {
  const BoundingBox a{0, 0, 10, 10}, b{1, 0, 11, 10}, c{2, 0, 12, 10};
  const std::vector<TubeMember> first = {Member(1, a, b, 0.8)};
  auto tubes = LinkStep({}, first, 1, 0, LinkParams{});
  ASSERT_EQ(tubes.size(), 1u);
  const std::vector<TubeMember> second = {Member(2, b, c, 0.6)};
  tubes = LinkStep(tubes, second, 2, 0, LinkParams{});
  ASSERT_EQ(tubes.size(), 1u);
  EXPECT_EQ(tubes[0].detected.size(), 3u);
  EXPECT_EQ(tubes[0].detected.at(3), c);
  EXPECT_DOUBLE_EQ(tubes[0].score, 0.7);
  EXPECT_EQ(tubes[0].missed_steps, 0);
}

TEST(LinkStepTest, EmptyStepStallsEveryTube) {
  const std::vector<TubeMember> first = {Member(1, {0, 0, 5, 5}, {0, 0, 5, 5}, 0.5)};
  auto tubes = LinkStep({}, first, 1, 0, LinkParams{});
  const auto before = tubes[0].detected;
  tubes = LinkStep(tubes, {}, 2, 0, LinkParams{});
  ASSERT_EQ(tubes.size(), 1u);
  EXPECT_EQ(tubes[0].detected, before);
  EXPECT_EQ(tubes[0].missed_steps, 1);
}

TEST(LinkStepTest, NewerBoxWinsTheSharedFrame) {
  const BoundingBox a{0, 0, 10, 10}, b{1, 0, 11, 10}, b2{1.5, 0, 11.5, 10};
  const std::vector<TubeMember> first = {Member(1, a, b, 0.5)};
  const std::vector<TubeMember> second = {Member(2, b2, b2, 0.5)};
  auto tubes = LinkStep(LinkStep({}, first, 1, 0, LinkParams{}), second, 2, 0, LinkParams{});
  EXPECT_EQ(tubes[0].detected.at(2), b2);
}

TEST(LinkStepTest, GateBlocksWeakLinks) {
  const std::vector<TubeMember> first = {Member(1, {0, 0, 10, 10}, {0, 0, 10, 10}, 0.9)};
  // Tail IoU 1 / 19 < 0.1.
  const std::vector<TubeMember> second = {Member(2, {9, 0, 19, 10}, {9, 0, 19, 10}, 0.9)};
  auto tubes = LinkStep(LinkStep({}, first, 1, 0, LinkParams{}), second, 2, 0, LinkParams{});
  EXPECT_EQ(tubes.size(), 2u);
  EXPECT_EQ(tubes[0].missed_steps, 1);
}

TEST(LinkStepTest, MisalignedFramesThrow) {
  const std::vector<TubeMember> fresh = {Member(3, {0, 0, 1, 1}, {0, 0, 1, 1}, 0.5)};
  try {
    LinkStep({}, fresh, 2, 0, LinkParams{});
    FAIL() << "expected an exception";
  } catch (const std::invalid_argument& e) {
    EXPECT_STREQ(e.what(), "temporal discontinuity");
  }
  const std::vector<TubeMember> first = {Member(1, {0, 0, 1, 1}, {0, 0, 1, 1}, 0.5)};
  auto tubes = LinkStep({}, first, 1, 0, LinkParams{});
  EXPECT_THROW(LinkStep(tubes, {}, 5, 0, LinkParams{}), std::invalid_argument);
}

// Total link score of a full assignment of tubes to members at one step.
double AssignmentScore(const std::vector<ActionTube>& tubes,
                       const std::vector<TubeMember>& fresh,
                       const std::vector<int>& member_of_tube, const LinkParams& p) {
  double total = 0.0;
  for (std::size_t i = 0; i < tubes.size(); ++i) {
    const double o = Iou(tubes[i].detected.rbegin()->second, fresh[member_of_tube[i]].boxes.first);
    if (o < p.iou_gate) return -1.0;
    total += fresh[member_of_tube[i]].score + p.lambda * o;
  }
  return total;
}

TEST(LinkStepTest, TwoActorsMatchExhaustiveAssignment) {
  std::mt19937_64 rng(71);
  std::uniform_real_distribution<double> jitter(-1.0, 1.0), score(0.3, 1.0);
  const LinkParams params;
  for (int trial = 0; trial < 100; ++trial) {
    BoundingBox actor[2] = {{10, 10, 40, 60}, {150, 20, 190, 80}};
    std::vector<ActionTube> tubes;
    std::vector<std::vector<BoundingBox>> truth(2);
    for (int t = 1; t <= 3; ++t) {
      std::vector<TubeMember> fresh;
      for (int a = 0; a < 2; ++a) {
        const BoundingBox start = actor[a];
        actor[a] = Shift(actor[a], 2.0 + jitter(rng));
        fresh.push_back(Member(t, start, actor[a], score(rng)));
      }
      if (rng() % 2) std::swap(fresh[0], fresh[1]);
      if (tubes.size() == 2) {
        // Best of the two possible pairings.
        const double keep = AssignmentScore(tubes, fresh, {0, 1}, params);
        const double swap = AssignmentScore(tubes, fresh, {1, 0}, params);
        const std::vector<int> best = keep >= swap ? std::vector<int>{0, 1}
                                                   : std::vector<int>{1, 0};
        const auto next = LinkStep(tubes, fresh, t, 0, params);
        ASSERT_EQ(next.size(), 2u);
        for (std::size_t i = 0; i < 2; ++i) {
          EXPECT_EQ(next[i].detected.rbegin()->second, fresh[best[i]].boxes.second);
        }
        tubes = next;
      } else {
        tubes = LinkStep(tubes, fresh, t, 0, params);
      }
    }
    ASSERT_EQ(tubes.size(), 2u);
    for (const auto& tube : tubes) EXPECT_EQ(tube.detected.size(), 4u);
    // The actors are far apart, so each tube stays on one side of the frame.
    for (const auto& tube : tubes) {
      const bool left = tube.detected.begin()->second.x_min < 100;
      for (const auto& [f, box] : tube.detected) EXPECT_EQ(box.x_min < 100, left);
    }
  }
}

SynthOutput OneActorScenario(int frames, int delta = 1) {
  ScenarioSpec spec;
  spec.class_names = {"walk", "run"};
  spec.delta = delta;
  VideoSpec video;
  video.id = "clip";
  video.num_frames = frames;
  video.actors.push_back({1, {20, 30, 60, 110}, {{1, 3.0, 1.0}}});
  spec.videos.push_back(video);
  return Generate(spec);
}

TEST(BuildTubesTest, PerfectDetectionsRecoverTheGroundTruth) {
  const SynthOutput data = OneActorScenario(8);
  const auto grouped = GroupByVideo(data.detections);
  const auto stream = MakeStream(grouped.at("clip"), 1, 7);
  const auto tubes = BuildTubes(stream, 2, LinkParams{});
  ASSERT_EQ(tubes.size(), 1u);
  EXPECT_EQ(tubes[0].class_id, 1);
  EXPECT_EQ(tubes[0].detected, data.manifest.videos[0].tubes[0].boxes);
  EXPECT_EQ(tubes[0].first_frame(), 1);
  EXPECT_EQ(tubes[0].last_frame(), 8);
}

TEST(BuildTubesTest, DeltaTwoInterpolatesInteriorFrames) {
  const SynthOutput data = OneActorScenario(9, 2);
  const auto stream = MakeStream(GroupByVideo(data.detections).at("clip"), 2, 7);
  LinkParams params;
  params.delta = 2;
  const auto tubes = BuildTubes(stream, 2, params);
  ASSERT_EQ(tubes.size(), 1u);
  const auto& gt = data.manifest.videos[0].tubes[0].boxes;
  ASSERT_EQ(tubes[0].detected.size(), gt.size());
  for (const auto& [f, box] : gt) {
    EXPECT_NEAR(tubes[0].detected.at(f).x_min, box.x_min, 1e-9);
  }
}

TEST(BuildTubesTest, BackgroundOnlyStreamGivesNoTubes) {
  std::vector<DetectionStep> stream;
  for (int t = 1; t <= 5; ++t) {
    stream.push_back({t, {Det(t, {0, 0, 10, 10}, {0, 0, 10, 10}, {1.0, 0.0, 0.0})}});
  }
  EXPECT_TRUE(BuildTubes(stream, 2, LinkParams{}).empty());
}

TEST(BuildTubesTest, DetectedBoxesComeFromInputs) {
  RandomScenarioParams params;
  params.num_videos = 5;
  params.noise.center_sigma = 3.0;
  params.noise.false_positive_rate = 0.3;
  params.noise.score_temperature = 1.0;
  const SynthOutput data = Generate(MakeRandomScenario(params));
  const auto grouped = GroupByVideo(data.detections);
  for (const auto& video : data.manifest.videos) {
    std::set<std::tuple<int, double, double, double, double>> inputs;
    for (const auto& d : grouped.at(video.id)) {
      for (const auto& [f, b] : {std::pair{d.t, d.boxes.first},
                                 std::pair{d.t + d.delta, d.boxes.second}}) {
        inputs.insert({f, b.x_min, b.y_min, b.x_max, b.y_max});
      }
    }
    const auto stream = MakeStream(grouped.at(video.id), 1, video.num_frames - 1);
    for (const auto& tube : BuildTubes(stream, 3, LinkParams{})) {
      for (const auto& [f, b] : tube.detected) {
        EXPECT_TRUE(inputs.count({f, b.x_min, b.y_min, b.x_max, b.y_max}));
      }
    }
  }
}

TEST(BuildTubesTest, SeparatedActorsGiveOneTubeEach) {
  RandomScenarioParams params;
  params.num_videos = 10;
  const SynthOutput data = Generate(MakeRandomScenario(params));
  const auto grouped = GroupByVideo(data.detections);
  for (const auto& video : data.manifest.videos) {
    const auto stream = MakeStream(grouped.at(video.id), 1, video.num_frames - 1);
    const auto tubes = BuildTubes(stream, 3, LinkParams{});
    ASSERT_EQ(tubes.size(), video.tubes.size());
    for (const auto& gt : video.tubes) {
      const bool found = std::any_of(tubes.begin(), tubes.end(), [&](const ActionTube& t) {
        return t.class_id == gt.class_id && t.detected == gt.boxes;
      });
      EXPECT_TRUE(found) << video.id;
    }
  }
}

TEST(BuildTubesTest, DeterministicAndExecutionIndependent) {
  RandomScenarioParams params;
  params.num_videos = 3;
  params.noise.center_sigma = 5.0;
  params.noise.false_positive_rate = 0.5;
  params.noise.score_temperature = 2.0;
  const SynthOutput data = Generate(MakeRandomScenario(params));
  const auto grouped = GroupByVideo(data.detections);
  for (const auto& [id, dets] : grouped) {
    const auto stream = MakeStream(dets, 1, 39);
    const auto a = BuildTubes(stream, 3, LinkParams{});
    const auto b = BuildTubes(stream, 3, LinkParams{}, Execution::kSerial);
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      EXPECT_EQ(a[i].detected, b[i].detected);
      EXPECT_EQ(a[i].score, b[i].score);
      EXPECT_EQ(a[i].class_id, b[i].class_id);
    }
    for (std::size_t i = 1; i < a.size(); ++i) EXPECT_GE(a[i - 1].score, a[i].score);
  }
}

TEST(BuildTubesTest, RejectsMalformedStreams) {
  const auto det = [](int t) {
    return Det(t, {0, 0, 10, 10}, {0, 0, 10, 10}, {0.1, 0.9});
  };
  const std::vector<DetectionStep> unsorted = {{2, {det(2)}}, {1, {det(1)}}};
  try {
    BuildTubes(unsorted, 1, LinkParams{});
    FAIL() << "expected an exception";
  } catch (const std::invalid_argument& e) {
    EXPECT_STREQ(e.what(), "unsorted stream");
  }
  const std::vector<DetectionStep> gap = {{1, {det(1)}}, {3, {det(3)}}};
  EXPECT_THROW(BuildTubes(gap, 1, LinkParams{}), std::invalid_argument);
}

TEST(LinkParamsTest, Defaults) {
  const LinkParams p;
  EXPECT_EQ(p.nms_threshold, 0.45);
  EXPECT_EQ(p.delta, 1);
  EXPECT_EQ(p.lambda, 1.0);
  EXPECT_EQ(p.iou_gate, 0.1);
  EXPECT_EQ(p.patience, 1);
}

}  // namespace
}  // namespace tubepred
