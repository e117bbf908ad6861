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


#include "tubepred/kernels.h"

#include <gtest/gtest.h>
#include <omp.h>

#include <random>
#include <stdexcept>
#include <vector>

#include "oracles.h"
#include "tubepred/anchors.h"
#include "tubepred/metrics.h"

namespace tubepred {
namespace {

std::vector<MicroTubeBoxes> RandomMicroTubes(std::mt19937_64& rng, std::size_t n) {
  std::vector<MicroTubeBoxes> out(n);
  for (auto& m : out) m = {oracle::RandomBox(rng, 0, 300, 120), oracle::RandomBox(rng, 0, 300, 120)};
  return out;
}

std::vector<FrameBoxes> RandomTubes(std::mt19937_64& rng, std::size_t n) {
  std::uniform_int_distribution<int> start(1, 20), length(0, 20);
  std::vector<FrameBoxes> out(n);
  for (auto& tube : out) {
    const int first = start(rng), len = length(rng);
    for (int f = first; f <= first + len; ++f) tube[f] = oracle::RandomBox(rng, 0, 60, 50);
  }
  return out;
}

class KernelsTest : public ::testing::TestWithParam<int> {
 protected:
  void SetUp() override { omp_set_num_threads(GetParam()); }
};

TEST_P(KernelsTest, MeanIouMatrixMatchesSerialBitwise) {
  std::mt19937_64 rng(1);
  const auto priors = GeneratePriors(PriorBoxSpec::Default()).boxes;
  const auto gts = RandomMicroTubes(rng, 7);
  const auto parallel = kernels::MeanIouMatrix(priors, gts);
  EXPECT_EQ(parallel, kernels::serial::MeanIouMatrix(priors, gts));
  ASSERT_EQ(parallel.rows(), priors.size());
  ASSERT_EQ(parallel.cols(), gts.size());
  EXPECT_EQ(parallel(17, 3), MeanIou(priors[17], gts[3]));
}

TEST_P(KernelsTest, MicroTubeIouMatrixMatchesSerialBitwise) {
  std::mt19937_64 rng(2);
  const auto tubes = RandomMicroTubes(rng, 150);
  const auto parallel = kernels::MicroTubeIouMatrix(tubes);
  EXPECT_EQ(parallel, kernels::serial::MicroTubeIouMatrix(tubes));
  for (std::size_t i = 0; i < tubes.size(); ++i) {
    EXPECT_EQ(parallel(i, i), 1.0);
    for (std::size_t j = 0; j < i; ++j) EXPECT_EQ(parallel(i, j), parallel(j, i));
  }
}

TEST_P(KernelsTest, TubeIouMatrixMatchesSerialAndOracle) {
  std::mt19937_64 rng(3);
  const auto dets = RandomTubes(rng, 60), gts = RandomTubes(rng, 9);
  std::vector<const FrameBoxes*> d, g;
  for (const auto& t : dets) d.push_back(&t);
  for (const auto& t : gts) g.push_back(&t);
  const auto parallel = kernels::TubeIouMatrix(d, g);
  EXPECT_EQ(parallel, kernels::serial::TubeIouMatrix(d, g));
  for (std::size_t i = 0; i < dets.size(); ++i) {
    for (std::size_t j = 0; j < gts.size(); ++j) {
      EXPECT_NEAR(parallel(i, j), oracle::TubeIou(dets[i], gts[j]), 1e-15);
    }
  }
}

TEST_P(KernelsTest, EmptyInputsGiveEmptyMatrices) {
  const std::vector<BoundingBox> no_priors;
  const std::vector<MicroTubeBoxes> no_gts;
  EXPECT_EQ(kernels::MeanIouMatrix(no_priors, no_gts).rows(), 0u);
  EXPECT_EQ(kernels::MicroTubeIouMatrix(no_gts).rows(), 0u);
}

TEST_P(KernelsTest, ForEachIndexRethrowsFirstFailure) {
  std::vector<int> hits(100, 0);
  EXPECT_THROW(kernels::ForEachIndex(hits.size(), Execution::kParallel,
                                     [&](std::size_t i) {
                                       hits[i] = 1;
                                       if (i == 42) throw std::runtime_error("boom");
                                     }),
               std::runtime_error);
  // The loop still runs to completion.
  int total = 0;
  for (int h : hits) total += h;
  EXPECT_EQ(total, 100);
}

INSTANTIATE_TEST_SUITE_P(Threads, KernelsTest, ::testing::Values(1, 4));

}  // namespace
}  // namespace tubepred
