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


// Serial reference vs OpenMP kernels. Run with OMP_NUM_THREADS to compare.

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "tubepred/anchors.h"
#include "tubepred/dataset.h"
#include "tubepred/evaluation.h"
#include "tubepred/kernels.h"
#include "tubepred/synth.h"

namespace tubepred {
namespace {

BoundingBox RandomBox(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> pos(0.0, 280.0), size(8.0, 120.0);
  const double x = pos(rng), y = pos(rng);
  return {x, y, x + size(rng), y + size(rng)};
}

std::vector<MicroTubeBoxes> RandomMicroTubes(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<MicroTubeBoxes> out(n);
  for (auto& m : out) m = {RandomBox(rng), RandomBox(rng)};
  return out;
}

std::vector<FrameBoxes> RandomTubes(std::size_t n, int frames, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> start(1, frames / 2);
  std::vector<FrameBoxes> out(n);
  for (auto& tube : out) {
    const int first = start(rng);
    for (int f = first; f <= first + frames / 2; ++f) tube[f] = RandomBox(rng);
  }
  return out;
}

template <Execution kExec>
void BM_MeanIouMatrix(benchmark::State& state) {
  const auto priors = GeneratePriors(PriorBoxSpec::Default()).boxes;
  const auto gts = RandomMicroTubes(static_cast<std::size_t>(state.range(0)), 1);
  for (auto _ : state) {
    auto m = kExec == Execution::kSerial ? kernels::serial::MeanIouMatrix(priors, gts)
                                         : kernels::MeanIouMatrix(priors, gts);
    benchmark::DoNotOptimize(m);
  }
}

template <Execution kExec>
void BM_MicroTubeIouMatrix(benchmark::State& state) {
  const auto tubes = RandomMicroTubes(static_cast<std::size_t>(state.range(0)), 2);
  for (auto _ : state) {
    auto m = kExec == Execution::kSerial ? kernels::serial::MicroTubeIouMatrix(tubes)
                                         : kernels::MicroTubeIouMatrix(tubes);
    benchmark::DoNotOptimize(m);
  }
}

template <Execution kExec>
void BM_TubeIouMatrix(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto dets = RandomTubes(n, 40, 3);
  const auto gts = RandomTubes(n / 4 + 1, 40, 4);
  std::vector<const FrameBoxes*> d, g;
  for (const auto& t : dets) d.push_back(&t);
  for (const auto& t : gts) g.push_back(&t);
  for (auto _ : state) {
    auto m = kExec == Execution::kSerial ? kernels::serial::TubeIouMatrix(d, g)
                                         : kernels::TubeIouMatrix(d, g);
    benchmark::DoNotOptimize(m);
  }
}

template <Execution kExec>
void BM_EvaluateSweep(benchmark::State& state) {
  RandomScenarioParams params;
  params.num_videos = static_cast<int>(state.range(0));
  params.noise.center_sigma = 2.0;
  const SynthOutput data = Generate(MakeRandomScenario(params));
  const DetectionsByVideo by_video = GroupByVideo(data.detections);
  EvalOptions options;
  options.execution = kExec;
  for (auto _ : state) {
    auto report = EvaluateSweep(data.manifest, by_video, options);
    benchmark::DoNotOptimize(report);
  }
}

BENCHMARK(BM_MeanIouMatrix<Execution::kSerial>)->Arg(4)->Arg(16);
BENCHMARK(BM_MeanIouMatrix<Execution::kParallel>)->Arg(4)->Arg(16);
BENCHMARK(BM_MicroTubeIouMatrix<Execution::kSerial>)->Arg(64)->Arg(512);
BENCHMARK(BM_MicroTubeIouMatrix<Execution::kParallel>)->Arg(64)->Arg(512);
BENCHMARK(BM_TubeIouMatrix<Execution::kSerial>)->Arg(64)->Arg(256);
BENCHMARK(BM_TubeIouMatrix<Execution::kParallel>)->Arg(64)->Arg(256);
BENCHMARK(BM_EvaluateSweep<Execution::kSerial>)->Arg(20)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_EvaluateSweep<Execution::kParallel>)->Arg(20)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace tubepred

BENCHMARK_MAIN();
