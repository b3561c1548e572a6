// Copyright 2026 The Sentinel Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "sentinel/detection/detection.hpp"
#include "sentinel/detection/geometry.hpp"

namespace sentinel::detection {
namespace {

std::vector<Detection> RandomDetections(std::size_t n, std::uint64_t seed, double extent = 416) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> pos(0, extent * 0.9), size(4, extent * 0.2), conf(0, 1);
  std::vector<Detection> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = pos(rng), y = pos(rng);
    out.push_back({{x, y, x + size(rng), y + size(rng)},
                   i % 2 ? ClassLabel::kSmoke : ClassLabel::kWildfire, conf(rng)});
  }
  return out;
}

void BM_Iou(benchmark::State& state) {
  const auto d = RandomDetections(1024, 1);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(Iou(d[i & 1023].bbox, d[(i + 1) & 1023].bbox));
    ++i;
  }
}
BENCHMARK(BM_Iou);

void BM_Nms(benchmark::State& state) {
  const auto d = RandomDetections(static_cast<std::size_t>(state.range(0)), 2);
  for (auto _ : state) benchmark::DoNotOptimize(Nms(d, 0.45));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Nms)->RangeMultiplier(4)->Range(16, 4096)->Complexity();

void BM_Coverage(benchmark::State& state) {
  const auto d = RandomDetections(static_cast<std::size_t>(state.range(0)), 3);
  for (auto _ : state) benchmark::DoNotOptimize(ComputeCoverage(d, 416, 416));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Coverage)->RangeMultiplier(4)->Range(4, 1024)->Complexity();

}  // namespace
}  // namespace sentinel::detection
