/*
 * Copyright 2026 The hajj-densd Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <benchmark/benchmark.h>

#include "densd/imaging.hpp"
#include "densd/kernels.hpp"

namespace {

using densd::GrayFrame;
namespace k = densd::kernels;

GrayFrame Frame(int side) {
  densd::SynthSpec spec;
  spec.width = side;
  spec.height = side;
  spec.density = densd::Density::kVeryDense;
  return densd::Synthesize(spec, 7).frame;
}

template <typename Fn>
void Run(benchmark::State& state, Fn fn) {
  const GrayFrame frame = Frame(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(fn(frame, frame.bounds()));
  state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(0));
}

void BM_SobelSerial(benchmark::State& s) { Run(s, k::serial::SobelMagnitude); }
void BM_SobelOmp(benchmark::State& s) { Run(s, k::omp::SobelMagnitude); }
void BM_LbpHistSerial(benchmark::State& s) { Run(s, k::serial::LbpHistogram); }
void BM_LbpHistOmp(benchmark::State& s) { Run(s, k::omp::LbpHistogram); }
void BM_EdgesSerial(benchmark::State& s) {
  Run(s, [](const GrayFrame& f, const densd::Rect& r) { return k::serial::CountEdges(f, r, 128.0); });
}
void BM_EdgesOmp(benchmark::State& s) {
  Run(s, [](const GrayFrame& f, const densd::Rect& r) { return k::omp::CountEdges(f, r, 128.0); });
}

}  // namespace

BENCHMARK(BM_SobelSerial)->Arg(256)->Arg(1024);
BENCHMARK(BM_SobelOmp)->Arg(256)->Arg(1024);
BENCHMARK(BM_LbpHistSerial)->Arg(256)->Arg(1024);
BENCHMARK(BM_LbpHistOmp)->Arg(256)->Arg(1024);
BENCHMARK(BM_EdgesSerial)->Arg(256)->Arg(1024);
BENCHMARK(BM_EdgesOmp)->Arg(256)->Arg(1024);

BENCHMARK_MAIN();
