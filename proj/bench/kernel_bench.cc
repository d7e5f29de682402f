// Copyright 2026 The Slimkit Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


// OpenMP kernels against the single-threaded reference loops.

#include <benchmark/benchmark.h>

#include <random>

#include "slimkit/nn/kernels.h"
#include "slimkit/nn/reference_kernels.h"

namespace {

using slimkit::nn::ConvParams;
using slimkit::nn::Tensor4;

struct ConvCase {
  Tensor4 input;
  ConvParams params;
};

ConvCase MakeCase(int channels, int extent) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  ConvCase c;
  c.input = Tensor4(1, channels, extent, extent);
  for (double& v : c.input.values()) v = dist(rng);
  c.params.out_ch = channels;
  c.params.in_ch = channels;
  c.params.kh = 3;
  c.params.kw = 3;
  c.params.weight.resize(static_cast<std::size_t>(channels) * channels * 9);
  for (double& v : c.params.weight) v = dist(rng);
  return c;
}

void BM_ConvForward(benchmark::State& state) {
  ConvCase c = MakeCase(static_cast<int>(state.range(0)), 32);
  for (auto _ : state) {
    benchmark::DoNotOptimize(slimkit::nn::Conv2dForward(c.input, c.params, {1, 1}));
  }
}

void BM_ConvForwardReference(benchmark::State& state) {
  ConvCase c = MakeCase(static_cast<int>(state.range(0)), 32);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        slimkit::nn::reference::Conv2dForward(c.input, c.params, {1, 1}));
  }
}

void BM_ConvBackward(benchmark::State& state) {
  ConvCase c = MakeCase(static_cast<int>(state.range(0)), 32);
  Tensor4 dy(c.input.shape(), 1.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        slimkit::nn::Conv2dBackward(c.input, c.params, {1, 1}, dy));
  }
}

void BM_ConvBackwardReference(benchmark::State& state) {
  ConvCase c = MakeCase(static_cast<int>(state.range(0)), 32);
  Tensor4 dy(c.input.shape(), 1.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        slimkit::nn::reference::Conv2dBackward(c.input, c.params, {1, 1}, dy));
  }
}

BENCHMARK(BM_ConvForward)->Arg(8)->Arg(32);
BENCHMARK(BM_ConvForwardReference)->Arg(8)->Arg(32);
BENCHMARK(BM_ConvBackward)->Arg(8)->Arg(32);
BENCHMARK(BM_ConvBackwardReference)->Arg(8)->Arg(32);

}  // namespace

BENCHMARK_MAIN();
