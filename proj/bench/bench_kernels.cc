// bench/bench_kernels.cc

// Copyright 2026 The phonoprobe Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

// Serial reference vs OpenMP kernels at the sizes the analyses use:
// 768-wide hidden states, ~32-token CTC vocabularies, 4000-record probe sets.

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "phonoprobe/kernels.h"

namespace {

using phonoprobe::kernels::Exec;

template <typename T>
std::vector<T> random_values(std::size_t n, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> dist;
  std::vector<T> v(n);
  for (auto &x : v) x = static_cast<T>(dist(rng));
  return v;
}

void BM_AffineSoftmax(benchmark::State &state, Exec exec) {
  const std::size_t frames = static_cast<std::size_t>(state.range(0)), dim = 768, vocab = 32;
  const auto h = random_values<float>(frames * dim, 1);
  const auto w = random_values<float>(vocab * dim, 2);
  const auto b = random_values<float>(vocab, 3);
  std::vector<double> out(frames * vocab);
  for (auto _ : state) {
    phonoprobe::kernels::affine_softmax(h, dim, w, b, out, exec);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(frames));
}

void BM_AffineMargins(benchmark::State &state, Exec exec) {
  const std::size_t n = static_cast<std::size_t>(state.range(0)), dim = 768;
  const auto x = random_values<double>(n * dim, 4);
  const auto w = random_values<double>(dim, 5);
  std::vector<double> z(n);
  for (auto _ : state) {
    phonoprobe::kernels::affine_margins(x, dim, w, 0.1, z, exec);
    benchmark::DoNotOptimize(z.data());
  }
}

void BM_WeightedColumnSum(benchmark::State &state, Exec exec) {
  const std::size_t n = static_cast<std::size_t>(state.range(0)), dim = 768;
  const auto x = random_values<double>(n * dim, 6);
  const auto c = random_values<double>(n, 7);
  std::vector<double> out(dim);
  for (auto _ : state) {
    phonoprobe::kernels::weighted_column_sum(x, dim, c, out, exec);
    benchmark::DoNotOptimize(out.data());
  }
}

void BM_ColumnMean(benchmark::State &state, Exec exec) {
  const std::size_t frames = static_cast<std::size_t>(state.range(0)), dim = 768;
  const auto m = random_values<float>(frames * dim, 8);
  std::vector<double> out(dim);
  for (auto _ : state) {
    phonoprobe::kernels::column_mean(m, dim, 0, frames - 1, out, exec);
    benchmark::DoNotOptimize(out.data());
  }
}

}  // namespace

BENCHMARK_CAPTURE(BM_AffineSoftmax, serial, Exec::kSerial)->Arg(50)->Arg(500);
BENCHMARK_CAPTURE(BM_AffineSoftmax, omp, Exec::kParallel)->Arg(50)->Arg(500);
BENCHMARK_CAPTURE(BM_AffineMargins, serial, Exec::kSerial)->Arg(4000);
BENCHMARK_CAPTURE(BM_AffineMargins, omp, Exec::kParallel)->Arg(4000);
BENCHMARK_CAPTURE(BM_WeightedColumnSum, serial, Exec::kSerial)->Arg(4000);
BENCHMARK_CAPTURE(BM_WeightedColumnSum, omp, Exec::kParallel)->Arg(4000);
BENCHMARK_CAPTURE(BM_ColumnMean, serial, Exec::kSerial)->Arg(10)->Arg(200);
BENCHMARK_CAPTURE(BM_ColumnMean, omp, Exec::kParallel)->Arg(10)->Arg(200);

BENCHMARK_MAIN();
