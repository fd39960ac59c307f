// src/kernels_omp.cc

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

#include "phonoprobe/kernels.h"

#include <algorithm>
#include <cstdint>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace phonoprobe::kernels::omp {

namespace {

// Contiguous [begin, end) share of `total` items for the calling thread.
struct Share {
  std::size_t begin;
  std::size_t end;
};

Share thread_share(std::size_t total) {
#ifdef _OPENMP
  const std::size_t threads = static_cast<std::size_t>(omp_get_num_threads());
  const std::size_t tid = static_cast<std::size_t>(omp_get_thread_num());
#else
  const std::size_t threads = 1, tid = 0;
#endif
  const std::size_t chunk = (total + threads - 1) / threads;
  const std::size_t begin = std::min(total, tid * chunk);
  return {begin, std::min(total, begin + chunk)};
}

}  // namespace

void column_mean(std::span<const float> matrix, std::size_t dim,
                 std::size_t first, std::size_t last, std::span<double> out) {
  const double count = static_cast<double>(last - first + 1);
  const auto cols = static_cast<std::int64_t>(dim);
#pragma omp parallel for schedule(static)
  for (std::int64_t j = 0; j < cols; ++j) {
    double acc = 0.0;
    for (std::size_t i = first; i <= last; ++i)
      acc += static_cast<double>(matrix[i * dim + static_cast<std::size_t>(j)]);
    out[static_cast<std::size_t>(j)] = acc / count;
  }
}

void affine_softmax(std::span<const float> frames, std::size_t dim,
                    std::span<const float> weights, std::span<const float> bias,
                    std::span<double> out) {
  const std::size_t vocab = bias.size();
  const auto rows = static_cast<std::int64_t>(frames.size() / dim);
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < rows; ++i) {
    const auto r = static_cast<std::size_t>(i);
    serial::affine_softmax_row(frames.data() + r * dim, dim, weights.data(),
                               bias.data(), vocab, out.data() + r * vocab);
  }
}

void affine_margins(std::span<const double> x, std::size_t dim,
                    std::span<const double> w, double b,
                    std::span<double> margins) {
  const auto n = static_cast<std::int64_t>(margins.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) {
    const double *row = x.data() + static_cast<std::size_t>(i) * dim;
    double acc = 0.0;
    for (std::size_t j = 0; j < dim; ++j) acc += row[j] * w[j];
    margins[static_cast<std::size_t>(i)] = acc + b;
  }
}

void weighted_column_sum(std::span<const double> x, std::size_t dim,
                         std::span<const double> coeff, std::span<double> out) {
  const std::size_t n = coeff.size();
  // Each thread owns a block of columns and walks rows in ascending order,
  // matching the serial accumulation order per column.
#pragma omp parallel
  {
    const Share cols = thread_share(dim);
    for (std::size_t j = cols.begin; j < cols.end; ++j) out[j] = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double *row = x.data() + i * dim;
      const double c = coeff[i];
      for (std::size_t j = cols.begin; j < cols.end; ++j) out[j] += c * row[j];
    }
  }
}

}  // namespace phonoprobe::kernels::omp
