// src/kernels_serial.cc

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
#include <cmath>
#include <limits>

namespace phonoprobe::kernels {

bool openmp_enabled() {
#ifdef _OPENMP
  return true;
#else
  return false;
#endif
}

Exec default_exec() {
  return openmp_enabled() ? Exec::kParallel : Exec::kSerial;
}

void column_mean(std::span<const float> matrix, std::size_t dim,
                 std::size_t first, std::size_t last, std::span<double> out,
                 Exec exec) {
  if (exec == Exec::kParallel)
    omp::column_mean(matrix, dim, first, last, out);
  else
    serial::column_mean(matrix, dim, first, last, out);
}

void affine_softmax(std::span<const float> frames, std::size_t dim,
                    std::span<const float> weights, std::span<const float> bias,
                    std::span<double> out, Exec exec) {
  if (exec == Exec::kParallel)
    omp::affine_softmax(frames, dim, weights, bias, out);
  else
    serial::affine_softmax(frames, dim, weights, bias, out);
}

void affine_margins(std::span<const double> x, std::size_t dim,
                    std::span<const double> w, double b,
                    std::span<double> margins, Exec exec) {
  if (exec == Exec::kParallel)
    omp::affine_margins(x, dim, w, b, margins);
  else
    serial::affine_margins(x, dim, w, b, margins);
}

void weighted_column_sum(std::span<const double> x, std::size_t dim,
                         std::span<const double> coeff, std::span<double> out,
                         Exec exec) {
  if (exec == Exec::kParallel)
    omp::weighted_column_sum(x, dim, coeff, out);
  else
    serial::weighted_column_sum(x, dim, coeff, out);
}

namespace serial {

void column_mean(std::span<const float> matrix, std::size_t dim,
                 std::size_t first, std::size_t last, std::span<double> out) {
  std::fill(out.begin(), out.end(), 0.0);
  for (std::size_t i = first; i <= last; ++i) {
    const float *row = matrix.data() + i * dim;
    for (std::size_t j = 0; j < dim; ++j) out[j] += static_cast<double>(row[j]);
  }
  const double count = static_cast<double>(last - first + 1);
  for (std::size_t j = 0; j < dim; ++j) out[j] /= count;
}

void affine_softmax_row(const float *h, std::size_t dim, const float *weights,
                        const float *bias, std::size_t vocab, double *out) {
  double max_logit = -std::numeric_limits<double>::infinity();
  for (std::size_t v = 0; v < vocab; ++v) {
    const float *w = weights + v * dim;
    double acc = 0.0;
    for (std::size_t j = 0; j < dim; ++j)
      acc += static_cast<double>(w[j]) * static_cast<double>(h[j]);
    out[v] = acc + static_cast<double>(bias[v]);
    max_logit = std::max(max_logit, out[v]);
  }
  double total = 0.0;
  for (std::size_t v = 0; v < vocab; ++v) {
    out[v] = std::exp(out[v] - max_logit);
    total += out[v];
  }
  for (std::size_t v = 0; v < vocab; ++v) out[v] /= total;
}

void affine_softmax(std::span<const float> frames, std::size_t dim,
                    std::span<const float> weights, std::span<const float> bias,
                    std::span<double> out) {
  const std::size_t vocab = bias.size();
  const std::size_t rows = frames.size() / dim;
  for (std::size_t i = 0; i < rows; ++i)
    affine_softmax_row(frames.data() + i * dim, dim, weights.data(),
                       bias.data(), vocab, out.data() + i * vocab);
}

void affine_margins(std::span<const double> x, std::size_t dim,
                    std::span<const double> w, double b,
                    std::span<double> margins) {
  const std::size_t n = margins.size();
  for (std::size_t i = 0; i < n; ++i) {
    const double *row = x.data() + i * dim;
    double acc = 0.0;
    for (std::size_t j = 0; j < dim; ++j) acc += row[j] * w[j];
    margins[i] = acc + b;
  }
}

void weighted_column_sum(std::span<const double> x, std::size_t dim,
                         std::span<const double> coeff, std::span<double> out) {
  std::fill(out.begin(), out.end(), 0.0);
  const std::size_t n = coeff.size();
  for (std::size_t i = 0; i < n; ++i) {
    const double *row = x.data() + i * dim;
    const double c = coeff[i];
    for (std::size_t j = 0; j < dim; ++j) out[j] += c * row[j];
  }
}

}  // namespace serial
}  // namespace phonoprobe::kernels
