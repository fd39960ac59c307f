// include/phonoprobe/kernels.h

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

// Dense inner loops used by the analysis modules. Each kernel exists twice:
// a plain serial reference (kernels_serial.cc) and an OpenMP version
// (kernels_omp.cc). The OpenMP versions partition work over independent
// outputs and keep the per-output accumulation order of the reference, so
// both produce bitwise identical results for any thread count.

#ifndef PHONOPROBE_KERNELS_H_
#define PHONOPROBE_KERNELS_H_

#include <cstddef>
#include <span>

namespace phonoprobe::kernels {

enum class Exec { kSerial, kParallel };

/// Policy used by the library entry points. kParallel when built with
/// OpenMP, kSerial otherwise.
Exec default_exec();

/// True if the parallel kernels were compiled with OpenMP.
bool openmp_enabled();

// out[j] = mean over rows first..last (inclusive) of matrix[row, j];
// matrix is row-major with `dim` columns; out has `dim` entries.
void column_mean(std::span<const float> matrix, std::size_t dim,
                 std::size_t first, std::size_t last, std::span<double> out,
                 Exec exec);

// For each row h of `frames` (row-major, `dim` columns):
//   out_row = softmax(weights * h + bias)
// with weights vocab x dim row-major. out is rows x vocab.
void affine_softmax(std::span<const float> frames, std::size_t dim,
                    std::span<const float> weights, std::span<const float> bias,
                    std::span<double> out, Exec exec);

// margins[i] = x[i, :] . w + b, x row-major n x dim.
void affine_margins(std::span<const double> x, std::size_t dim,
                    std::span<const double> w, double b,
                    std::span<double> margins, Exec exec);

// out[j] = sum_i coeff[i] * x[i, j], summed in ascending i.
void weighted_column_sum(std::span<const double> x, std::size_t dim,
                         std::span<const double> coeff, std::span<double> out,
                         Exec exec);

namespace serial {
void column_mean(std::span<const float> matrix, std::size_t dim,
                 std::size_t first, std::size_t last, std::span<double> out);
void affine_softmax(std::span<const float> frames, std::size_t dim,
                    std::span<const float> weights, std::span<const float> bias,
                    std::span<double> out);
void affine_margins(std::span<const double> x, std::size_t dim,
                    std::span<const double> w, double b,
                    std::span<double> margins);
void weighted_column_sum(std::span<const double> x, std::size_t dim,
                         std::span<const double> coeff, std::span<double> out);
// Single-row softmax(weights * h + bias); shared by both implementations.
void affine_softmax_row(const float *h, std::size_t dim, const float *weights,
                        const float *bias, std::size_t vocab, double *out);
}  // namespace serial

namespace omp {
void column_mean(std::span<const float> matrix, std::size_t dim,
                 std::size_t first, std::size_t last, std::span<double> out);
void affine_softmax(std::span<const float> frames, std::size_t dim,
                    std::span<const float> weights, std::span<const float> bias,
                    std::span<double> out);
void affine_margins(std::span<const double> x, std::size_t dim,
                    std::span<const double> w, double b,
                    std::span<double> margins);
void weighted_column_sum(std::span<const double> x, std::size_t dim,
                         std::span<const double> coeff, std::span<double> out);
}  // namespace omp

}  // namespace phonoprobe::kernels

#endif  // PHONOPROBE_KERNELS_H_
