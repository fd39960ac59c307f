// include/phonoprobe/probe.h

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

// Binary logistic-regression probes decoding l vs r from pooled layer
// representations. Label r is encoded as 1, so probe probabilities are
// preferences for 'R' on the same scale as the other measures.

#ifndef PHONOPROBE_PROBE_H_
#define PHONOPROBE_PROBE_H_

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "phonoprobe/archive.h"
#include "phonoprobe/similarity.h"

namespace phonoprobe {

struct ProbeConfig {
  double l2_lambda = 1.0;
  int max_iters = 10000;
  double grad_tol = 1e-8;
  bool standardize = true;
};

struct ProbeTrainMeta {
  std::size_t n_train = 0;
  double final_loss = 0.0;
  int iterations = 0;
  bool converged = false;
  double grad_norm = 0.0;  // infinity norm at exit
};

struct ProbeModel {
  std::string layer_id;
  std::vector<double> weights;
  double bias = 0.0;
  std::vector<double> feature_means;
  std::vector<double> feature_scales;
  ProbeTrainMeta train_meta;

  std::size_t dim() const { return weights.size(); }
};

/// Regularized mean cross-entropy over a standardized design matrix:
///   J(w, b) = (1/n) sum_i [softplus(z_i) - y_i z_i] + (lambda/n) ||w||^2 / 2
/// with z_i = w . x_i + b. Parameters are packed as [w..., b].
class LogisticObjective {
 public:
  LogisticObjective(std::span<const double> x, std::size_t dim,
                    std::span<const double> targets, double l2_lambda);

  std::size_t num_params() const { return dim_ + 1; }
  double value(std::span<const double> params) const;
  /// Returns the loss and writes the gradient into `grad`.
  double value_and_gradient(std::span<const double> params,
                            std::span<double> grad) const;

 private:
  std::span<const double> x_;
  std::size_t dim_;
  std::span<const double> targets_;
  double l2_lambda_;
  mutable std::vector<double> margins_;
  mutable std::vector<double> residuals_;
};

/// Full-batch gradient descent with Armijo backtracking (beta 0.5,
/// c 1e-4) from zero initialization. Stops when the gradient infinity norm
/// drops below grad_tol; otherwise returns after max_iters with
/// train_meta.converged == false. Throws SingleClassData.
/// `loss_trace`, when given, receives the loss after every accepted step
/// (first entry: loss at initialization).
ProbeModel train_probe(const LabeledVectorSet &train, const ProbeConfig &config,
                       std::string_view layer_id,
                       std::vector<double> *loss_trace = nullptr);

/// Probability of label r. Throws DimensionMismatch.
double probe_prob(const ProbeModel &model, std::span<const double> x);
/// 1 - probe_prob.
double probe_prob_l(const ProbeModel &model, std::span<const double> x);

/// Fraction of records whose thresholded prediction (prob > 0.5 -> r)
/// matches the label.
double evaluate_probe(const ProbeModel &model, const LabeledVectorSet &test);

PreferenceCurve probe_curve(const Continuum &continuum, std::string_view layer_id,
                            const ProbeModel &model);

std::filesystem::path probe_file_name(std::string_view layer_id);
void write_probe(const ProbeModel &model, const std::filesystem::path &file);
ProbeModel read_probe(const std::filesystem::path &file);

}  // namespace phonoprobe

#endif  // PHONOPROBE_PROBE_H_
