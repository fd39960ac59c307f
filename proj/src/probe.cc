// src/probe.cc

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

#include "phonoprobe/probe.h"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "json.hpp"
#include "phonoprobe/alignment.h"
#include "phonoprobe/error.h"
#include "phonoprobe/kernels.h"

namespace phonoprobe {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

constexpr double kArmijoC = 1e-4;
constexpr double kBacktrack = 0.5;
constexpr double kMaxStep = 1e6;
constexpr double kMinStep = 1e-30;
constexpr double kScaleFloor = 1e-8;

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double softplus(double z) { return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z))); }

double inf_norm(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

void check_dim(const ProbeModel &model, std::size_t dim) {
  if (dim != model.dim())
    throw Error(ErrorKind::kDimensionMismatch,
                "probe for layer " + model.layer_id + " expects dim " +
                    std::to_string(model.dim()) + ", got " + std::to_string(dim));
}

}  // namespace

LogisticObjective::LogisticObjective(std::span<const double> x, std::size_t dim,
                                     std::span<const double> targets, double l2_lambda)
    : x_(x),
      dim_(dim),
      targets_(targets),
      l2_lambda_(l2_lambda),
      margins_(targets.size()),
      residuals_(targets.size()) {
  if (x.size() != dim * targets.size())
    throw Error(ErrorKind::kDimensionMismatch, "design matrix size does not match targets");
}

double LogisticObjective::value(std::span<const double> params) const {
  const auto w = params.first(dim_);
  const double b = params[dim_];
  kernels::affine_margins(x_, dim_, w, b, margins_, kernels::default_exec());
  const double n = static_cast<double>(targets_.size());
  double data = 0.0;
  for (std::size_t i = 0; i < margins_.size(); ++i)
    data += softplus(margins_[i]) - targets_[i] * margins_[i];
  double ww = 0.0;
  for (double v : w) ww += v * v;
  return data / n + (l2_lambda_ / n) * ww / 2.0;
}

double LogisticObjective::value_and_gradient(std::span<const double> params,
                                             std::span<double> grad) const {
  const double loss = value(params);  // leaves margins_ filled
  const double n = static_cast<double>(targets_.size());
  double bias_grad = 0.0;
  for (std::size_t i = 0; i < margins_.size(); ++i) {
    residuals_[i] = (sigmoid(margins_[i]) - targets_[i]) / n;
    bias_grad += residuals_[i];
  }
  auto gw = grad.first(dim_);
  kernels::weighted_column_sum(x_, dim_, residuals_, gw, kernels::default_exec());
  const double reg = l2_lambda_ / n;
  for (std::size_t j = 0; j < dim_; ++j) gw[j] += reg * params[j];
  grad[dim_] = bias_grad;
  return loss;
}

ProbeModel train_probe(const LabeledVectorSet &train, const ProbeConfig &config,
                       std::string_view layer_id, std::vector<double> *loss_trace) {
  const std::size_t n = train.size();
  const std::size_t dim = train.dim;
  if (dim == 0 || train.vectors.size() != n * dim)
    throw Error(ErrorKind::kDimensionMismatch, "training vectors do not match declared dim");
  if (config.l2_lambda < 0.0 || config.max_iters < 1 || !(config.grad_tol > 0.0))
    throw Error(ErrorKind::kConfigError, "invalid probe configuration");

  std::vector<double> targets(n);
  std::size_t positives = 0;
  for (std::size_t i = 0; i < n; ++i) {
    targets[i] = train.records[i].label == PhoneLabel::kR ? 1.0 : 0.0;
    positives += train.records[i].label == PhoneLabel::kR;
  }
  if (positives == 0 || positives == n)
    throw Error(ErrorKind::kSingleClassData, "training data for layer " +
                                                 std::string(layer_id) +
                                                 " contains a single label");

  ProbeModel model;
  model.layer_id = std::string(layer_id);
  model.feature_means.assign(dim, 0.0);
  model.feature_scales.assign(dim, 1.0);
  if (config.standardize) {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < dim; ++j) model.feature_means[j] += train.vectors[i * dim + j];
    for (double &m : model.feature_means) m /= static_cast<double>(n);
    std::vector<double> var(dim, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < dim; ++j) {
        const double d = train.vectors[i * dim + j] - model.feature_means[j];
        var[j] += d * d;
      }
    for (std::size_t j = 0; j < dim; ++j)
      model.feature_scales[j] = std::max(std::sqrt(var[j] / static_cast<double>(n)), kScaleFloor);
  }

  std::vector<double> x(n * dim);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < dim; ++j)
      x[i * dim + j] = (train.vectors[i * dim + j] - model.feature_means[j]) /
                       model.feature_scales[j];

  const LogisticObjective objective(x, dim, targets, config.l2_lambda);
  std::vector<double> params(dim + 1, 0.0), grad(dim + 1), candidate(dim + 1);
  double loss = objective.value_and_gradient(params, grad);
  if (loss_trace) loss_trace->assign(1, loss);

  double step = kMaxStep;
  double prev_step = 0.5;
  int iterations = 0;
  bool converged = false;
  while (true) {
    if (inf_norm(grad) < config.grad_tol) {
      converged = true;
      break;
    }
    if (iterations >= config.max_iters) break;

    double grad_sq = 0.0;
    for (double g : grad) grad_sq += g * g;
    step = std::min(2.0 * prev_step, kMaxStep);
    bool accepted = false;
    while (step >= kMinStep) {
      for (std::size_t k = 0; k < params.size(); ++k) candidate[k] = params[k] - step * grad[k];
      if (objective.value(candidate) <= loss - kArmijoC * step * grad_sq) {
        accepted = true;
        break;
      }
      step *= kBacktrack;
    }
    // No decrease representable at this precision: stop where we are.
    if (!accepted) break;

    params.swap(candidate);
    loss = objective.value_and_gradient(params, grad);
    if (loss_trace) loss_trace->push_back(loss);
    prev_step = step;
    ++iterations;
  }

  model.weights.assign(params.begin(), params.begin() + static_cast<std::ptrdiff_t>(dim));
  model.bias = params[dim];
  model.train_meta = {n, loss, iterations, converged, inf_norm(grad)};
  return model;
}

double probe_prob(const ProbeModel &model, std::span<const double> x) {
  check_dim(model, x.size());
  double z = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j)
    z += model.weights[j] * ((x[j] - model.feature_means[j]) / model.feature_scales[j]);
  return sigmoid(z + model.bias);
}

double probe_prob_l(const ProbeModel &model, std::span<const double> x) {
  return 1.0 - probe_prob(model, x);
}

double evaluate_probe(const ProbeModel &model, const LabeledVectorSet &test) {
  check_dim(model, test.dim);
  if (test.size() == 0) return 0.0;
  std::size_t correct = 0;
  for (std::size_t i = 0; i < test.size(); ++i) {
    const bool says_r = probe_prob(model, test.vector(i)) > 0.5;
    correct += says_r == (test.records[i].label == PhoneLabel::kR);
  }
  return static_cast<double>(correct) / static_cast<double>(test.size());
}

PreferenceCurve probe_curve(const Continuum &continuum, std::string_view layer_id,
                            const ProbeModel &model) {
  if (model.layer_id != layer_id)
    throw Error(ErrorKind::kLayerMissing, "probe was trained on layer " + model.layer_id +
                                              ", not " + std::string(layer_id));
  PreferenceCurve curve;
  curve.pair = continuum.front()->meta.pair;
  curve.voice = continuum.front()->meta.voice;
  curve.layer_id = std::string(layer_id);
  curve.measure = Measure::kProbe;
  for (std::size_t k = 0; k < continuum.size(); ++k) {
    const double p = probe_prob(model, pooled_vector(*continuum[k], layer_id));
    curve.pref_r[k] = p;
    curve.pref_l[k] = 1.0 - p;
    curve.normalized[k] = p;
  }
  return curve;
}

fs::path probe_file_name(std::string_view layer_id) {
  return "probe_" + std::string(layer_id) + ".json";
}

void write_probe(const ProbeModel &model, const fs::path &file) {
  ordered_json doc;
  doc["layer_id"] = model.layer_id;
  doc["dim"] = model.dim();
  doc["weights"] = model.weights;
  doc["bias"] = model.bias;
  doc["feature_means"] = model.feature_means;
  doc["feature_scales"] = model.feature_scales;
  const ProbeTrainMeta &m = model.train_meta;
  doc["train_meta"] = {{"n_train", m.n_train},
                       {"final_loss", m.final_loss},
                       {"iterations", m.iterations},
                       {"converged", m.converged},
                       {"grad_norm", m.grad_norm}};
  if (file.has_parent_path()) fs::create_directories(file.parent_path());
  std::ofstream out(file, std::ios::binary);
  out << doc.dump(2) << '\n';
  if (!out) throw Error(ErrorKind::kIoFailure, "cannot write " + file.string());
}

ProbeModel read_probe(const fs::path &file) {
  std::ifstream in(file);
  if (!in) throw Error(ErrorKind::kMissingManifest, "cannot open probe " + file.string());
  ProbeModel model;
  try {
    const json doc = json::parse(in);
    model.layer_id = doc.at("layer_id").get<std::string>();
    model.weights = doc.at("weights").get<std::vector<double>>();
    model.bias = doc.at("bias").get<double>();
    model.feature_means = doc.at("feature_means").get<std::vector<double>>();
    model.feature_scales = doc.at("feature_scales").get<std::vector<double>>();
    const json &m = doc.at("train_meta");
    model.train_meta.n_train = m.at("n_train").get<std::size_t>();
    model.train_meta.final_loss = m.at("final_loss").get<double>();
    model.train_meta.iterations = m.at("iterations").get<int>();
    model.train_meta.converged = m.value("converged", true);
    model.train_meta.grad_norm = m.value("grad_norm", 0.0);
  } catch (const json::exception &e) {
    throw Error(ErrorKind::kMalformedManifest, file.string() + ": " + e.what());
  }
  const std::size_t dim = model.weights.size();
  if (dim == 0 || model.feature_means.size() != dim || model.feature_scales.size() != dim)
    throw Error(ErrorKind::kMalformedManifest, file.string() + ": inconsistent vector lengths");
  for (std::size_t j = 0; j < dim; ++j) {
    if (!std::isfinite(model.weights[j]) || !std::isfinite(model.feature_means[j]) ||
        !(model.feature_scales[j] > 0.0) || !std::isfinite(model.feature_scales[j]))
      throw Error(ErrorKind::kMalformedManifest,
                  file.string() + ": non-finite weight or non-positive scale");
  }
  if (!std::isfinite(model.bias))
    throw Error(ErrorKind::kMalformedManifest, file.string() + ": non-finite bias");
  return model;
}

}  // namespace phonoprobe
