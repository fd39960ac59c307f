// src/similarity.cc

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

#include "phonoprobe/similarity.h"

#include <algorithm>
#include <cmath>
#include <vector>

#include "phonoprobe/alignment.h"
#include "phonoprobe/error.h"

namespace phonoprobe {

std::string_view measure_name(Measure m) {
  switch (m) {
    case Measure::kSim: return "sim";
    case Measure::kProbe: return "probe";
    case Measure::kCtc: return "ctc";
  }
  return "?";
}

Measure parse_measure(std::string_view name) {
  if (name == "sim") return Measure::kSim;
  if (name == "probe") return Measure::kProbe;
  if (name == "ctc") return Measure::kCtc;
  throw Error(ErrorKind::kConfigError, "unknown measure '" + std::string(name) + "'");
}

double cosine_distance(std::span<const double> u, std::span<const double> v) {
  if (u.size() != v.size())
    throw Error(ErrorKind::kDimensionMismatch, "cosine distance between vectors of size " +
                                                   std::to_string(u.size()) + " and " +
                                                   std::to_string(v.size()));
  double uu = 0.0, vv = 0.0, uv = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    uu += u[i] * u[i];
    vv += v[i] * v[i];
    uv += u[i] * v[i];
  }
  const double nu = std::sqrt(uu), nv = std::sqrt(vv);
  if (!(nu > kDegenerateNorm) || !(nv > kDegenerateNorm))
    throw Error(ErrorKind::kDegenerateVector, "vector norm at or below 1e-12");
  // sqrt(uu * vv) is exactly uu when u == v, so identical vectors give a
  // distance of exactly zero. Fall back to the product of norms when the
  // squared product leaves the normal range.
  const double prod = uu * vv;
  const double denom = (std::isfinite(prod) && prod > 0.0 && std::isnormal(prod))
                           ? std::sqrt(prod)
                           : nu * nv;
  const double cosine = std::clamp(uv / denom, -1.0, 1.0);
  return std::clamp(1.0 - cosine, 0.0, 2.0);
}

RelativeSimilarity relative_similarity(std::span<const double> x, std::span<const double> ref_r,
                                       std::span<const double> ref_l) {
  const double d_r = cosine_distance(x, ref_r);
  const double d_l = cosine_distance(x, ref_l);
  if (d_r < kDegenerateNorm && d_l < kDegenerateNorm) return {0.5, true};
  return {1.0 - d_r / (d_r + d_l), false};
}

PreferenceCurve similarity_curve(const Continuum &continuum, std::string_view layer_id) {
  PreferenceCurve curve;
  curve.pair = continuum.front()->meta.pair;
  curve.voice = continuum.front()->meta.voice;
  curve.layer_id = std::string(layer_id);
  curve.measure = Measure::kSim;

  std::vector<std::vector<double>> pooled;
  pooled.reserve(kNumSteps);
  for (const StimulusArchive *a : continuum) pooled.push_back(pooled_vector(*a, layer_id));
  const std::vector<double> &ref_l = pooled.front();
  const std::vector<double> &ref_r = pooled.back();

  for (std::size_t k = 0; k < pooled.size(); ++k) {
    const RelativeSimilarity sim = relative_similarity(pooled[k], ref_r, ref_l);
    curve.pref_r[k] = sim.value;
    curve.pref_l[k] = 1.0 - sim.value;
    curve.normalized[k] = sim.value;
    curve.degenerate[k] = sim.degenerate;
  }
  return curve;
}

PreferenceCurve similarity_curve(std::span<const StimulusArchive> archives,
                                 std::string_view layer_id) {
  return similarity_curve(order_continuum(archives), layer_id);
}

}  // namespace phonoprobe
