// src/metrics.cc

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

#include "phonoprobe/metrics.h"

#include <algorithm>

#include "phonoprobe/archive.h"
#include "phonoprobe/error.h"

namespace phonoprobe {

Choice forced_choice(double pref_r, double pref_l) {
  return pref_r > pref_l ? Choice::kR : Choice::kL;
}

CrossingReport crossing_point(const PreferenceCurve &curve) {
  CrossingReport report;
  std::array<Choice, kNumSteps> choices{};
  for (int k = 0; k < kNumSteps; ++k) {
    choices[static_cast<std::size_t>(k)] =
        forced_choice(curve.pref_r[static_cast<std::size_t>(k)],
                      curve.pref_l[static_cast<std::size_t>(k)]);
    if (!report.step && choices[static_cast<std::size_t>(k)] == Choice::kR) report.step = k;
  }
  if (report.step) {
    for (int k = *report.step + 1; k < kNumSteps; ++k)
      report.reversals += choices[static_cast<std::size_t>(k)] !=
                          choices[static_cast<std::size_t>(k - 1)];
  }
  return report;
}

PreferenceCurve voice_average(std::span<const PreferenceCurve> curves) {
  if (curves.empty()) throw Error(ErrorKind::kMixedKeys, "no curves to average");
  const PreferenceCurve &first = curves.front();
  PreferenceCurve avg;
  avg.pair = first.pair;
  avg.voice = "avg";
  avg.layer_id = first.layer_id;
  avg.measure = first.measure;
  for (const auto &c : curves) {
    if (c.pair != first.pair || c.layer_id != first.layer_id || c.measure != first.measure)
      throw Error(ErrorKind::kMixedKeys, "cannot average " + c.pair + "/" + c.layer_id +
                                             " with " + first.pair + "/" + first.layer_id);
    for (std::size_t k = 0; k < kNumSteps; ++k) {
      avg.pref_r[k] += c.pref_r[k];
      avg.pref_l[k] += c.pref_l[k];
      avg.normalized[k] += c.normalized[k];
      avg.degenerate[k] = avg.degenerate[k] || c.degenerate[k];
    }
  }
  const double n = static_cast<double>(curves.size());
  for (std::size_t k = 0; k < kNumSteps; ++k) {
    avg.pref_r[k] /= n;
    avg.pref_l[k] /= n;
    avg.normalized[k] /= n;
  }
  return avg;
}

SensitivityCurve sensitivity_curve(const PreferenceCurve &a, const PreferenceCurve &b) {
  if (a.layer_id != b.layer_id || a.measure != b.measure || a.voice != b.voice)
    throw Error(ErrorKind::kMixedKeys, "sensitivity needs matching layer/measure/voice");
  SensitivityCurve sens;
  sens.layer_id = a.layer_id;
  sens.measure = a.measure;
  sens.voice = a.voice;
  sens.context_a = a.pair;
  sens.context_b = b.pair;
  for (std::size_t k = 0; k < kNumSteps; ++k) sens.delta[k] = a.normalized[k] - b.normalized[k];
  return sens;
}

PeakSensitivity peak_sensitivity(const SensitivityCurve &sens) {
  PeakSensitivity best{sens.delta[1], 1};
  for (int k = 2; k < kLastStep; ++k) {
    if (sens.delta[static_cast<std::size_t>(k)] > best.peak)
      best = {sens.delta[static_cast<std::size_t>(k)], k};
  }
  return best;
}

std::vector<LayerSummary> summarize_layers(const std::string &model_id,
                                           std::span<const SensitivityCurve> curves) {
  std::vector<LayerSummary> rows;
  rows.reserve(curves.size());
  for (const auto &c : curves) {
    const PeakSensitivity p = peak_sensitivity(c);
    rows.push_back({model_id, c.measure, c.layer_id, p.peak, p.step});
  }
  std::sort(rows.begin(), rows.end(), [](const LayerSummary &x, const LayerSummary &y) {
    if (x.measure != y.measure) return measure_name(x.measure) < measure_name(y.measure);
    return layer_rank(x.layer_id) < layer_rank(y.layer_id);
  });
  return rows;
}

}  // namespace phonoprobe
