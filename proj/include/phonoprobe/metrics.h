// include/phonoprobe/metrics.h

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

#ifndef PHONOPROBE_METRICS_H_
#define PHONOPROBE_METRICS_H_

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "phonoprobe/similarity.h"

namespace phonoprobe {

enum class Choice { kL, kR };

inline char choice_char(Choice c) { return c == Choice::kR ? 'R' : 'L'; }

/// R iff pref_r > pref_l; ties go to L.
Choice forced_choice(double pref_r, double pref_l);

struct CrossingReport {
  std::optional<int> step;  // first step choosing R
  int reversals = 0;        // choice changes after `step`
};

CrossingReport crossing_point(const PreferenceCurve &curve);

/// Elementwise mean over voices of one (pair, layer, measure); voice "avg".
/// Throws MixedKeys.
PreferenceCurve voice_average(std::span<const PreferenceCurve> curves);

inline constexpr const char *kContextR = "tlih-trih";
inline constexpr const char *kContextL = "slih-srih";

struct SensitivityCurve {
  std::string layer_id;
  Measure measure = Measure::kSim;
  std::string voice;
  std::string context_a = kContextR;
  std::string context_b = kContextL;
  std::array<double, kNumSteps> delta{};
};

/// delta[k] = normalized_a[k] - normalized_b[k]. Throws MixedKeys unless
/// both curves share layer, measure and voice.
SensitivityCurve sensitivity_curve(const PreferenceCurve &curve_a,
                                   const PreferenceCurve &curve_b);

struct PeakSensitivity {
  double peak = 0.0;
  int step = 1;
};

/// Maximum over intermediate steps 1..9 with its first argmax.
PeakSensitivity peak_sensitivity(const SensitivityCurve &sens);

struct LayerSummary {
  std::string model_id;
  Measure measure = Measure::kSim;
  std::string layer_id;
  double peak = 0.0;
  int step = 1;
};

std::vector<LayerSummary> summarize_layers(const std::string &model_id,
                                           std::span<const SensitivityCurve> curves);

}  // namespace phonoprobe

#endif  // PHONOPROBE_METRICS_H_
