// include/phonoprobe/similarity.h

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

#ifndef PHONOPROBE_SIMILARITY_H_
#define PHONOPROBE_SIMILARITY_H_

#include <array>
#include <span>
#include <string>
#include <string_view>

#include "phonoprobe/archive.h"

namespace phonoprobe {

enum class Measure { kSim, kProbe, kCtc };

std::string_view measure_name(Measure m);
/// Throws ConfigError for unknown names.
Measure parse_measure(std::string_view name);

/// Preference for 'R' and 'L' at each continuum step for one
/// (pair, voice, layer, measure). `normalized` is the forced-choice
/// preference pref_r / (pref_r + pref_l); for sim and probe curves it equals
/// pref_r. `degenerate[k]` marks steps that fell back to 0.5.
struct PreferenceCurve {
  std::string pair;
  std::string voice;
  std::string layer_id;
  Measure measure = Measure::kSim;
  std::array<double, kNumSteps> pref_r{};
  std::array<double, kNumSteps> pref_l{};
  std::array<double, kNumSteps> normalized{};
  std::array<bool, kNumSteps> degenerate{};
};

inline constexpr double kDegenerateNorm = 1e-12;

/// 1 - cos(u, v), in [0, 2]. Throws DegenerateVector if either norm is
/// <= 1e-12 or the sizes differ (DimensionMismatch).
double cosine_distance(std::span<const double> u, std::span<const double> v);

struct RelativeSimilarity {
  double value = 0.5;
  bool degenerate = false;
};

/// sim(x, R) = 1 - D(x,R) / (D(x,R) + D(x,L)). When both distances are
/// below 1e-12 the value is 0.5 with `degenerate` set.
RelativeSimilarity relative_similarity(std::span<const double> x,
                                       std::span<const double> ref_r,
                                       std::span<const double> ref_l);

/// Embedding-similarity curve at `layer_id`, with the step-0 and step-10
/// pooled vectors of the same continuum as 'L' and 'R' references.
PreferenceCurve similarity_curve(const Continuum &continuum, std::string_view layer_id);
PreferenceCurve similarity_curve(std::span<const StimulusArchive> archives,
                                 std::string_view layer_id);

}  // namespace phonoprobe

#endif  // PHONOPROBE_SIMILARITY_H_
