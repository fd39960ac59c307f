// src/ctc_lens.cc

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

#include "phonoprobe/ctc_lens.h"

#include <algorithm>

#include "phonoprobe/error.h"
#include "phonoprobe/kernels.h"

namespace phonoprobe {

namespace {

void check_head(const LayerActivations &layer, const CtcHead &head) {
  if (layer.dim != head.dim)
    throw Error(ErrorKind::kDimensionMismatch,
                "layer " + layer.layer_id + " has dim " + std::to_string(layer.dim) +
                    " but the CTC head expects " + std::to_string(head.dim));
}

}  // namespace

CharProbs frame_char_probs(const LayerActivations &layer, const CtcHead &head,
                           const FrameRange &range) {
  check_head(layer, head);
  if (range.first > range.last || range.last >= layer.num_frames)
    throw Error(ErrorKind::kNoOverlap, "frame range outside layer " + layer.layer_id);
  CharProbs probs;
  probs.num_frames = range.size();
  probs.vocab_size = head.vocab.size();
  probs.values.resize(probs.num_frames * probs.vocab_size);
  const auto frames = std::span<const float>(layer.values)
                          .subspan(range.first * layer.dim, probs.num_frames * layer.dim);
  kernels::affine_softmax(frames, layer.dim, head.weights, head.bias, probs.values,
                          kernels::default_exec());
  return probs;
}

CharProbs frame_char_probs(const LayerActivations &layer, const CtcHead &head) {
  return frame_char_probs(layer, head, FrameRange{0, layer.num_frames - 1});
}

double char_preference(const LayerActivations &layer, const CtcHead &head,
                       const TimeWindow &window, const FrameSpec &spec,
                       std::string_view token) {
  const std::size_t index = head.token_index(token);
  check_head(layer, head);
  const FrameRange range = overlapping_frames(window, spec, layer.num_frames);
  const CharProbs probs = frame_char_probs(layer, head, range);
  double best = 0.0;
  for (std::size_t f = 0; f < probs.num_frames; ++f) best = std::max(best, probs.at(f, index));
  return best;
}

double output_char_preference(const StimulusArchive &archive, const CtcHead &head,
                              std::string_view token) {
  return char_preference(archive.final_layer(), head, archive.meta.morph_window,
                         archive.meta.frame_spec, token);
}

RelativeSimilarity normalized_preference(double pref_r, double pref_l) {
  const double total = pref_r + pref_l;
  if (total < kDegenerateNorm) return {0.5, true};
  return {pref_r / total, false};
}

PreferenceCurve lens_curve(const Continuum &continuum, std::string_view layer_id,
                           const CtcHead &head) {
  PreferenceCurve curve;
  curve.pair = continuum.front()->meta.pair;
  curve.voice = continuum.front()->meta.voice;
  curve.layer_id = std::string(layer_id);
  curve.measure = Measure::kCtc;
  for (std::size_t k = 0; k < continuum.size(); ++k) {
    const StimulusArchive &a = *continuum[k];
    const LayerActivations &layer = a.layer(layer_id);
    const StimulusMeta &m = a.meta;
    curve.pref_r[k] = char_preference(layer, head, m.morph_window, m.frame_spec, "R");
    curve.pref_l[k] = char_preference(layer, head, m.morph_window, m.frame_spec, "L");
    const RelativeSimilarity norm = normalized_preference(curve.pref_r[k], curve.pref_l[k]);
    curve.normalized[k] = norm.value;
    curve.degenerate[k] = norm.degenerate;
  }
  return curve;
}

}  // namespace phonoprobe
