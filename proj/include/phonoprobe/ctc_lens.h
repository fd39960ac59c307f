// include/phonoprobe/ctc_lens.h

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

// Character read-out through a model's CTC head. The same path serves the
// output layer (the model's own transcription probabilities) and any
// intermediate layer fed straight into the head.

#ifndef PHONOPROBE_CTC_LENS_H_
#define PHONOPROBE_CTC_LENS_H_

#include <cstddef>
#include <string_view>
#include <vector>

#include "phonoprobe/alignment.h"
#include "phonoprobe/archive.h"
#include "phonoprobe/similarity.h"

namespace phonoprobe {

struct CharProbs {
  std::size_t num_frames = 0;
  std::size_t vocab_size = 0;
  std::vector<double> values;  // num_frames x vocab_size

  double at(std::size_t frame, std::size_t token) const {
    return values[frame * vocab_size + token];
  }
};

/// Per-frame softmax(W h + b). Throws DimensionMismatch.
CharProbs frame_char_probs(const LayerActivations &layer, const CtcHead &head);
/// Same, restricted to frames range.first..range.last.
CharProbs frame_char_probs(const LayerActivations &layer, const CtcHead &head,
                           const FrameRange &range);

/// Maximum probability of `token` over the frames overlapping `window`.
double char_preference(const LayerActivations &layer, const CtcHead &head,
                       const TimeWindow &window, const FrameSpec &spec,
                       std::string_view token);

/// Standard output read-out: char_preference on the archive's final layer
/// over its morph window.
double output_char_preference(const StimulusArchive &archive, const CtcHead &head,
                              std::string_view token);

/// p_r / (p_r + p_l); 0.5 with `degenerate` set when p_r + p_l < 1e-12.
RelativeSimilarity normalized_preference(double pref_r, double pref_l);

PreferenceCurve lens_curve(const Continuum &continuum, std::string_view layer_id,
                           const CtcHead &head);

}  // namespace phonoprobe

#endif  // PHONOPROBE_CTC_LENS_H_
