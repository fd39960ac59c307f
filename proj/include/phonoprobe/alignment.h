// include/phonoprobe/alignment.h

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

#ifndef PHONOPROBE_ALIGNMENT_H_
#define PHONOPROBE_ALIGNMENT_H_

#include <cstddef>
#include <vector>

#include "phonoprobe/archive.h"

namespace phonoprobe {

/// Inclusive frame index range.
struct FrameRange {
  std::size_t first = 0;
  std::size_t last = 0;

  std::size_t size() const { return last - first + 1; }
  bool operator==(const FrameRange &) const = default;
};

/// Half-open time span [start, end) covered by frame `index`.
TimeWindow frame_span(const FrameSpec &spec, std::size_t index);

/// Frames whose span [offset + i*stride, offset + i*stride + rf) intersects
/// the window [start, end) with positive measure. Touching endpoints do not
/// count. Throws NoOverlap when no frame qualifies.
FrameRange overlapping_frames(const TimeWindow &window, const FrameSpec &spec,
                              std::size_t num_frames);

/// Unweighted mean of rows range.first..range.last.
std::vector<double> window_mean(const LayerActivations &layer,
                                const FrameRange &range);

/// Mean of the frames overlapping the stimulus' morph window at `layer_id`.
std::vector<double> pooled_vector(const StimulusArchive &archive,
                                  std::string_view layer_id);

}  // namespace phonoprobe

#endif  // PHONOPROBE_ALIGNMENT_H_
