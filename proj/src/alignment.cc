// src/alignment.cc

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

#include "phonoprobe/alignment.h"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "phonoprobe/error.h"
#include "phonoprobe/kernels.h"

namespace phonoprobe {

namespace {

// Frame i starts before the window ends.
bool starts_before(const FrameSpec &spec, std::size_t i, double end_s) {
  return frame_span(spec, i).start_s < end_s;
}

// Frame i ends after the window starts.
bool ends_after(const FrameSpec &spec, std::size_t i, double start_s) {
  return frame_span(spec, i).end_s > start_s;
}

[[noreturn]] void no_overlap(const TimeWindow &w, std::size_t num_frames) {
  std::ostringstream os;
  os << "window [" << w.start_s << ", " << w.end_s << ") overlaps none of "
     << num_frames << " frames";
  throw Error(ErrorKind::kNoOverlap, os.str());
}

}  // namespace

TimeWindow frame_span(const FrameSpec &spec, std::size_t index) {
  const double start = spec.offset_s + static_cast<double>(index) * spec.stride_s;
  return {start, start + spec.receptive_field_s};
}

FrameRange overlapping_frames(const TimeWindow &window, const FrameSpec &spec,
                              std::size_t num_frames) {
  if (num_frames == 0) no_overlap(window, num_frames);
  const double last_index = static_cast<double>(num_frames - 1);

  // Closed-form guesses, then exact correction against the span predicates
  // so the result agrees with per-frame enumeration at rounding boundaries.
  double guess = std::floor((window.start_s - spec.offset_s - spec.receptive_field_s) /
                            spec.stride_s);
  std::size_t first = static_cast<std::size_t>(std::clamp(guess, 0.0, last_index));
  while (first > 0 && ends_after(spec, first - 1, window.start_s)) --first;
  while (first < num_frames && !ends_after(spec, first, window.start_s)) ++first;
  if (first == num_frames) no_overlap(window, num_frames);

  guess = std::ceil((window.end_s - spec.offset_s) / spec.stride_s);
  std::size_t last = static_cast<std::size_t>(std::clamp(guess, 0.0, last_index));
  while (last + 1 < num_frames && starts_before(spec, last + 1, window.end_s)) ++last;
  while (last > first && !starts_before(spec, last, window.end_s)) --last;
  if (last < first || !starts_before(spec, last, window.end_s)) no_overlap(window, num_frames);

  return {first, last};
}

std::vector<double> window_mean(const LayerActivations &layer, const FrameRange &range) {
  if (range.first > range.last || range.last >= layer.num_frames)
    throw Error(ErrorKind::kNoOverlap, "frame range outside layer " + layer.layer_id);
  std::vector<double> mean(layer.dim);
  kernels::column_mean(layer.values, layer.dim, range.first, range.last, mean,
                       kernels::default_exec());
  return mean;
}

std::vector<double> pooled_vector(const StimulusArchive &archive, std::string_view layer_id) {
  const LayerActivations &layer = archive.layer(layer_id);
  const FrameRange range = overlapping_frames(archive.meta.morph_window,
                                              archive.meta.frame_spec, layer.num_frames);
  return window_mean(layer, range);
}

}  // namespace phonoprobe
