// include/phonoprobe/archive.h

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

// On-disk interchange between the model exporter and the analysis engine.
//
// Stimulus archive, one directory per stimulus:
//   manifest.json   {stimulus_id, pair, voice, step,
//                    morph_window:{start_s,end_s},
//                    frame_spec:{stride_s,receptive_field_s,offset_s},
//                    layers:[{layer_id,num_frames,dim,file}]}
//   <file>.f32      num_frames x dim, float32 little-endian, row-major
//
// CTC head, one directory per model:
//   ctc_head.json   {vocab:[...], vocab_size, dim, weights, bias}
//   weights.f32     vocab_size x dim;  bias.f32  vocab_size
//
// Labeled phone dataset:
//   dataset.json    {num_records, records:[{label,speaker_id,speaker_sex,word}],
//                    layers:[{layer_id,dim,file}]}
//   <file>.f32      num_records x dim per layer

#ifndef PHONOPROBE_ARCHIVE_H_
#define PHONOPROBE_ARCHIVE_H_

#include <array>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace phonoprobe {

inline constexpr int kNumSteps = 11;
inline constexpr int kLastStep = kNumSteps - 1;

struct FrameSpec {
  double stride_s = 0.020;
  double receptive_field_s = 0.025;
  double offset_s = 0.0;

  bool operator==(const FrameSpec &) const = default;
};

struct TimeWindow {
  double start_s = 0.0;
  double end_s = 0.0;

  bool operator==(const TimeWindow &) const = default;
};

/// Row-major num_frames x dim float matrix for one layer. Also used for the
/// per-layer matrices of labeled datasets (one row per record).
struct LayerActivations {
  std::string layer_id;
  std::size_t num_frames = 0;
  std::size_t dim = 0;
  std::vector<float> values;

  std::span<const float> row(std::size_t i) const {
    return std::span<const float>(values).subspan(i * dim, dim);
  }
  bool operator==(const LayerActivations &) const = default;
};

struct StimulusMeta {
  std::string stimulus_id;
  std::string pair;
  std::string voice;
  int step = 0;
  TimeWindow morph_window;
  FrameSpec frame_spec;

  bool operator==(const StimulusMeta &) const = default;
};

struct StimulusArchive {
  StimulusMeta meta;
  std::vector<LayerActivations> layers;

  const LayerActivations *find_layer(std::string_view layer_id) const;
  /// Throws LayerMissing.
  const LayerActivations &layer(std::string_view layer_id) const;
  /// Deepest layer by layer rank (the model's output layer).
  const LayerActivations &final_layer() const;

  bool operator==(const StimulusArchive &) const = default;
};

struct CtcHead {
  std::vector<std::string> vocab;
  std::size_t dim = 0;
  std::vector<float> weights;  // vocab.size() x dim
  std::vector<float> bias;     // vocab.size()

  /// Index of `token` in the vocabulary; throws UnknownToken.
  std::size_t token_index(std::string_view token) const;
  bool operator==(const CtcHead &) const = default;
};

enum class PhoneLabel { kL, kR };

struct PhoneRecord {
  PhoneLabel label = PhoneLabel::kL;
  std::string speaker_id;
  std::string speaker_sex;
  std::string word;

  bool operator==(const PhoneRecord &) const = default;
};

/// Labeled pooled phone vectors for one layer.
struct LabeledVectorSet {
  std::string layer_id;
  std::size_t dim = 0;
  std::vector<double> vectors;  // records.size() x dim
  std::vector<PhoneRecord> records;

  std::size_t size() const { return records.size(); }
  std::span<const double> vector(std::size_t i) const {
    return std::span<const double>(vectors).subspan(i * dim, dim);
  }
};

/// Records shared across layers plus one matrix per layer, as stored in a
/// dataset.json directory.
struct LabeledDataset {
  std::vector<PhoneRecord> records;
  std::vector<LayerActivations> layers;  // num_frames == records.size()

  /// Throws LayerMissing.
  LabeledVectorSet layer_set(std::string_view layer_id) const;
  bool operator==(const LabeledDataset &) const = default;
};

struct Violation {
  std::string field;
  std::string message;
};
using ValidationReport = std::vector<Violation>;

// Layer ids: "C" (final CNN output) or "T1".."T24" (Transformer blocks).
bool is_valid_layer_id(std::string_view layer_id);
/// Depth rank: C -> 0, Tn -> n. Unknown ids rank after all valid ones.
int layer_rank(std::string_view layer_id);
bool is_valid_pair(std::string_view pair);
bool is_valid_voice(std::string_view voice);
char phone_label_char(PhoneLabel label);

/// End of the last frame's receptive field.
double stimulus_duration(const FrameSpec &spec, std::size_t num_frames);

ValidationReport validate_archive(const StimulusArchive &archive);
ValidationReport validate_ctc_head(const CtcHead &head);
ValidationReport validate_dataset(const LabeledDataset &dataset);

StimulusArchive read_archive(const std::filesystem::path &dir);
void write_archive(const StimulusArchive &archive,
                   const std::filesystem::path &dir);

CtcHead read_ctc_head(const std::filesystem::path &dir);
void write_ctc_head(const CtcHead &head, const std::filesystem::path &dir);

/// `path` is either the dataset.json file or its directory.
LabeledDataset read_dataset(const std::filesystem::path &path);
void write_dataset(const LabeledDataset &dataset,
                   const std::filesystem::path &dir);

// Raw float32 little-endian payload helpers.
std::vector<float> read_f32_file(const std::filesystem::path &file,
                                 std::size_t expected_count);
void write_f32_file(const std::filesystem::path &file,
                    std::span<const float> values);

/// The 11 archives of one continuum ordered by step.
using Continuum = std::array<const StimulusArchive *, kNumSteps>;

/// Orders `archives` by step; all must share pair and voice and cover
/// steps 0..10 exactly once. Throws IncompleteContinuum.
Continuum order_continuum(std::span<const StimulusArchive> archives);
Continuum order_continuum(std::span<const StimulusArchive *const> archives);

}  // namespace phonoprobe

#endif  // PHONOPROBE_ARCHIVE_H_
