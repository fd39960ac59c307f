// include/phonoprobe/fixture.h

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

// Synthetic archives, CTC heads and phone datasets with known structure.
// Used by the tests, the acceptance suite and `phonoprobe make-fixture`.

#ifndef PHONOPROBE_FIXTURE_H_
#define PHONOPROBE_FIXTURE_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "phonoprobe/archive.h"

namespace phonoprobe {

struct FixtureOptions {
  std::string model_id = "synth";
  std::vector<std::string> pairs{"lih-rih", "vlih-vrih", "tlih-trih", "slih-srih"};
  std::vector<std::string> voices{"A", "E"};
  int num_transformer_layers = 4;
  std::size_t cnn_dim = 8;
  std::size_t dim = 12;
  std::size_t num_frames = 20;
  TimeWindow morph_window{0.10, 0.20};
  // Shift of the ambiguous steps towards R (t- context) or L (s- context),
  // growing linearly with layer depth up to this value at the last layer.
  double context_bias = 0.15;
  double noise = 0.02;
  std::size_t train_records = 200;
  std::size_t test_records = 100;
  std::uint64_t seed = 7;
};

std::vector<std::string> fixture_layer_ids(const FixtureOptions &options);

StimulusArchive fixture_stimulus(const FixtureOptions &options, const std::string &pair,
                                 const std::string &voice, int step);
std::vector<StimulusArchive> fixture_archives(const FixtureOptions &options);
CtcHead fixture_ctc_head(const FixtureOptions &options);
/// `split` 0 = train, 1 = test.
LabeledDataset fixture_dataset(const FixtureOptions &options, int split);

/// Continuum whose morph-window frames are (k/10) e_r + (1 - k/10) e_l for
/// orthogonal unit vectors e_r = axis 0, e_l = axis 1 of a `dim`-wide layer.
std::vector<StimulusArchive> linear_continuum(std::size_t dim, const std::string &layer_id = "T1",
                                              const std::string &pair = "lih-rih",
                                              const std::string &voice = "A");

/// Writes archives/<model>/<stimulus>/, heads/<model>/, datasets/{train,test}/
/// and a run.json under `dir`.
void write_fixture(const FixtureOptions &options, const std::filesystem::path &dir);

}  // namespace phonoprobe

#endif  // PHONOPROBE_FIXTURE_H_
