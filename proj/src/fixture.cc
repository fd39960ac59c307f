// src/fixture.cc

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

#include "phonoprobe/fixture.h"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <random>

#include "json.hpp"
#include "phonoprobe/alignment.h"
#include "phonoprobe/error.h"

namespace phonoprobe {

namespace fs = std::filesystem;

namespace {

// FNV-1a, so fixture seeds do not depend on std::hash.
std::uint64_t mix(std::uint64_t h, const std::string &s) {
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::uint64_t seed_for(std::uint64_t base, std::initializer_list<std::string> parts) {
  std::uint64_t h = 14695981039346656037ull ^ base;
  for (const auto &p : parts) h = mix(h, p + "\x1f");
  return h;
}

double context_sign(const std::string &pair) {
  if (pair == "tlih-trih") return 1.0;
  if (pair == "slih-srih") return -1.0;
  return 0.0;
}

std::size_t pair_axis(const std::string &pair) {
  if (pair == "vlih-vrih") return 3;
  if (pair == "tlih-trih") return 4;
  if (pair == "slih-srih") return 5;
  return 2;
}

std::size_t layer_dim(const FixtureOptions &o, const std::string &layer_id) {
  return layer_id == "C" ? o.cnn_dim : o.dim;
}

double depth(const FixtureOptions &o, const std::string &layer_id) {
  return static_cast<double>(layer_rank(layer_id)) / std::max(1, o.num_transformer_layers);
}

}  // namespace

std::vector<std::string> fixture_layer_ids(const FixtureOptions &o) {
  std::vector<std::string> ids{"C"};
  for (int t = 1; t <= o.num_transformer_layers; ++t) ids.push_back("T" + std::to_string(t));
  return ids;
}

StimulusArchive fixture_stimulus(const FixtureOptions &o, const std::string &pair,
                                 const std::string &voice, int step) {
  if (o.cnn_dim < 8 || o.dim < 8)
    throw Error(ErrorKind::kConfigError, "fixture layers need at least 8 dimensions");
  StimulusArchive a;
  a.meta.stimulus_id = pair + "_" + voice + "_" + std::to_string(step);
  a.meta.pair = pair;
  a.meta.voice = voice;
  a.meta.step = step;
  a.meta.morph_window = o.morph_window;
  const FrameRange window = overlapping_frames(o.morph_window, a.meta.frame_spec, o.num_frames);

  for (const std::string &id : fixture_layer_ids(o)) {
    LayerActivations layer;
    layer.layer_id = id;
    layer.num_frames = o.num_frames;
    layer.dim = layer_dim(o, id);
    layer.values.assign(layer.num_frames * layer.dim, 0.0f);

    double alpha = step / static_cast<double>(kLastStep);
    if (step > 0 && step < kLastStep)
      alpha = std::clamp(alpha + context_sign(pair) * o.context_bias * depth(o, id), 0.0, 1.0);
    const std::size_t voice_axis = voice == "A" ? layer.dim - 1 : layer.dim - 2;

    std::mt19937_64 rng(seed_for(o.seed, {o.model_id, pair, voice, std::to_string(step), id}));
    std::normal_distribution<double> noise(0.0, o.noise);
    for (std::size_t f = 0; f < layer.num_frames; ++f) {
      std::vector<double> v(layer.dim, 0.0);
      if (f >= window.first && f <= window.last) {
        v[1] = 1.0 - alpha;
        v[0] = alpha;
      } else {
        v[pair_axis(pair)] = 1.0;
      }
      v[voice_axis] += 0.3;
      for (std::size_t j = 0; j < layer.dim; ++j)
        layer.values[f * layer.dim + j] = static_cast<float>(v[j] + noise(rng));
    }
    a.layers.push_back(std::move(layer));
  }
  return a;
}

std::vector<StimulusArchive> fixture_archives(const FixtureOptions &o) {
  std::vector<StimulusArchive> out;
  for (const auto &pair : o.pairs)
    for (const auto &voice : o.voices)
      for (int step = 0; step < kNumSteps; ++step) out.push_back(fixture_stimulus(o, pair, voice, step));
  return out;
}

CtcHead fixture_ctc_head(const FixtureOptions &o) {
  CtcHead head;
  head.vocab = {"<pad>", "|", "L", "R", "I", "S", "T", "V"};
  head.dim = o.dim;
  head.weights.assign(head.vocab.size() * o.dim, 0.0f);
  head.bias.assign(head.vocab.size(), 0.0f);
  head.weights[2 * o.dim + 1] = 6.0f;  // L reads axis 1
  head.weights[3 * o.dim + 0] = 6.0f;  // R reads axis 0
  head.weights[5 * o.dim + 5] = 4.0f;
  head.weights[6 * o.dim + 4] = 4.0f;
  head.weights[7 * o.dim + 3] = 4.0f;
  head.bias[0] = 1.0f;
  return head;
}

LabeledDataset fixture_dataset(const FixtureOptions &o, int split) {
  const std::size_t n = split == 0 ? o.train_records : o.test_records;
  LabeledDataset ds;
  for (std::size_t i = 0; i < n; ++i) {
    PhoneRecord r;
    r.label = i % 2 ? PhoneLabel::kR : PhoneLabel::kL;
    const std::size_t speaker = (i / 2) % 10;
    char buf[16];
    std::snprintf(buf, sizeof buf, "spk%02zu", speaker + (split == 0 ? 0 : 10));
    r.speaker_id = buf;
    r.speaker_sex = speaker % 2 ? "F" : "M";
    r.word = r.label == PhoneLabel::kR ? "reef" : "leaf";
    ds.records.push_back(std::move(r));
  }
  for (const std::string &id : fixture_layer_ids(o)) {
    LayerActivations m;
    m.layer_id = id;
    m.dim = layer_dim(o, id);
    m.num_frames = n;
    m.values.resize(n * m.dim);
    const double sigma = 0.9 - 0.5 * depth(o, id);
    std::mt19937_64 rng(seed_for(o.seed, {o.model_id, "dataset", std::to_string(split), id}));
    std::normal_distribution<double> noise(0.0, sigma);
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t axis = ds.records[i].label == PhoneLabel::kR ? 0 : 1;
      for (std::size_t j = 0; j < m.dim; ++j)
        m.values[i * m.dim + j] = static_cast<float>((j == axis ? 1.0 : 0.0) + noise(rng));
    }
    ds.layers.push_back(std::move(m));
  }
  return ds;
}

std::vector<StimulusArchive> linear_continuum(std::size_t dim, const std::string &layer_id,
                                              const std::string &pair, const std::string &voice) {
  std::vector<StimulusArchive> out;
  for (int step = 0; step < kNumSteps; ++step) {
    StimulusArchive a;
    a.meta.stimulus_id = pair + "_" + voice + "_" + std::to_string(step);
    a.meta.pair = pair;
    a.meta.voice = voice;
    a.meta.step = step;
    a.meta.morph_window = {0.10, 0.20};
    LayerActivations layer;
    layer.layer_id = layer_id;
    layer.num_frames = 20;
    layer.dim = dim;
    layer.values.assign(layer.num_frames * dim, 0.0f);
    const float toward_r = static_cast<float>(step) / 10.0f;
    const float toward_l = static_cast<float>(kLastStep - step) / 10.0f;
    for (std::size_t f = 0; f < layer.num_frames; ++f) {
      layer.values[f * dim + 0] = toward_r;
      layer.values[f * dim + 1] = toward_l;
    }
    a.layers.push_back(std::move(layer));
    out.push_back(std::move(a));
  }
  return out;
}

void write_fixture(const FixtureOptions &o, const fs::path &dir) {
  for (const auto &a : fixture_archives(o))
    write_archive(a, dir / "archives" / o.model_id / a.meta.stimulus_id);
  write_ctc_head(fixture_ctc_head(o), dir / "heads" / o.model_id);
  write_dataset(fixture_dataset(o, 0), dir / "datasets" / "train");
  write_dataset(fixture_dataset(o, 1), dir / "datasets" / "test");

  nlohmann::ordered_json run;
  run["archive_root"] = "archives";
  run["models"] = {o.model_id};
  run["measures"] = {"sim", "probe", "ctc"};
  run["layers"] = "all";
  run["ctc_head_map"] = {{o.model_id, "heads/" + o.model_id}};
  run["probe_dir"] = "probes";
  run["output_dir"] = "results";
  std::ofstream out(dir / "run.json", std::ios::binary);
  out << run.dump(2) << '\n';
  if (!out) throw Error(ErrorKind::kIoFailure, "cannot write " + (dir / "run.json").string());
}

}  // namespace phonoprobe
