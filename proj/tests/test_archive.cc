// tests/test_archive.cc

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

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "phonoprobe/archive.h"
#include "phonoprobe/error.h"
#include "test_util.h"

namespace phonoprobe {
namespace {

namespace fs = std::filesystem;
using testing::TempDir;

template <typename F>
ErrorKind kind_of(F &&f) {
  try {
    f();
  } catch (const Error &e) {
    return e.kind();
  }
  FAIL("expected phonoprobe::Error");
  return ErrorKind::kConfigError;
}

LayerActivations make_layer(const std::string &id, std::size_t frames, std::size_t dim,
                            std::mt19937_64 &rng) {
  std::normal_distribution<float> dist(0.0f, 1.0f);
  LayerActivations l{id, frames, dim, std::vector<float>(frames * dim)};
  for (auto &v : l.values) v = dist(rng);
  return l;
}

StimulusArchive make_archive(std::size_t frames, int transformer_layers, std::size_t cnn_dim,
                             std::size_t dim, std::uint64_t seed = 1) {
  std::mt19937_64 rng(seed);
  StimulusArchive a;
  a.meta = {"lih-rih_A_3", "lih-rih", "A", 3, {0.10, 0.20}, {}};
  a.layers.push_back(make_layer("C", frames, cnn_dim, rng));
  for (int t = 1; t <= transformer_layers; ++t)
    a.layers.push_back(make_layer("T" + std::to_string(t), frames, dim, rng));
  return a;
}

bool same_bits(const std::vector<float> &a, const std::vector<float> &b) {
  return a.size() == b.size() && std::memcmp(a.data(), b.data(), 4 * a.size()) == 0;
}

nlohmann::json load_json(const fs::path &p) {
  std::ifstream in(p);
  return nlohmann::json::parse(in);
}

void save_json(const fs::path &p, const nlohmann::json &j) {
  std::ofstream out(p);
  out << j.dump(2);
}

TEST_CASE("thirteen-layer archive round trips") {
  TempDir tmp;
  StimulusArchive a = make_archive(43, 12, 512, 768);
  // Awkward bit patterns must survive untouched.
  a.layers[1].values[0] = -0.0f;
  a.layers[1].values[1] = std::numeric_limits<float>::denorm_min();
  a.layers[1].values[2] = -std::numeric_limits<float>::max();
  a.layers[1].values[3] = std::numeric_limits<float>::min();
  write_archive(a, tmp.path());
  const StimulusArchive b = read_archive(tmp.path());

  REQUIRE(b.layers.size() == 13);
  for (const auto &l : b.layers) CHECK(l.num_frames == 43);
  CHECK(b.layer("C").dim == 512);
  CHECK(b.layer("T12").dim == 768);
  CHECK(b.meta == a.meta);
  for (std::size_t i = 0; i < a.layers.size(); ++i) {
    CHECK(b.layers[i].layer_id == a.layers[i].layer_id);
    CHECK(same_bits(a.layers[i].values, b.layers[i].values));
  }
  CHECK(std::signbit(b.layers[1].values[0]));
  CHECK(b.final_layer().layer_id == "T12");
  CHECK(validate_archive(b).empty());
}

TEST_CASE("single 0.5 value encodes as four little-endian bytes") {
  TempDir tmp;
  StimulusArchive a;
  a.meta = {"x", "lih-rih", "E", 0, {0.0, 0.01}, {}};
  a.layers.push_back({"T1", 1, 1, {0.5f}});
  write_archive(a, tmp.path());
  const std::string bytes = testing::read_file(tmp / "T1.f32");
  REQUIRE(bytes.size() == 4);
  CHECK(static_cast<unsigned char>(bytes[0]) == 0x00);
  CHECK(static_cast<unsigned char>(bytes[1]) == 0x00);
  CHECK(static_cast<unsigned char>(bytes[2]) == 0x00);
  CHECK(static_cast<unsigned char>(bytes[3]) == 0x3F);
  CHECK(read_archive(tmp.path()) == a);
}

TEST_CASE("read_archive error kinds") {
  SUBCASE("empty directory") {
    TempDir tmp;
    CHECK(kind_of([&] { read_archive(tmp.path()); }) == ErrorKind::kMissingManifest);
  }
  SUBCASE("short payload") {
    TempDir tmp;
    write_archive(make_archive(10, 1, 4, 6), tmp.path());
    const std::string bytes = testing::read_file(tmp / "T1.f32");
    std::ofstream(tmp / "T1.f32", std::ios::binary).write(bytes.data(), 9 * 6 * 4);
    CHECK(kind_of([&] { read_archive(tmp.path()); }) == ErrorKind::kSizeMismatch);
  }
  SUBCASE("long payload") {
    TempDir tmp;
    write_archive(make_archive(10, 1, 4, 6), tmp.path());
    std::ofstream(tmp / "C.f32", std::ios::binary | std::ios::app).write("\0\0\0\0", 4);
    CHECK(kind_of([&] { read_archive(tmp.path()); }) == ErrorKind::kSizeMismatch);
  }
  SUBCASE("missing field") {
    TempDir tmp;
    write_archive(make_archive(10, 1, 4, 6), tmp.path());
    auto j = load_json(tmp / "manifest.json");
    j.erase("pair");
    save_json(tmp / "manifest.json", j);
    CHECK(kind_of([&] { read_archive(tmp.path()); }) == ErrorKind::kMalformedManifest);
  }
  SUBCASE("wrong field type") {
    TempDir tmp;
    write_archive(make_archive(10, 1, 4, 6), tmp.path());
    auto j = load_json(tmp / "manifest.json");
    j["step"] = "three";
    save_json(tmp / "manifest.json", j);
    CHECK(kind_of([&] { read_archive(tmp.path()); }) == ErrorKind::kMalformedManifest);
  }
  SUBCASE("not json") {
    TempDir tmp;
    std::ofstream(tmp / "manifest.json") << "{ nope";
    CHECK(kind_of([&] { read_archive(tmp.path()); }) == ErrorKind::kMalformedManifest);
  }
  SUBCASE("nan payload") {
    TempDir tmp;
    StimulusArchive a = make_archive(10, 1, 4, 6);
    write_archive(a, tmp.path());
    a.layers[1].values[7] = std::numeric_limits<float>::quiet_NaN();
    write_f32_file(tmp / "T1.f32", a.layers[1].values);
    CHECK(kind_of([&] { read_archive(tmp.path()); }) == ErrorKind::kNonFiniteValue);
  }
  SUBCASE("missing payload file") {
    TempDir tmp;
    write_archive(make_archive(10, 1, 4, 6), tmp.path());
    fs::remove(tmp / "C.f32");
    CHECK(kind_of([&] { read_archive(tmp.path()); }) == ErrorKind::kIoFailure);
  }
  SUBCASE("structurally invalid manifest") {
    TempDir tmp;
    write_archive(make_archive(10, 2, 4, 6), tmp.path());
    auto j = load_json(tmp / "manifest.json");
    j["layers"][2]["layer_id"] = "T1";
    j["layers"][2]["file"] = "T2.f32";
    save_json(tmp / "manifest.json", j);
    CHECK(kind_of([&] { read_archive(tmp.path()); }) == ErrorKind::kInvalidArchive);
  }
}

TEST_CASE("validate_archive") {
  const StimulusArchive good = make_archive(20, 3, 4, 6);
  CHECK(validate_archive(good).empty());

  SUBCASE("window past the last frame") {
    StimulusArchive a = good;
    // 20 frames end at 19 * 0.020 + 0.025 = 0.405 s.
    a.meta.morph_window = {0.30, 0.50};
    const auto report = validate_archive(a);
    REQUIRE(report.size() == 1);
    CHECK(report[0].field == "morph_window");
  }
  SUBCASE("window ending exactly at the last frame is fine") {
    StimulusArchive a = good;
    a.meta.morph_window = {0.30, stimulus_duration(a.meta.frame_spec, 20)};
    CHECK(validate_archive(a).empty());
  }
  SUBCASE("duplicate layer id") {
    StimulusArchive a = good;
    a.layers[2].layer_id = "T1";
    CHECK(validate_archive(a).size() == 1);
  }
  SUBCASE("mismatched frame counts") {
    StimulusArchive a = good;
    a.layers[3].num_frames = 19;
    a.layers[3].values.resize(19 * 6);
    CHECK_FALSE(validate_archive(a).empty());
    TempDir tmp;
    CHECK(kind_of([&] { write_archive(a, tmp / "out"); }) == ErrorKind::kInvalidArchive);
    CHECK_FALSE(fs::exists(tmp / "out" / "manifest.json"));
  }
  SUBCASE("bad metadata") {
    StimulusArchive a = good;
    a.meta.pair = "pih-bih";
    a.meta.voice = "Z";
    a.meta.step = 11;
    CHECK(validate_archive(a).size() == 3);
  }
  SUBCASE("non-finite values") {
    StimulusArchive a = good;
    a.layers[0].values[0] = std::numeric_limits<float>::infinity();
    CHECK(validate_archive(a).size() == 1);
  }
  SUBCASE("bad layer id") {
    StimulusArchive a = good;
    a.layers[1].layer_id = "T25";
    CHECK(validate_archive(a).size() == 1);
  }
}

TEST_CASE("layer ids and ranks") {
  CHECK(is_valid_layer_id("C"));
  CHECK(is_valid_layer_id("T1"));
  CHECK(is_valid_layer_id("T24"));
  CHECK_FALSE(is_valid_layer_id("T0"));
  CHECK_FALSE(is_valid_layer_id("T25"));
  CHECK_FALSE(is_valid_layer_id("T01"));
  CHECK_FALSE(is_valid_layer_id("c"));
  CHECK(layer_rank("C") < layer_rank("T1"));
  CHECK(layer_rank("T2") < layer_rank("T10"));
  CHECK(is_valid_pair("vlih-vrih"));
  CHECK_FALSE(is_valid_pair("lih"));
  CHECK(stimulus_duration(FrameSpec{}, 50) == doctest::Approx(0.005 + 50 * 0.020));
}

TEST_CASE("archive layer lookup") {
  const StimulusArchive a = make_archive(5, 2, 3, 4);
  CHECK(a.find_layer("T2") != nullptr);
  CHECK(a.find_layer("T3") == nullptr);
  CHECK(kind_of([&] { (void)a.layer("T3"); }) == ErrorKind::kLayerMissing);
}

CtcHead small_head() {
  CtcHead h;
  h.vocab = {"<pad>", "|", "L", "R", "I"};
  h.dim = 3;
  h.weights.resize(15);
  for (std::size_t i = 0; i < 15; ++i) h.weights[i] = 0.25f * static_cast<float>(i) - 1.0f;
  h.bias = {0.5f, -0.5f, 0.0f, 1.0f, 2.0f};
  return h;
}

TEST_CASE("ctc head round trip and validation") {
  TempDir tmp;
  const CtcHead h = small_head();
  CHECK(validate_ctc_head(h).empty());
  write_ctc_head(h, tmp.path());
  CHECK(read_ctc_head(tmp.path()) == h);
  CHECK(h.token_index("R") == 3);
  CHECK(kind_of([&] { (void)h.token_index("Q"); }) == ErrorKind::kUnknownToken);

  CtcHead no_r = h;
  no_r.vocab[3] = "X";
  CHECK(validate_ctc_head(no_r).size() == 1);
  CtcHead dup = h;
  dup.vocab[4] = "L";
  CHECK(validate_ctc_head(dup).size() == 1);
  CtcHead short_w = h;
  short_w.weights.pop_back();
  CHECK_FALSE(validate_ctc_head(short_w).empty());

  TempDir empty;
  CHECK(kind_of([&] { read_ctc_head(empty.path()); }) == ErrorKind::kMissingManifest);
}

LabeledDataset small_dataset(std::size_t layers) {
  std::mt19937_64 rng(3);
  LabeledDataset d;
  for (int i = 0; i < 6; ++i)
    d.records.push_back({i % 2 ? PhoneLabel::kR : PhoneLabel::kL, "spk" + std::to_string(i / 2),
                         i < 3 ? "f" : "m", i % 2 ? "red" : "lead"});
  for (std::size_t k = 0; k < layers; ++k)
    d.layers.push_back(make_layer(k == 0 ? "C" : "T" + std::to_string(k), 6, 4 + k, rng));
  return d;
}

TEST_CASE("dataset round trip") {
  for (std::size_t layers : {1u, 3u}) {
    TempDir tmp;
    const LabeledDataset d = small_dataset(layers);
    write_dataset(d, tmp.path());
    CHECK(read_dataset(tmp.path()) == d);
    CHECK(read_dataset(tmp / "dataset.json") == d);
    CHECK(fs::exists(tmp / (layers == 1 ? "vectors.f32" : "vectors_T2.f32")));

    const LabeledVectorSet s = d.layer_set("C");
    CHECK(s.size() == 6);
    CHECK(s.dim == 4);
    CHECK(s.vector(5)[3] == static_cast<double>(d.layers[0].values[23]));
    CHECK(s.records[1].label == PhoneLabel::kR);
  }
  const LabeledDataset d = small_dataset(1);
  CHECK(kind_of([&] { (void)d.layer_set("T9"); }) == ErrorKind::kLayerMissing);
}

TEST_CASE("dataset with an unknown label is malformed") {
  TempDir tmp;
  write_dataset(small_dataset(1), tmp.path());
  auto j = load_json(tmp / "dataset.json");
  j["records"][0]["label"] = "x";
  save_json(tmp / "dataset.json", j);
  CHECK(kind_of([&] { read_dataset(tmp.path()); }) == ErrorKind::kMalformedManifest);
}

std::vector<StimulusArchive> continuum_archives() {
  std::vector<StimulusArchive> v;
  for (int s = kLastStep; s >= 0; --s) {
    StimulusArchive a = make_archive(12, 1, 2, 3, static_cast<std::uint64_t>(s));
    a.meta.step = s;
    a.meta.stimulus_id = "lih-rih_A_" + std::to_string(s);
    v.push_back(std::move(a));
  }
  return v;
}

TEST_CASE("order_continuum") {
  auto archives = continuum_archives();
  const Continuum c = order_continuum(archives);
  for (int s = 0; s < kNumSteps; ++s) CHECK(c[static_cast<std::size_t>(s)]->meta.step == s);

  SUBCASE("missing step") {
    archives.pop_back();
    CHECK(kind_of([&] { order_continuum(archives); }) == ErrorKind::kIncompleteContinuum);
  }
  SUBCASE("duplicate step") {
    archives[0].meta.step = 4;
    CHECK(kind_of([&] { order_continuum(archives); }) == ErrorKind::kIncompleteContinuum);
  }
  SUBCASE("mixed voices") {
    archives[3].meta.voice = "E";
    CHECK(kind_of([&] { order_continuum(archives); }) == ErrorKind::kIncompleteContinuum);
  }
}

}  // namespace
}  // namespace phonoprobe
