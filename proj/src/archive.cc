// src/archive.cc

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

#include "phonoprobe/archive.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <set>
#include <sstream>

#include "json.hpp"
#include "phonoprobe/error.h"

namespace phonoprobe {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

constexpr std::array<std::string_view, 4> kPairs = {"lih-rih", "vlih-vrih",
                                                    "tlih-trih", "slih-srih"};

std::uint32_t to_little_endian(std::uint32_t v) {
  if constexpr (std::endian::native == std::endian::little) {
    return v;
  } else {
    return ((v & 0xFFu) << 24) | ((v & 0xFF00u) << 8) | ((v >> 8) & 0xFF00u) |
           (v >> 24);
  }
}

[[noreturn]] void malformed(const fs::path &file, const std::string &what) {
  throw Error(ErrorKind::kMalformedManifest, file.string() + ": " + what);
}

json parse_json_file(const fs::path &file, ErrorKind missing_kind) {
  std::ifstream in(file);
  if (!in) throw Error(missing_kind, "cannot open " + file.string());
  try {
    return json::parse(in);
  } catch (const json::exception &e) {
    malformed(file, std::string("invalid JSON (") + e.what() + ")");
  }
}

const json &require(const json &obj, const char *key, const fs::path &file) {
  if (!obj.is_object()) malformed(file, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) malformed(file, std::string("missing field '") + key + "'");
  return *it;
}

std::string get_string(const json &obj, const char *key, const fs::path &file) {
  const json &v = require(obj, key, file);
  if (!v.is_string()) malformed(file, std::string("field '") + key + "' must be a string");
  return v.get<std::string>();
}

double get_number(const json &obj, const char *key, const fs::path &file) {
  const json &v = require(obj, key, file);
  if (!v.is_number()) malformed(file, std::string("field '") + key + "' must be a number");
  return v.get<double>();
}

std::int64_t get_integer(const json &obj, const char *key, const fs::path &file) {
  const json &v = require(obj, key, file);
  if (!v.is_number_integer())
    malformed(file, std::string("field '") + key + "' must be an integer");
  return v.get<std::int64_t>();
}

std::size_t get_count(const json &obj, const char *key, const fs::path &file) {
  const std::int64_t v = get_integer(obj, key, file);
  if (v < 1) malformed(file, std::string("field '") + key + "' must be >= 1");
  return static_cast<std::size_t>(v);
}

const json &get_array(const json &obj, const char *key, const fs::path &file) {
  const json &v = require(obj, key, file);
  if (!v.is_array()) malformed(file, std::string("field '") + key + "' must be an array");
  return v;
}

void write_json_file(const fs::path &file, const ordered_json &doc) {
  std::ofstream out(file, std::ios::binary);
  out << doc.dump(2) << '\n';
  if (!out) throw Error(ErrorKind::kIoFailure, "cannot write " + file.string());
}

void ensure_directory(const fs::path &dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::kIoFailure, "cannot create " + dir.string() + ": " + ec.message());
}

void check_matrix(const LayerActivations &m, const std::string &where,
                  std::size_t expected_rows, ValidationReport &report) {
  if (m.num_frames < 1)
    report.push_back({where, "num_frames must be >= 1"});
  if (m.dim < 1) report.push_back({where, "dim must be >= 1"});
  if (expected_rows != 0 && m.num_frames != expected_rows)
    report.push_back({where, "has " + std::to_string(m.num_frames) +
                                 " rows, expected " + std::to_string(expected_rows)});
  if (m.values.size() != m.num_frames * m.dim) {
    report.push_back({where, "holds " + std::to_string(m.values.size()) +
                                 " values, expected " +
                                 std::to_string(m.num_frames * m.dim)});
  }
  if (!std::all_of(m.values.begin(), m.values.end(),
                   [](float v) { return std::isfinite(v); }))
    report.push_back({where, "contains non-finite values"});
}

std::string describe(const ValidationReport &report) {
  std::ostringstream os;
  for (std::size_t i = 0; i < report.size(); ++i) {
    if (i) os << "; ";
    os << report[i].field << ": " << report[i].message;
  }
  return os.str();
}

}  // namespace

bool is_valid_layer_id(std::string_view id) {
  if (id == "C") return true;
  if (id.size() < 2 || id.size() > 3 || id[0] != 'T') return false;
  if (id[1] < '1' || id[1] > '9') return false;
  int n = id[1] - '0';
  if (id.size() == 3) {
    if (id[2] < '0' || id[2] > '9') return false;
    n = n * 10 + (id[2] - '0');
  }
  return n >= 1 && n <= 24;
}

int layer_rank(std::string_view id) {
  if (!is_valid_layer_id(id)) return 1000;
  if (id == "C") return 0;
  return std::stoi(std::string(id.substr(1)));
}

bool is_valid_pair(std::string_view pair) {
  return std::find(kPairs.begin(), kPairs.end(), pair) != kPairs.end();
}

bool is_valid_voice(std::string_view voice) { return voice == "A" || voice == "E"; }

char phone_label_char(PhoneLabel label) { return label == PhoneLabel::kR ? 'r' : 'l'; }

double stimulus_duration(const FrameSpec &spec, std::size_t num_frames) {
  if (num_frames == 0) return spec.offset_s;
  return spec.offset_s + static_cast<double>(num_frames - 1) * spec.stride_s +
         spec.receptive_field_s;
}

const LayerActivations *StimulusArchive::find_layer(std::string_view id) const {
  for (const auto &l : layers)
    if (l.layer_id == id) return &l;
  return nullptr;
}

const LayerActivations &StimulusArchive::layer(std::string_view id) const {
  const LayerActivations *l = find_layer(id);
  if (!l)
    throw Error(ErrorKind::kLayerMissing, "stimulus '" + meta.stimulus_id +
                                              "' has no layer " + std::string(id));
  return *l;
}

const LayerActivations &StimulusArchive::final_layer() const {
  if (layers.empty())
    throw Error(ErrorKind::kLayerMissing, "stimulus '" + meta.stimulus_id + "' has no layers");
  return *std::max_element(layers.begin(), layers.end(), [](const auto &a, const auto &b) {
    return layer_rank(a.layer_id) < layer_rank(b.layer_id);
  });
}

std::size_t CtcHead::token_index(std::string_view token) const {
  auto it = std::find(vocab.begin(), vocab.end(), token);
  if (it == vocab.end())
    throw Error(ErrorKind::kUnknownToken, "token '" + std::string(token) + "' not in vocabulary");
  return static_cast<std::size_t>(std::distance(vocab.begin(), it));
}

LabeledVectorSet LabeledDataset::layer_set(std::string_view layer_id) const {
  for (const auto &m : layers) {
    if (m.layer_id != layer_id) continue;
    LabeledVectorSet set;
    set.layer_id = m.layer_id;
    set.dim = m.dim;
    set.records = records;
    set.vectors.assign(m.values.begin(), m.values.end());
    return set;
  }
  throw Error(ErrorKind::kLayerMissing, "dataset has no layer " + std::string(layer_id));
}

ValidationReport validate_archive(const StimulusArchive &archive) {
  ValidationReport report;
  const StimulusMeta &meta = archive.meta;
  if (meta.stimulus_id.empty()) report.push_back({"stimulus_id", "must not be empty"});
  if (!is_valid_pair(meta.pair))
    report.push_back({"pair", "unknown continuum pair '" + meta.pair + "'"});
  if (!is_valid_voice(meta.voice))
    report.push_back({"voice", "unknown voice '" + meta.voice + "'"});
  if (meta.step < 0 || meta.step > kLastStep)
    report.push_back({"step", "must be in [0, 10], got " + std::to_string(meta.step)});

  const FrameSpec &fs = meta.frame_spec;
  if (!(fs.stride_s > 0.0) || !std::isfinite(fs.stride_s))
    report.push_back({"frame_spec.stride_s", "must be > 0"});
  if (!(fs.receptive_field_s > 0.0) || !std::isfinite(fs.receptive_field_s))
    report.push_back({"frame_spec.receptive_field_s", "must be > 0"});
  if (!(fs.offset_s >= 0.0) || !std::isfinite(fs.offset_s))
    report.push_back({"frame_spec.offset_s", "must be >= 0"});

  const TimeWindow &w = meta.morph_window;
  const bool window_ok = std::isfinite(w.start_s) && std::isfinite(w.end_s) &&
                         w.start_s >= 0.0 && w.start_s < w.end_s;
  if (!window_ok) report.push_back({"morph_window", "requires 0 <= start_s < end_s"});

  if (archive.layers.empty()) {
    report.push_back({"layers", "archive has no layers"});
    return report;
  }

  std::set<std::string> seen;
  const std::size_t frames = archive.layers.front().num_frames;
  for (const auto &layer : archive.layers) {
    const std::string where = "layers[" + layer.layer_id + "]";
    if (!is_valid_layer_id(layer.layer_id))
      report.push_back({where, "invalid layer_id '" + layer.layer_id + "'"});
    if (!seen.insert(layer.layer_id).second)
      report.push_back({where, "duplicate layer_id"});
    if (layer.num_frames != frames)
      report.push_back({where, "num_frames " + std::to_string(layer.num_frames) +
                                   " differs from " + std::to_string(frames)});
    check_matrix(layer, where, 0, report);
  }

  if (window_ok && frames >= 1) {
    const double duration = stimulus_duration(fs, frames);
    if (w.end_s > duration) {
      std::ostringstream os;
      os << "end_s " << w.end_s << " lies beyond the last frame span (ends at "
         << duration << ")";
      report.push_back({"morph_window", os.str()});
    }
  }
  return report;
}

ValidationReport validate_ctc_head(const CtcHead &head) {
  ValidationReport report;
  if (head.vocab.empty()) report.push_back({"vocab", "must not be empty"});
  std::set<std::string> seen;
  for (const auto &t : head.vocab)
    if (!seen.insert(t).second) report.push_back({"vocab", "duplicate token '" + t + "'"});
  for (const char *t : {"L", "R"})
    if (!seen.count(t)) report.push_back({"vocab", std::string("missing token '") + t + "'"});
  if (head.dim < 1) report.push_back({"dim", "must be >= 1"});
  if (head.weights.size() != head.vocab.size() * head.dim)
    report.push_back({"weights", "row count does not match vocab size"});
  if (head.bias.size() != head.vocab.size())
    report.push_back({"bias", "length does not match vocab size"});
  auto finite = [](float v) { return std::isfinite(v); };
  if (!std::all_of(head.weights.begin(), head.weights.end(), finite) ||
      !std::all_of(head.bias.begin(), head.bias.end(), finite))
    report.push_back({"weights", "contains non-finite values"});
  return report;
}

ValidationReport validate_dataset(const LabeledDataset &dataset) {
  ValidationReport report;
  if (dataset.records.empty()) report.push_back({"records", "dataset is empty"});
  if (dataset.layers.empty()) report.push_back({"layers", "dataset has no layers"});
  std::set<std::string> seen;
  for (const auto &layer : dataset.layers) {
    const std::string where = "layers[" + layer.layer_id + "]";
    if (!is_valid_layer_id(layer.layer_id))
      report.push_back({where, "invalid layer_id '" + layer.layer_id + "'"});
    if (!seen.insert(layer.layer_id).second) report.push_back({where, "duplicate layer_id"});
    check_matrix(layer, where, dataset.records.size(), report);
  }
  return report;
}

std::vector<float> read_f32_file(const fs::path &file, std::size_t expected_count) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIoFailure, "cannot open " + file.string());
  std::vector<char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (bytes.size() != 4 * expected_count)
    throw Error(ErrorKind::kSizeMismatch,
                file.string() + " holds " + std::to_string(bytes.size()) +
                    " bytes, expected " + std::to_string(4 * expected_count));
  std::vector<float> values(expected_count);
  for (std::size_t i = 0; i < expected_count; ++i) {
    std::uint32_t raw;
    std::memcpy(&raw, bytes.data() + 4 * i, 4);
    values[i] = std::bit_cast<float>(to_little_endian(raw));
    if (!std::isfinite(values[i]))
      throw Error(ErrorKind::kNonFiniteValue,
                  file.string() + " value " + std::to_string(i) + " is not finite");
  }
  return values;
}

void write_f32_file(const fs::path &file, std::span<const float> values) {
  std::vector<char> bytes(4 * values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    const std::uint32_t raw = to_little_endian(std::bit_cast<std::uint32_t>(values[i]));
    std::memcpy(bytes.data() + 4 * i, &raw, 4);
  }
  std::ofstream out(file, std::ios::binary);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorKind::kIoFailure, "cannot write " + file.string());
}

StimulusArchive read_archive(const fs::path &dir) {
  const fs::path manifest_path = dir / "manifest.json";
  if (!fs::is_regular_file(manifest_path))
    throw Error(ErrorKind::kMissingManifest, "no manifest.json in " + dir.string());
  const json doc = parse_json_file(manifest_path, ErrorKind::kMissingManifest);

  StimulusArchive archive;
  StimulusMeta &meta = archive.meta;
  meta.stimulus_id = get_string(doc, "stimulus_id", manifest_path);
  meta.pair = get_string(doc, "pair", manifest_path);
  meta.voice = get_string(doc, "voice", manifest_path);
  meta.step = static_cast<int>(get_integer(doc, "step", manifest_path));
  const json &window = require(doc, "morph_window", manifest_path);
  meta.morph_window.start_s = get_number(window, "start_s", manifest_path);
  meta.morph_window.end_s = get_number(window, "end_s", manifest_path);
  const json &spec = require(doc, "frame_spec", manifest_path);
  meta.frame_spec.stride_s = get_number(spec, "stride_s", manifest_path);
  meta.frame_spec.receptive_field_s = get_number(spec, "receptive_field_s", manifest_path);
  meta.frame_spec.offset_s = get_number(spec, "offset_s", manifest_path);

  for (const json &entry : get_array(doc, "layers", manifest_path)) {
    LayerActivations layer;
    layer.layer_id = get_string(entry, "layer_id", manifest_path);
    layer.num_frames = get_count(entry, "num_frames", manifest_path);
    layer.dim = get_count(entry, "dim", manifest_path);
    const std::string file = get_string(entry, "file", manifest_path);
    layer.values = read_f32_file(dir / file, layer.num_frames * layer.dim);
    archive.layers.push_back(std::move(layer));
  }

  const ValidationReport report = validate_archive(archive);
  if (!report.empty())
    throw Error(ErrorKind::kInvalidArchive, dir.string() + ": " + describe(report));
  return archive;
}

void write_archive(const StimulusArchive &archive, const fs::path &dir) {
  const ValidationReport report = validate_archive(archive);
  if (!report.empty())
    throw Error(ErrorKind::kInvalidArchive, "refusing to write: " + describe(report));
  ensure_directory(dir);

  const StimulusMeta &meta = archive.meta;
  ordered_json doc;
  doc["stimulus_id"] = meta.stimulus_id;
  doc["pair"] = meta.pair;
  doc["voice"] = meta.voice;
  doc["step"] = meta.step;
  doc["morph_window"] = {{"start_s", meta.morph_window.start_s},
                         {"end_s", meta.morph_window.end_s}};
  doc["frame_spec"] = {{"stride_s", meta.frame_spec.stride_s},
                       {"receptive_field_s", meta.frame_spec.receptive_field_s},
                       {"offset_s", meta.frame_spec.offset_s}};
  doc["layers"] = ordered_json::array();
  for (const auto &layer : archive.layers) {
    const std::string file = layer.layer_id + ".f32";
    write_f32_file(dir / file, layer.values);
    doc["layers"].push_back({{"layer_id", layer.layer_id},
                             {"num_frames", layer.num_frames},
                             {"dim", layer.dim},
                             {"file", file}});
  }
  write_json_file(dir / "manifest.json", doc);
}

CtcHead read_ctc_head(const fs::path &dir) {
  const fs::path path = dir / "ctc_head.json";
  if (!fs::is_regular_file(path))
    throw Error(ErrorKind::kMissingManifest, "no ctc_head.json in " + dir.string());
  const json doc = parse_json_file(path, ErrorKind::kMissingManifest);

  CtcHead head;
  for (const json &t : get_array(doc, "vocab", path)) {
    if (!t.is_string()) malformed(path, "vocab entries must be strings");
    head.vocab.push_back(t.get<std::string>());
  }
  const std::size_t vocab_size = get_count(doc, "vocab_size", path);
  if (vocab_size != head.vocab.size()) malformed(path, "vocab_size does not match vocab");
  head.dim = get_count(doc, "dim", path);
  head.weights = read_f32_file(dir / get_string(doc, "weights", path), vocab_size * head.dim);
  head.bias = read_f32_file(dir / get_string(doc, "bias", path), vocab_size);

  const ValidationReport report = validate_ctc_head(head);
  if (!report.empty()) throw Error(ErrorKind::kInvalidArchive, path.string() + ": " + describe(report));
  return head;
}

void write_ctc_head(const CtcHead &head, const fs::path &dir) {
  const ValidationReport report = validate_ctc_head(head);
  if (!report.empty())
    throw Error(ErrorKind::kInvalidArchive, "refusing to write head: " + describe(report));
  ensure_directory(dir);
  write_f32_file(dir / "weights.f32", head.weights);
  write_f32_file(dir / "bias.f32", head.bias);
  ordered_json doc;
  doc["vocab"] = head.vocab;
  doc["vocab_size"] = head.vocab.size();
  doc["dim"] = head.dim;
  doc["weights"] = "weights.f32";
  doc["bias"] = "bias.f32";
  write_json_file(dir / "ctc_head.json", doc);
}

LabeledDataset read_dataset(const fs::path &path) {
  const fs::path file = fs::is_directory(path) ? path / "dataset.json" : path;
  const fs::path dir = file.parent_path();
  if (!fs::is_regular_file(file))
    throw Error(ErrorKind::kMissingManifest, "no dataset manifest at " + file.string());
  const json doc = parse_json_file(file, ErrorKind::kMissingManifest);

  LabeledDataset dataset;
  const std::size_t n = get_count(doc, "num_records", file);
  for (const json &r : get_array(doc, "records", file)) {
    PhoneRecord rec;
    const std::string label = get_string(r, "label", file);
    if (label == "l")
      rec.label = PhoneLabel::kL;
    else if (label == "r")
      rec.label = PhoneLabel::kR;
    else
      malformed(file, "label must be 'l' or 'r', got '" + label + "'");
    rec.speaker_id = get_string(r, "speaker_id", file);
    rec.speaker_sex = get_string(r, "speaker_sex", file);
    rec.word = get_string(r, "word", file);
    dataset.records.push_back(std::move(rec));
  }
  if (dataset.records.size() != n) malformed(file, "num_records does not match records");
  for (const json &entry : get_array(doc, "layers", file)) {
    LayerActivations m;
    m.layer_id = get_string(entry, "layer_id", file);
    m.dim = get_count(entry, "dim", file);
    m.num_frames = n;
    m.values = read_f32_file(dir / get_string(entry, "file", file), n * m.dim);
    dataset.layers.push_back(std::move(m));
  }
  const ValidationReport report = validate_dataset(dataset);
  if (!report.empty()) throw Error(ErrorKind::kInvalidArchive, file.string() + ": " + describe(report));
  return dataset;
}

void write_dataset(const LabeledDataset &dataset, const fs::path &dir) {
  const ValidationReport report = validate_dataset(dataset);
  if (!report.empty())
    throw Error(ErrorKind::kInvalidArchive, "refusing to write dataset: " + describe(report));
  ensure_directory(dir);
  ordered_json doc;
  doc["num_records"] = dataset.records.size();
  doc["records"] = ordered_json::array();
  for (const auto &r : dataset.records)
    doc["records"].push_back({{"label", std::string(1, phone_label_char(r.label))},
                              {"speaker_id", r.speaker_id},
                              {"speaker_sex", r.speaker_sex},
                              {"word", r.word}});
  doc["layers"] = ordered_json::array();
  const bool single = dataset.layers.size() == 1;
  for (const auto &m : dataset.layers) {
    const std::string file = single ? "vectors.f32" : "vectors_" + m.layer_id + ".f32";
    write_f32_file(dir / file, m.values);
    doc["layers"].push_back({{"layer_id", m.layer_id}, {"dim", m.dim}, {"file", file}});
  }
  write_json_file(dir / "dataset.json", doc);
}

Continuum order_continuum(std::span<const StimulusArchive *const> archives) {
  Continuum ordered{};
  if (archives.empty())
    throw Error(ErrorKind::kIncompleteContinuum, "no archives given");
  const StimulusMeta &first = archives.front()->meta;
  for (const StimulusArchive *a : archives) {
    const StimulusMeta &m = a->meta;
    if (m.pair != first.pair || m.voice != first.voice)
      throw Error(ErrorKind::kIncompleteContinuum,
                  "continuum mixes " + first.pair + "/" + first.voice + " with " +
                      m.pair + "/" + m.voice);
    if (m.step < 0 || m.step > kLastStep)
      throw Error(ErrorKind::kIncompleteContinuum, "step out of range in " + m.stimulus_id);
    if (ordered[static_cast<std::size_t>(m.step)])
      throw Error(ErrorKind::kIncompleteContinuum,
                  "step " + std::to_string(m.step) + " appears twice in " + first.pair +
                      "/" + first.voice);
    ordered[static_cast<std::size_t>(m.step)] = a;
  }
  for (int s = 0; s < kNumSteps; ++s)
    if (!ordered[static_cast<std::size_t>(s)])
      throw Error(ErrorKind::kIncompleteContinuum,
                  first.pair + "/" + first.voice + " is missing step " + std::to_string(s));
  return ordered;
}

Continuum order_continuum(std::span<const StimulusArchive> archives) {
  std::vector<const StimulusArchive *> ptrs;
  ptrs.reserve(archives.size());
  for (const auto &a : archives) ptrs.push_back(&a);
  return order_continuum(std::span<const StimulusArchive *const>(ptrs));
}

}  // namespace phonoprobe
