// src/report.cc

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

#include "phonoprobe/report.h"

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <set>
#include <tuple>

#include "json.hpp"
#include "phonoprobe/archive.h"
#include "phonoprobe/ctc_lens.h"
#include "phonoprobe/error.h"
#include "phonoprobe/probe.h"

namespace phonoprobe {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

[[noreturn]] void config_error(const std::string &what) {
  throw Error(ErrorKind::kConfigError, what);
}

fs::path resolve(const fs::path &base, const std::string &p) {
  fs::path path(p);
  return path.is_relative() ? base / path : path;
}

std::vector<std::string> string_list(const json &v, const char *key) {
  if (!v.is_array()) config_error(std::string("'") + key + "' must be an array of strings");
  std::vector<std::string> out;
  for (const json &e : v) {
    if (!e.is_string()) config_error(std::string("'") + key + "' must be an array of strings");
    out.push_back(e.get<std::string>());
  }
  return out;
}

bool curve_less(const ModelCurve &a, const ModelCurve &b) {
  const int ra = layer_rank(a.curve.layer_id), rb = layer_rank(b.curve.layer_id);
  const std::string_view ma = measure_name(a.curve.measure), mb = measure_name(b.curve.measure);
  return std::tie(a.model_id, a.curve.pair, a.curve.voice, ra, a.curve.layer_id, ma) <
         std::tie(b.model_id, b.curve.pair, b.curve.voice, rb, b.curve.layer_id, mb);
}

ErrorRow error_row(const std::string &model, const std::string &item, const Error &e) {
  return {model, item, std::string(error_kind_name(e.kind())), e.what()};
}

std::vector<fs::path> stimulus_dirs(const fs::path &model_dir) {
  std::vector<fs::path> dirs;
  for (const auto &entry : fs::directory_iterator(model_dir))
    if (entry.is_directory()) dirs.push_back(entry.path());
  std::sort(dirs.begin(), dirs.end());
  return dirs;
}

std::optional<fs::path> find_probe(const RunConfig &config, const std::string &model,
                                   const std::string &layer) {
  for (const fs::path &p : {config.probe_dir / model / probe_file_name(layer),
                            config.probe_dir / probe_file_name(layer)})
    if (fs::is_regular_file(p)) return p;
  return std::nullopt;
}

struct Task {
  std::size_t continuum;
  std::string layer_id;
  Measure measure;
};

}  // namespace

RunConfig load_run_config(const fs::path &file) {
  std::ifstream in(file);
  if (!in) config_error("cannot open config " + file.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception &e) {
    config_error(file.string() + ": " + e.what());
  }
  if (!doc.is_object()) config_error(file.string() + ": expected a JSON object");
  const fs::path base = file.parent_path();
  RunConfig config;
  try {
    if (!doc.contains("archive_root")) config_error("config needs 'archive_root'");
    config.archive_root = resolve(base, doc.at("archive_root").get<std::string>());
    if (!doc.contains("models")) config_error("config needs 'models'");
    config.models = string_list(doc.at("models"), "models");
    if (doc.contains("measures")) {
      config.measures.clear();
      for (const auto &m : string_list(doc.at("measures"), "measures"))
        config.measures.push_back(parse_measure(m));
    }
    if (doc.contains("layers")) {
      const json &l = doc.at("layers");
      if (l.is_string()) {
        if (l.get<std::string>() != "all") config_error("'layers' must be \"all\" or a list");
      } else {
        config.layers = string_list(l, "layers");
      }
    }
    if (doc.contains("ctc_head_map")) {
      const json &m = doc.at("ctc_head_map");
      if (!m.is_object()) config_error("'ctc_head_map' must be an object");
      for (const auto &[model, path] : m.items())
        config.ctc_head_map[model] = resolve(base, path.get<std::string>());
    }
    if (doc.contains("probe_dir"))
      config.probe_dir = resolve(base, doc.at("probe_dir").get<std::string>());
    config.output_dir = resolve(base, doc.value("output_dir", std::string("results")));
  } catch (const json::exception &e) {
    config_error(file.string() + ": " + e.what());
  }
  return config;
}

void check_run_config(const RunConfig &config) {
  if (config.models.empty()) config_error("no models configured");
  if (config.measures.empty()) config_error("no measures configured");
  if (!fs::is_directory(config.archive_root))
    config_error("archive_root " + config.archive_root.string() + " is not a directory");
  for (const auto &model : config.models)
    if (!fs::is_directory(config.archive_root / model))
      config_error("no archives for model '" + model + "' under " + config.archive_root.string());
  if (config.layers)
    for (const auto &l : *config.layers)
      if (!is_valid_layer_id(l)) config_error("invalid layer id '" + l + "'");
  const auto wants = [&](Measure m) {
    return std::find(config.measures.begin(), config.measures.end(), m) != config.measures.end();
  };
  if (wants(Measure::kCtc)) {
    for (const auto &model : config.models) {
      auto it = config.ctc_head_map.find(model);
      if (it == config.ctc_head_map.end())
        config_error("measure ctc requested but no CTC head mapped for model '" + model + "'");
      if (!fs::is_regular_file(it->second / "ctc_head.json"))
        config_error("CTC head for model '" + model + "' not found at " + it->second.string());
    }
  }
  if (wants(Measure::kProbe) && (config.probe_dir.empty() || !fs::is_directory(config.probe_dir)))
    config_error("measure probe requested but probe_dir is missing");
}

void sort_curves(std::vector<ModelCurve> &curves) {
  std::sort(curves.begin(), curves.end(), curve_less);
}

AnalysisResults run_analysis(const RunConfig &config) {
  check_run_config(config);
  const auto wants = [&](Measure m) {
    return std::find(config.measures.begin(), config.measures.end(), m) != config.measures.end();
  };

  AnalysisResults results;
  for (const std::string &model : config.models) {
    // Load every stimulus of this model; failures stay local to their row.
    const std::vector<fs::path> dirs = stimulus_dirs(config.archive_root / model);
    std::vector<std::optional<StimulusArchive>> loaded(dirs.size());
    std::vector<std::optional<ErrorRow>> load_errors(dirs.size());
#pragma omp parallel for schedule(dynamic)
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(dirs.size()); ++i) {
      const auto k = static_cast<std::size_t>(i);
      try {
        loaded[k] = read_archive(dirs[k]);
      } catch (const Error &e) {
        load_errors[k] = error_row(model, dirs[k].filename().string(), e);
      } catch (const std::exception &e) {
        load_errors[k] = ErrorRow{model, dirs[k].filename().string(), "IoFailure", e.what()};
      }
    }
    for (auto &e : load_errors)
      if (e) results.errors.push_back(std::move(*e));

    std::optional<CtcHead> head;
    if (wants(Measure::kCtc)) {
      const fs::path head_dir = config.ctc_head_map.at(model);
      try {
        head = read_ctc_head(head_dir);
      } catch (const Error &e) {
        results.errors.push_back(error_row(model, head_dir.string(), e));
      }
    }

    std::map<std::pair<std::string, std::string>, std::vector<const StimulusArchive *>> groups;
    std::set<std::string> found_layers;
    for (const auto &a : loaded) {
      if (!a) continue;
      groups[{a->meta.pair, a->meta.voice}].push_back(&*a);
      for (const auto &l : a->layers) found_layers.insert(l.layer_id);
    }
    std::vector<Continuum> continua;
    for (const auto &[key, members] : groups) {
      try {
        continua.push_back(order_continuum(std::span<const StimulusArchive *const>(members)));
      } catch (const Error &e) {
        results.errors.push_back(error_row(model, key.first + "/" + key.second, e));
      }
    }

    std::vector<std::string> layers;
    if (config.layers) {
      layers = *config.layers;
    } else {
      layers.assign(found_layers.begin(), found_layers.end());
      std::sort(layers.begin(), layers.end(), [](const std::string &a, const std::string &b) {
        return layer_rank(a) < layer_rank(b);
      });
    }

    std::map<std::string, ProbeModel> probes;
    if (wants(Measure::kProbe)) {
      for (const auto &layer : layers) {
        const auto file = find_probe(config, model, layer);
        if (!file) {
          results.errors.push_back({model, "probe_" + layer, "MissingManifest",
                                    "no probe for layer " + layer + " under " +
                                        config.probe_dir.string()});
          continue;
        }
        try {
          probes.emplace(layer, read_probe(*file));
        } catch (const Error &e) {
          results.errors.push_back(error_row(model, file->filename().string(), e));
        }
      }
    }

    std::vector<Task> tasks;
    for (std::size_t c = 0; c < continua.size(); ++c) {
      for (const auto &layer : layers) {
        for (Measure m : config.measures) {
          if (m == Measure::kProbe && !probes.count(layer)) continue;
          if (m == Measure::kCtc) {
            if (!head) continue;
            // The head only reads layers of its own width (not the CNN output).
            const LayerActivations *l = continua[c].front()->find_layer(layer);
            if (l && l->dim != head->dim) continue;
          }
          tasks.push_back({c, layer, m});
        }
      }
    }

    std::vector<std::optional<PreferenceCurve>> curves(tasks.size());
    std::vector<std::optional<ErrorRow>> task_errors(tasks.size());
#pragma omp parallel for schedule(dynamic)
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(tasks.size()); ++i) {
      const auto k = static_cast<std::size_t>(i);
      const Task &t = tasks[k];
      const Continuum &cont = continua[t.continuum];
      const std::string item = cont.front()->meta.pair + "/" + cont.front()->meta.voice + "/" +
                               t.layer_id + "/" + std::string(measure_name(t.measure));
      try {
        switch (t.measure) {
          case Measure::kSim: curves[k] = similarity_curve(cont, t.layer_id); break;
          case Measure::kProbe: curves[k] = probe_curve(cont, t.layer_id, probes.at(t.layer_id)); break;
          case Measure::kCtc: curves[k] = lens_curve(cont, t.layer_id, *head); break;
        }
      } catch (const Error &e) {
        task_errors[k] = error_row(model, item, e);
      } catch (const std::exception &e) {
        task_errors[k] = ErrorRow{model, item, "IoFailure", e.what()};
      }
    }

    std::map<std::tuple<std::string, int, std::string, std::string>, std::vector<PreferenceCurve>>
        by_key;
    for (std::size_t k = 0; k < tasks.size(); ++k) {
      if (task_errors[k]) results.errors.push_back(std::move(*task_errors[k]));
      if (!curves[k]) continue;
      const PreferenceCurve &c = *curves[k];
      by_key[{c.pair, layer_rank(c.layer_id), c.layer_id, std::string(measure_name(c.measure))}]
          .push_back(c);
      results.curves.push_back({model, std::move(*curves[k])});
    }
    for (auto &[key, voices] : by_key) {
      std::sort(voices.begin(), voices.end(),
                [](const auto &a, const auto &b) { return a.voice < b.voice; });
      results.curves.push_back({model, voice_average(voices)});
    }
  }

  sort_curves(results.curves);
  std::sort(results.errors.begin(), results.errors.end(), [](const ErrorRow &a, const ErrorRow &b) {
    return std::tie(a.model_id, a.item, a.kind, a.message) <
           std::tie(b.model_id, b.item, b.kind, b.message);
  });
  derive_metrics(results);
  return results;
}

void derive_metrics(AnalysisResults &results) {
  results.crossings.clear();
  results.sensitivity.clear();
  results.summary.clear();

  std::map<std::tuple<std::string, std::string, int, std::string, std::string, std::string>,
           const PreferenceCurve *>
      index;
  for (const auto &mc : results.curves) {
    const PreferenceCurve &c = mc.curve;
    results.crossings.push_back(
        {mc.model_id, c.pair, c.voice, c.layer_id, c.measure, crossing_point(c)});
    index[{mc.model_id, c.voice, layer_rank(c.layer_id), c.layer_id,
           std::string(measure_name(c.measure)), c.pair}] = &c;
  }

  std::map<std::string, std::vector<SensitivityCurve>> averaged;
  for (const auto &[key, curve] : index) {
    if (std::get<5>(key) != kContextR) continue;
    auto other = key;
    std::get<5>(other) = kContextL;
    auto it = index.find(other);
    if (it == index.end()) continue;
    SensitivityCurve sens = sensitivity_curve(*curve, *it->second);
    const std::string &model = std::get<0>(key);
    if (sens.voice == "avg") averaged[model].push_back(sens);
    results.sensitivity.push_back({model, std::move(sens)});
  }
  for (const auto &[model, curves] : averaged) {
    auto rows = summarize_layers(model, curves);
    results.summary.insert(results.summary.end(), rows.begin(), rows.end());
  }
}

std::vector<Table> to_tables(const AnalysisResults &results) {
  Table prefs{"preferences",
              {"model", "pair", "voice", "layer", "measure", "step", "pref_r", "pref_l",
               "normalized", "choice", "degenerate"},
              {}};
  for (const auto &mc : results.curves) {
    const PreferenceCurve &c = mc.curve;
    for (std::size_t k = 0; k < kNumSteps; ++k)
      prefs.rows.push_back({mc.model_id, c.pair, c.voice, c.layer_id,
                            std::string(measure_name(c.measure)), std::to_string(k),
                            format_real(c.pref_r[k]), format_real(c.pref_l[k]),
                            format_real(c.normalized[k]),
                            std::string(1, choice_char(forced_choice(c.pref_r[k], c.pref_l[k]))),
                            c.degenerate[k] ? "1" : "0"});
  }

  Table crossings{"crossings",
                  {"model", "pair", "voice", "layer", "measure", "crossing_step", "reversals"},
                  {}};
  for (const auto &r : results.crossings)
    crossings.rows.push_back({r.model_id, r.pair, r.voice, r.layer_id,
                              std::string(measure_name(r.measure)),
                              r.crossing.step ? std::to_string(*r.crossing.step) : "",
                              std::to_string(r.crossing.reversals)});

  Table sens{"sensitivity",
             {"model", "voice", "layer", "measure", "context_a", "context_b", "step", "delta"},
             {}};
  for (const auto &r : results.sensitivity)
    for (std::size_t k = 0; k < kNumSteps; ++k)
      sens.rows.push_back({r.model_id, r.curve.voice, r.curve.layer_id,
                           std::string(measure_name(r.curve.measure)), r.curve.context_a,
                           r.curve.context_b, std::to_string(k), format_real(r.curve.delta[k])});

  Table summary{"layer_summary", {"model", "measure", "layer", "peak", "argmax_step"}, {}};
  for (const auto &r : results.summary)
    summary.rows.push_back({r.model_id, std::string(measure_name(r.measure)), r.layer_id,
                            format_real(r.peak), std::to_string(r.step)});

  Table errors{"errors", {"model", "item", "kind", "message"}, {}};
  for (const auto &e : results.errors) errors.rows.push_back({e.model_id, e.item, e.kind, e.message});

  return {prefs, crossings, sens, summary, errors};
}

std::vector<ModelCurve> curves_from_preferences(const Table &t) {
  const std::size_t c_model = t.column("model"), c_pair = t.column("pair"),
                    c_voice = t.column("voice"), c_layer = t.column("layer"),
                    c_measure = t.column("measure"), c_step = t.column("step"),
                    c_r = t.column("pref_r"), c_l = t.column("pref_l"),
                    c_norm = t.column("normalized"), c_deg = t.column("degenerate");
  std::map<std::tuple<std::string, std::string, std::string, std::string, std::string>,
           std::size_t>
      slots;
  std::vector<ModelCurve> curves;
  std::vector<std::array<bool, kNumSteps>> seen;
  for (const auto &row : t.rows) {
    auto key = std::make_tuple(row[c_model], row[c_pair], row[c_voice], row[c_layer], row[c_measure]);
    auto [it, inserted] = slots.emplace(key, curves.size());
    if (inserted) {
      ModelCurve mc;
      mc.model_id = row[c_model];
      mc.curve.pair = row[c_pair];
      mc.curve.voice = row[c_voice];
      mc.curve.layer_id = row[c_layer];
      try {
        mc.curve.measure = parse_measure(row[c_measure]);
      } catch (const Error &) {
        throw Error(ErrorKind::kMalformedManifest, "unknown measure '" + row[c_measure] + "'");
      }
      curves.push_back(std::move(mc));
      seen.push_back({});
    }
    int step = -1;
    try {
      step = std::stoi(row[c_step]);
    } catch (const std::exception &) {
    }
    if (step < 0 || step > kLastStep)
      throw Error(ErrorKind::kMalformedManifest, "bad step '" + row[c_step] + "'");
    const auto k = static_cast<std::size_t>(step);
    PreferenceCurve &c = curves[it->second].curve;
    try {
      c.pref_r[k] = std::stod(row[c_r]);
      c.pref_l[k] = std::stod(row[c_l]);
      c.normalized[k] = std::stod(row[c_norm]);
    } catch (const std::exception &) {
      throw Error(ErrorKind::kMalformedManifest, "non-numeric preference value");
    }
    c.degenerate[k] = row[c_deg] == "1";
    seen[it->second][k] = true;
  }
  for (std::size_t i = 0; i < curves.size(); ++i)
    for (bool s : seen[i])
      if (!s)
        throw Error(ErrorKind::kMalformedManifest,
                    "curve " + curves[i].model_id + "/" + curves[i].curve.pair + "/" +
                        curves[i].curve.voice + "/" + curves[i].curve.layer_id +
                        " is missing steps");
  return curves;
}

void emit_csv(const std::vector<Table> &tables, const fs::path &output_dir) {
  for (const auto &t : tables) write_csv(t, output_dir);
}

}  // namespace phonoprobe
