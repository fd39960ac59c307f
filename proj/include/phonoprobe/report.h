// include/phonoprobe/report.h

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

// Batch driver: loads archives for every configured model, computes all
// preference curves, derives crossing points, phonotactic sensitivity and
// layer peaks, and renders the result tables as CSV and SVG.

#ifndef PHONOPROBE_REPORT_H_
#define PHONOPROBE_REPORT_H_

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "phonoprobe/csv.h"
#include "phonoprobe/metrics.h"
#include "phonoprobe/similarity.h"

namespace phonoprobe {

struct RunConfig {
  std::filesystem::path archive_root;  // <root>/<model_id>/<stimulus>/manifest.json
  std::vector<std::string> models;
  std::vector<Measure> measures{Measure::kSim};
  std::optional<std::vector<std::string>> layers;  // nullopt: all layers found
  std::map<std::string, std::filesystem::path> ctc_head_map;
  std::filesystem::path probe_dir;  // <dir>/<model_id>/probe_<layer>.json or <dir>/probe_<layer>.json
  std::filesystem::path output_dir;
};

/// Reads a run.json; relative paths resolve against the file's directory.
/// Throws ConfigError.
RunConfig load_run_config(const std::filesystem::path &file);
/// Throws ConfigError if a requested measure lacks its prerequisites.
void check_run_config(const RunConfig &config);

struct ModelCurve {
  std::string model_id;
  PreferenceCurve curve;
};

struct CrossingRow {
  std::string model_id;
  std::string pair;
  std::string voice;
  std::string layer_id;
  Measure measure = Measure::kSim;
  CrossingReport crossing;
};

struct SensitivityRow {
  std::string model_id;
  SensitivityCurve curve;
};

struct ErrorRow {
  std::string model_id;
  std::string item;
  std::string kind;
  std::string message;
};

struct AnalysisResults {
  std::vector<ModelCurve> curves;  // per-voice and "avg", sorted
  std::vector<CrossingRow> crossings;
  std::vector<SensitivityRow> sensitivity;
  std::vector<LayerSummary> summary;  // voice-averaged sensitivity peaks
  std::vector<ErrorRow> errors;
};

/// Runs the whole pipeline. Per-stimulus and per-continuum failures land in
/// `errors`; configuration problems throw ConfigError before any work.
AnalysisResults run_analysis(const RunConfig &config);

/// Fills crossings, sensitivity and summary from `curves`, which must
/// already hold every voice (including "avg") to be reported.
void derive_metrics(AnalysisResults &results);

/// Sorts curves by (model, pair, voice, layer rank, measure).
void sort_curves(std::vector<ModelCurve> &curves);

std::vector<Table> to_tables(const AnalysisResults &results);
/// Rebuilds curves from a preferences table (as written by to_tables).
std::vector<ModelCurve> curves_from_preferences(const Table &preferences);

/// One CSV per table in `output_dir`.
void emit_csv(const std::vector<Table> &tables, const std::filesystem::path &output_dir);

/// Writes SVG figures; returns the files written (empty results: none).
std::vector<std::filesystem::path> emit_plots(const AnalysisResults &results,
                                              const std::filesystem::path &output_dir);

}  // namespace phonoprobe

#endif  // PHONOPROBE_REPORT_H_
