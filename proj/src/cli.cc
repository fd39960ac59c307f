// src/cli.cc

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

#include "phonoprobe/cli.h"

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "phonoprobe/archive.h"
#include "phonoprobe/error.h"
#include "phonoprobe/fixture.h"
#include "phonoprobe/probe.h"
#include "phonoprobe/report.h"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace phonoprobe {

namespace fs = std::filesystem;

namespace {

std::vector<std::string> split_list(const std::string &s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

int cmd_validate(const fs::path &root, std::ostream &out, std::ostream &err) {
  if (!fs::is_directory(root)) {
    err << "error: archive root " << root << " is not a directory\n";
    return kExitConfig;
  }
  std::vector<fs::path> dirs{root};
  for (const auto &e : fs::recursive_directory_iterator(root))
    if (e.is_directory()) dirs.push_back(e.path());
  std::sort(dirs.begin(), dirs.end());

  int checked = 0, failed = 0;
  auto check = [&](const fs::path &what, auto &&load) {
    ++checked;
    try {
      load();
      out << "OK   " << what.string() << '\n';
    } catch (const Error &e) {
      ++failed;
      out << "FAIL " << what.string() << ": " << e.what() << '\n';
    }
  };
  for (const fs::path &dir : dirs) {
    bool any = false;
    if (fs::exists(dir / "manifest.json")) {
      any = true;
      check(dir, [&] { read_archive(dir); });
    }
    if (fs::exists(dir / "ctc_head.json")) {
      any = true;
      check(dir / "ctc_head.json", [&] { read_ctc_head(dir); });
    }
    if (fs::exists(dir / "dataset.json")) {
      any = true;
      check(dir / "dataset.json", [&] { read_dataset(dir); });
    }
    const bool leaf = std::none_of(fs::directory_iterator(dir), fs::directory_iterator(),
                                   [](const auto &e) { return e.is_directory(); });
    if (!any && leaf && dir != root) check(dir, [&] { read_archive(dir); });
  }
  out << checked << " checked, " << failed << " failed\n";
  if (checked == 0) {
    err << "error: nothing to validate under " << root << '\n';
    return kExitConfig;
  }
  return failed ? kExitPartial : kExitOk;
}

struct ProbeTrainArgs {
  std::string train, test, layers = "all", out_dir;
  ProbeConfig config;
  bool no_standardize = false;
};

int cmd_probe_train(const ProbeTrainArgs &args, std::ostream &out, std::ostream &err) {
  const LabeledDataset train = read_dataset(args.train);
  std::optional<LabeledDataset> test;
  if (!args.test.empty()) test = read_dataset(args.test);

  std::vector<std::string> layers;
  if (args.layers == "all") {
    for (const auto &m : train.layers) layers.push_back(m.layer_id);
    std::sort(layers.begin(), layers.end(),
              [](const auto &a, const auto &b) { return layer_rank(a) < layer_rank(b); });
  } else {
    layers = split_list(args.layers);
  }
  if (layers.empty()) throw Error(ErrorKind::kConfigError, "no layers selected");
  for (const auto &l : layers) {
    train.layer_set(l);
    if (test) test->layer_set(l);
  }

  ProbeConfig config = args.config;
  config.standardize = !args.no_standardize;

  struct Outcome {
    std::optional<ProbeModel> model;
    double train_acc = 0.0, test_acc = -1.0;
    std::string error;
  };
  std::vector<Outcome> outcomes(layers.size());
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(layers.size()); ++i) {
    const auto k = static_cast<std::size_t>(i);
    try {
      const LabeledVectorSet set = train.layer_set(layers[k]);
      ProbeModel model = train_probe(set, config, layers[k]);
      outcomes[k].train_acc = evaluate_probe(model, set);
      if (test) outcomes[k].test_acc = evaluate_probe(model, test->layer_set(layers[k]));
      outcomes[k].model = std::move(model);
    } catch (const std::exception &e) {
      outcomes[k].error = e.what();
    }
  }

  const fs::path out_dir(args.out_dir);
  Table summary{"probe_summary",
                {"layer", "n_train", "train_accuracy", "test_accuracy", "final_loss", "iterations",
                 "converged"},
                {}};
  int failed = 0;
  for (std::size_t k = 0; k < layers.size(); ++k) {
    const Outcome &o = outcomes[k];
    if (!o.model) {
      ++failed;
      err << "error: layer " << layers[k] << ": " << o.error << '\n';
      continue;
    }
    const ProbeTrainMeta &m = o.model->train_meta;
    write_probe(*o.model, out_dir / probe_file_name(layers[k]));
    if (!m.converged)
      err << "warning: layer " << layers[k] << " did not converge (|grad|_inf = "
          << format_real(m.grad_norm) << " after " << m.iterations << " iterations)\n";
    summary.rows.push_back({layers[k], std::to_string(m.n_train), format_real(o.train_acc),
                            o.test_acc < 0 ? "" : format_real(o.test_acc),
                            format_real(m.final_loss), std::to_string(m.iterations),
                            m.converged ? "1" : "0"});
    out << layers[k] << ": train " << format_real(o.train_acc);
    if (o.test_acc >= 0) out << ", test " << format_real(o.test_acc);
    out << '\n';
  }
  write_csv(summary, out_dir);
  return failed ? kExitPartial : kExitOk;
}

struct AnalyzeArgs {
  std::string config;
  std::string output_dir;
  std::string measures;
  std::string layers;
};

int cmd_analyze(const AnalyzeArgs &args, std::ostream &out, std::ostream &err) {
  RunConfig config = load_run_config(args.config);
  if (!args.output_dir.empty()) config.output_dir = args.output_dir;
  if (!args.measures.empty()) {
    config.measures.clear();
    for (const auto &m : split_list(args.measures)) config.measures.push_back(parse_measure(m));
  }
  if (!args.layers.empty()) {
    if (args.layers == "all")
      config.layers.reset();
    else
      config.layers = split_list(args.layers);
  }
  const AnalysisResults results = run_analysis(config);
  emit_csv(to_tables(results), config.output_dir);
  out << results.curves.size() << " preference curves, " << results.errors.size()
      << " errors -> " << config.output_dir.string() << '\n';
  for (const auto &e : results.errors)
    err << "error: " << e.model_id << " " << e.item << ": " << e.message << '\n';
  return results.errors.empty() ? kExitOk : kExitPartial;
}

AnalysisResults load_results(const fs::path &dir) {
  AnalysisResults results;
  results.curves = curves_from_preferences(read_csv(dir / "preferences.csv"));
  sort_curves(results.curves);
  derive_metrics(results);
  return results;
}

int cmd_metrics(const fs::path &dir, std::ostream &out) {
  const AnalysisResults results = load_results(dir);
  for (const auto &t : to_tables(results))
    if (t.name != "preferences" && t.name != "errors") write_csv(t, dir);
  out << results.crossings.size() << " crossing rows, " << results.sensitivity.size()
      << " sensitivity curves, " << results.summary.size() << " layer peaks\n";
  return kExitOk;
}

int cmd_report(const fs::path &dir, const std::string &svg_dir, bool svg, std::ostream &out) {
  const AnalysisResults results = load_results(dir);
  for (const auto &r : results.crossings) {
    if (r.voice != "avg") continue;
    out << r.model_id << ' ' << r.pair << ' ' << r.layer_id << ' ' << measure_name(r.measure)
        << ": crossing " << (r.crossing.step ? std::to_string(*r.crossing.step) : "none")
        << ", reversals " << r.crossing.reversals << '\n';
  }
  for (const auto &r : results.summary)
    out << r.model_id << ' ' << measure_name(r.measure) << ' ' << r.layer_id << ": peak "
        << format_real(r.peak) << " at step " << r.step << '\n';
  if (svg) {
    const auto files = emit_plots(results, svg_dir.empty() ? dir : fs::path(svg_dir));
    out << files.size() << " SVG files written\n";
  }
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
  CLI::App app{"Phonetic categorization analyses on exported speech-model hidden states",
               "phonoprobe"};
  app.require_subcommand(1);
  int threads = 0;
  app.add_option("--threads", threads, "OpenMP worker threads (0: runtime default)");

  std::string archive_root;
  auto *validate = app.add_subcommand("validate", "Check archives, CTC heads and datasets");
  validate->add_option("--archive-root", archive_root, "Root directory to scan")->required();

  ProbeTrainArgs probe_args;
  auto *probe = app.add_subcommand("probe-train", "Train per-layer logistic-regression probes");
  probe->add_option("--train", probe_args.train, "Training dataset.json")->required();
  probe->add_option("--test", probe_args.test, "Held-out dataset.json");
  probe->add_option("--layers", probe_args.layers, "\"all\" or comma-separated layer ids");
  probe->add_option("--l2", probe_args.config.l2_lambda, "L2 strength (lambda)")->check(CLI::NonNegativeNumber);
  probe->add_option("--max-iters", probe_args.config.max_iters, "Iteration cap")->check(CLI::PositiveNumber);
  probe->add_option("--grad-tol", probe_args.config.grad_tol, "Gradient infinity-norm tolerance")
      ->check(CLI::PositiveNumber);
  probe->add_flag("--no-standardize", probe_args.no_standardize, "Skip feature z-scoring");
  probe->add_option("--out", probe_args.out_dir, "Output directory for probe_<layer>.json")->required();

  AnalyzeArgs analyze_args;
  auto *analyze = app.add_subcommand("analyze", "Compute preference curves and metric tables");
  analyze->add_option("--config", analyze_args.config, "run.json")->required();
  analyze->add_option("--output-dir", analyze_args.output_dir, "Override output_dir");
  analyze->add_option("--measures", analyze_args.measures, "Override measures, e.g. sim,ctc");
  analyze->add_option("--layers", analyze_args.layers, "Override layers (\"all\" or list)");

  std::string results_dir;
  auto *metrics = app.add_subcommand("metrics", "Recompute metric tables from preferences.csv");
  metrics->add_option("--results", results_dir, "Results directory")->required();

  std::string report_dir, svg_dir;
  bool svg = false;
  auto *report = app.add_subcommand("report", "Summarize results and render figures");
  report->add_option("--results", report_dir, "Results directory")->required();
  report->add_flag("--svg", svg, "Write SVG figures");
  report->add_option("--svg-dir", svg_dir, "SVG output directory (default: results dir)");

  std::string fixture_dir;
  FixtureOptions fixture;
  auto *make_fixture = app.add_subcommand("make-fixture", "Write a synthetic fixture set");
  make_fixture->add_option("--out", fixture_dir, "Output directory")->required();
  make_fixture->add_option("--model", fixture.model_id, "Model id");
  make_fixture->add_option("--transformer-layers", fixture.num_transformer_layers, "Transformer blocks")
      ->check(CLI::Range(1, 24));
  make_fixture->add_option("--seed", fixture.seed, "Noise seed");

  std::vector<std::string> argv_tail(args.rbegin(), args.rend());
  if (!argv_tail.empty()) argv_tail.pop_back();  // program name
  try {
    app.parse(argv_tail);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

#ifdef _OPENMP
  if (threads > 0) omp_set_num_threads(threads);
#endif

  try {
    if (*validate) return cmd_validate(archive_root, out, err);
    if (*probe) return cmd_probe_train(probe_args, out, err);
    if (*analyze) return cmd_analyze(analyze_args, out, err);
    if (*metrics) return cmd_metrics(results_dir, out);
    if (*report) return cmd_report(report_dir, svg_dir, svg, out);
    if (*make_fixture) {
      write_fixture(fixture, fixture_dir);
      out << "fixture written to " << fixture_dir << '\n';
      return kExitOk;
    }
  } catch (const Error &e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception &e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  }
  return kExitConfig;
}

}  // namespace phonoprobe
