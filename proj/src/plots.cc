// src/plots.cc

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

// SVG rendering of the result tables. Output depends only on the tables:
// no timestamps, fixed number formatting, deterministic element order.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "phonoprobe/archive.h"
#include "phonoprobe/error.h"
#include "phonoprobe/report.h"

namespace phonoprobe {

namespace fs = std::filesystem;

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  // Avoid "-0.00" flipping with rounding noise.
  return std::string(buf) == "-0.00" ? "0.00" : buf;
}

std::string escape(const std::string &s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string file_safe(const std::string &s) {
  std::string out = s;
  for (char &c : out)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '-' && c != '.') c = '_';
  return out;
}

const char *measure_color(Measure m) {
  switch (m) {
    case Measure::kSim: return "#1f77b4";
    case Measure::kProbe: return "#2ca02c";
    case Measure::kCtc: return "#d62728";
  }
  return "#000000";
}

class Svg {
 public:
  Svg(double width, double height) : width_(width), height_(height) {}

  void line(double x1, double y1, double x2, double y2, const std::string &style) {
    body_ << "<line x1=\"" << num(x1) << "\" y1=\"" << num(y1) << "\" x2=\"" << num(x2)
          << "\" y2=\"" << num(y2) << "\" " << style << "/>\n";
  }
  void polyline(const std::vector<std::pair<double, double>> &pts, const std::string &style) {
    body_ << "<polyline fill=\"none\" " << style << " points=\"";
    for (std::size_t i = 0; i < pts.size(); ++i)
      body_ << (i ? " " : "") << num(pts[i].first) << "," << num(pts[i].second);
    body_ << "\"/>\n";
  }
  void circle(double cx, double cy, double r, const std::string &attrs) {
    body_ << "<circle cx=\"" << num(cx) << "\" cy=\"" << num(cy) << "\" r=\"" << num(r)
          << "\" " << attrs << "/>\n";
  }
  void text(double x, double y, const std::string &s, const std::string &attrs = "") {
    body_ << "<text x=\"" << num(x) << "\" y=\"" << num(y) << "\" " << attrs << ">"
          << escape(s) << "</text>\n";
  }
  void rect(double x, double y, double w, double h, const std::string &style) {
    body_ << "<rect x=\"" << num(x) << "\" y=\"" << num(y) << "\" width=\"" << num(w)
          << "\" height=\"" << num(h) << "\" " << style << "/>\n";
  }

  void write(const fs::path &file) const {
    std::ofstream out(file, std::ios::binary);
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(width_) << "\" height=\""
        << num(height_) << "\" viewBox=\"0 0 " << num(width_) << " " << num(height_)
        << "\" font-family=\"sans-serif\" font-size=\"11\">\n"
        << "<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n"
        << body_.str() << "</svg>\n";
    if (!out) throw Error(ErrorKind::kIoFailure, "cannot write " + file.string());
  }

 private:
  double width_, height_;
  std::ostringstream body_;
};

// Plot area mapping steps 0..10 and a value range onto pixels.
struct Frame {
  double left, top, width, height, ymin, ymax;

  double x(double step) const { return left + width * step / kLastStep; }
  double y(double v) const { return top + height * (ymax - v) / (ymax - ymin); }
};

void step_axes(Svg &svg, const Frame &f, bool labels) {
  svg.rect(f.left, f.top, f.width, f.height, "fill=\"none\" stroke=\"#999999\"");
  for (int s = 0; s <= kLastStep; ++s) {
    svg.line(f.x(s), f.top + f.height, f.x(s), f.top + f.height + 3, "stroke=\"#999999\"");
    if (labels)
      svg.text(f.x(s), f.top + f.height + 14, std::to_string(s), "text-anchor=\"middle\"");
  }
}

double symmetric_limit(double magnitude) {
  return std::max(0.1, std::ceil(magnitude * 10.0 - 1e-9) / 10.0);
}

// Preference curves per continuum at the model's deepest layer.
void plot_continua(const AnalysisResults &results, const fs::path &dir,
                   std::vector<fs::path> &written) {
  std::map<std::string, int> deepest;
  for (const auto &mc : results.curves) {
    int &d = deepest.try_emplace(mc.model_id, -1).first->second;
    d = std::max(d, layer_rank(mc.curve.layer_id));
  }
  std::map<std::tuple<std::string, std::string, std::string>, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < results.curves.size(); ++i) {
    const auto &mc = results.curves[i];
    if (layer_rank(mc.curve.layer_id) == deepest[mc.model_id])
      groups[{mc.model_id, mc.curve.pair, mc.curve.voice}].push_back(i);
  }

  std::map<std::tuple<std::string, std::string, std::string, std::string, Measure>,
           const CrossingRow *>
      crossings;
  for (const auto &r : results.crossings)
    crossings[{r.model_id, r.pair, r.voice, r.layer_id, r.measure}] = &r;

  for (const auto &[key, members] : groups) {
    const auto &[model, pair, voice] = key;
    Svg svg(520, 340);
    const Frame f{60, 40, 400, 240, 0.0, 1.0};
    const std::string layer = results.curves[members.front()].curve.layer_id;
    svg.text(260, 22, model + "  " + pair + "  voice " + voice + "  layer " + layer,
             "text-anchor=\"middle\" font-size=\"13\"");
    step_axes(svg, f, true);
    for (double v : {0.0, 0.5, 1.0}) {
      svg.line(f.left - 3, f.y(v), f.left, f.y(v), "stroke=\"#999999\"");
      svg.text(f.left - 6, f.y(v) + 4, num(v), "text-anchor=\"end\"");
    }
    svg.text(f.left + f.width / 2, f.top + f.height + 30, "continuum step", "text-anchor=\"middle\"");

    double legend_y = f.top + 8;
    for (std::size_t idx : members) {
      const PreferenceCurve &c = results.curves[idx].curve;
      const std::string color = measure_color(c.measure);
      std::vector<std::pair<double, double>> r_pts, l_pts;
      for (int s = 0; s <= kLastStep; ++s) {
        r_pts.emplace_back(f.x(s), f.y(c.pref_r[static_cast<std::size_t>(s)]));
        l_pts.emplace_back(f.x(s), f.y(c.pref_l[static_cast<std::size_t>(s)]));
      }
      const std::string m(measure_name(c.measure));
      svg.polyline(r_pts, "class=\"pref-r\" data-measure=\"" + m + "\" stroke=\"" + color +
                              "\" stroke-width=\"2\"");
      svg.polyline(l_pts, "class=\"pref-l\" data-measure=\"" + m + "\" stroke=\"" + color +
                              "\" stroke-width=\"2\" stroke-dasharray=\"5,3\"");
      auto it = crossings.find({model, pair, voice, c.layer_id, c.measure});
      if (it != crossings.end() && it->second->crossing.step) {
        const int s = *it->second->crossing.step;
        svg.circle(f.x(s), f.y(c.pref_r[static_cast<std::size_t>(s)]), 5,
                   "class=\"crossing\" data-measure=\"" + m + "\" data-step=\"" +
                       std::to_string(s) + "\" fill=\"none\" stroke=\"#000000\" stroke-width=\"2\"");
      }
      svg.line(f.left + f.width + 8, legend_y, f.left + f.width + 24, legend_y,
               "stroke=\"" + color + "\" stroke-width=\"2\"");
      svg.text(f.left + f.width + 28, legend_y + 4, m);
      legend_y += 16;
    }
    const fs::path file =
        dir / ("curves_" + file_safe(model) + "_" + file_safe(pair) + "_" + file_safe(voice) + ".svg");
    svg.write(file);
    written.push_back(file);
  }
}

// Small multiples of the voice-averaged sensitivity per layer.
void plot_sensitivity(const AnalysisResults &results, const fs::path &dir,
                      std::vector<fs::path> &written) {
  std::map<std::pair<std::string, std::string>, std::vector<const SensitivityCurve *>> groups;
  for (const auto &r : results.sensitivity)
    if (r.curve.voice == "avg")
      groups[{r.model_id, std::string(measure_name(r.curve.measure))}].push_back(&r.curve);

  for (auto &[key, curves] : groups) {
    std::stable_sort(curves.begin(), curves.end(), [](const auto *a, const auto *b) {
      return layer_rank(a->layer_id) < layer_rank(b->layer_id);
    });
    double magnitude = 0.0;
    for (const auto *c : curves)
      for (double d : c->delta) magnitude = std::max(magnitude, std::abs(d));
    const double lim = symmetric_limit(magnitude);

    const std::size_t cols = std::min<std::size_t>(5, curves.size());
    const std::size_t rows = (curves.size() + cols - 1) / cols;
    const double pw = 150, ph = 110, gap = 30;
    Svg svg(40 + cols * (pw + gap), 50 + rows * (ph + gap));
    svg.text(20, 22, key.first + "  " + key.second + "  " + curves.front()->context_a + " minus " +
                         curves.front()->context_b + " (voice avg)",
             "font-size=\"13\"");
    for (std::size_t i = 0; i < curves.size(); ++i) {
      const SensitivityCurve &c = *curves[i];
      const Frame f{40 + static_cast<double>(i % cols) * (pw + gap),
                    40 + static_cast<double>(i / cols) * (ph + gap), pw, ph, -lim, lim};
      step_axes(svg, f, false);
      svg.line(f.left, f.y(0), f.left + f.width, f.y(0), "stroke=\"#cccccc\"");
      svg.text(f.left + 4, f.top + 12, c.layer_id);
      svg.text(f.left - 3, f.top + 4, num(lim), "text-anchor=\"end\" font-size=\"9\"");
      svg.text(f.left - 3, f.top + f.height + 3, num(-lim), "text-anchor=\"end\" font-size=\"9\"");
      std::vector<std::pair<double, double>> pts;
      for (int s = 0; s <= kLastStep; ++s) pts.emplace_back(f.x(s), f.y(c.delta[static_cast<std::size_t>(s)]));
      svg.polyline(pts, "class=\"delta\" data-layer=\"" + c.layer_id + "\" stroke=\"" +
                            measure_color(c.measure) + "\" stroke-width=\"1.5\"");
      const PeakSensitivity p = peak_sensitivity(c);
      svg.circle(f.x(p.step), f.y(p.peak), 3,
                 "class=\"peak\" data-step=\"" + std::to_string(p.step) + "\" fill=\"#000000\"");
    }
    const fs::path file =
        dir / ("sensitivity_" + file_safe(key.first) + "_" + file_safe(key.second) + ".svg");
    svg.write(file);
    written.push_back(file);
  }
}

// Peak sensitivity per layer, one series per measure.
void plot_peaks(const AnalysisResults &results, const fs::path &dir,
                std::vector<fs::path> &written) {
  std::map<std::string, std::vector<const LayerSummary *>> by_model;
  for (const auto &r : results.summary) by_model[r.model_id].push_back(&r);

  for (const auto &[model, rows] : by_model) {
    std::vector<std::string> layers;
    for (const auto *r : rows)
      if (std::find(layers.begin(), layers.end(), r->layer_id) == layers.end())
        layers.push_back(r->layer_id);
    std::sort(layers.begin(), layers.end(),
              [](const auto &a, const auto &b) { return layer_rank(a) < layer_rank(b); });
    double lo = 0.0, hi = 0.0;
    for (const auto *r : rows) {
      lo = std::min(lo, r->peak);
      hi = std::max(hi, r->peak);
    }
    const double ymax = symmetric_limit(hi);
    const double ymin = lo < 0.0 ? -symmetric_limit(-lo) : 0.0;

    const double left = 60, top = 40, width = std::max(200.0, 30.0 * static_cast<double>(layers.size())),
                 height = 220;
    Svg svg(left + width + 100, top + height + 50);
    svg.text(left, 22, model + "  peak sensitivity over steps 1-9 (voice avg)", "font-size=\"13\"");
    svg.rect(left, top, width, height, "fill=\"none\" stroke=\"#999999\"");
    auto px = [&](std::size_t i) {
      return left + width * (static_cast<double>(i) + 0.5) / static_cast<double>(layers.size());
    };
    auto py = [&](double v) { return top + height * (ymax - v) / (ymax - ymin); };
    for (std::size_t i = 0; i < layers.size(); ++i)
      svg.text(px(i), top + height + 14, layers[i], "text-anchor=\"middle\" font-size=\"9\"");
    for (double v : {ymin, 0.0, ymax}) {
      svg.line(left - 3, py(v), left, py(v), "stroke=\"#999999\"");
      svg.text(left - 6, py(v) + 4, num(v), "text-anchor=\"end\"");
    }
    svg.line(left, py(0), left + width, py(0), "stroke=\"#cccccc\"");

    double legend_y = top + 8;
    for (Measure m : {Measure::kCtc, Measure::kProbe, Measure::kSim}) {
      std::vector<std::pair<double, double>> pts;
      const std::string color = measure_color(m);
      const std::string name(measure_name(m));
      for (const auto *r : rows) {
        if (r->measure != m) continue;
        const auto i = static_cast<std::size_t>(
            std::find(layers.begin(), layers.end(), r->layer_id) - layers.begin());
        pts.emplace_back(px(i), py(r->peak));
        svg.circle(px(i), py(r->peak), 3.5,
                   "class=\"peak\" data-measure=\"" + name + "\" data-layer=\"" + r->layer_id +
                       "\" fill=\"" + color + "\"");
      }
      if (pts.empty()) continue;
      svg.polyline(pts, "stroke=\"" + color + "\" stroke-width=\"1\" stroke-opacity=\"0.6\"");
      svg.circle(left + width + 16, legend_y, 3.5, "fill=\"" + color + "\"");
      svg.text(left + width + 26, legend_y + 4, name);
      legend_y += 16;
    }
    const fs::path file = dir / ("peaks_" + file_safe(model) + ".svg");
    svg.write(file);
    written.push_back(file);
  }
}

}  // namespace

std::vector<fs::path> emit_plots(const AnalysisResults &results, const fs::path &output_dir) {
  std::vector<fs::path> written;
  if (results.curves.empty()) {
    std::cerr << "warning: no preference curves; no plots written\n";
    return written;
  }
  std::error_code ec;
  fs::create_directories(output_dir, ec);
  if (ec) throw Error(ErrorKind::kIoFailure, "cannot create " + output_dir.string());
  plot_continua(results, output_dir, written);
  plot_sensitivity(results, output_dir, written);
  plot_peaks(results, output_dir, written);
  return written;
}

}  // namespace phonoprobe
