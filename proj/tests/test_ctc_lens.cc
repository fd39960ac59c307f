// tests/test_ctc_lens.cc

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
#include <random>
#include <vector>

#include "doctest.h"
#include "phonoprobe/ctc_lens.h"
#include "phonoprobe/error.h"
#include "phonoprobe/fixture.h"

namespace phonoprobe {
namespace {

CtcHead zero_head(std::size_t dim) {
  CtcHead h;
  h.vocab = {"<pad>", "|", "L", "R", "E", "I"};
  h.dim = dim;
  h.weights.assign(h.vocab.size() * dim, 0.0f);
  h.bias.assign(h.vocab.size(), 0.0f);
  return h;
}

LayerActivations random_layer(std::size_t frames, std::size_t dim, std::uint64_t seed,
                              float scale = 1.0f) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<float> dist(0.0f, scale);
  LayerActivations l{"T3", frames, dim, std::vector<float>(frames * dim)};
  for (auto &v : l.values) v = dist(rng);
  return l;
}

// Softmax evaluated in long double straight from the definition.
std::vector<long double> softmax_oracle(const CtcHead &h, std::span<const float> x) {
  const std::size_t v = h.vocab.size();
  std::vector<long double> z(v);
  long double mx = -INFINITY;
  for (std::size_t k = 0; k < v; ++k) {
    long double s = h.bias[k];
    for (std::size_t j = 0; j < h.dim; ++j)
      s += static_cast<long double>(h.weights[k * h.dim + j]) * x[j];
    z[k] = s;
    mx = std::max(mx, s);
  }
  long double total = 0;
  for (auto &e : z) total += (e = std::exp(e - mx));
  for (auto &e : z) e /= total;
  return z;
}

TEST_CASE("zero head gives uniform rows") {
  const CtcHead h = zero_head(5);
  const CharProbs p = frame_char_probs(random_layer(7, 5, 1), h);
  REQUIRE(p.num_frames == 7);
  REQUIRE(p.vocab_size == 6);
  for (double v : p.values) CHECK(v == doctest::Approx(1.0 / 6.0).epsilon(1e-15));
}

TEST_CASE("single large bias") {
  CtcHead h = zero_head(4);
  h.bias[3] = 10.0f;
  const CharProbs p = frame_char_probs(random_layer(3, 4, 2), h);
  const double want = std::exp(10.0) / (std::exp(10.0) + 5.0);
  for (std::size_t f = 0; f < 3; ++f) {
    CHECK(p.at(f, 3) == doctest::Approx(want).epsilon(1e-14));
    CHECK(p.at(f, 0) == doctest::Approx(1.0 / (std::exp(10.0) + 5.0)).epsilon(1e-12));
  }
}

TEST_CASE("rows sum to one for extreme logits") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<float> w(-1.0f, 1.0f);
  CtcHead h = zero_head(8);
  for (auto &x : h.weights) x = 1250.0f * w(rng);  // |logit| up to ~1e4
  for (auto &x : h.bias) x = 100.0f * w(rng);
  LayerActivations l = random_layer(40, 8, 4);
  for (auto &v : l.values) v = std::copysign(1.0f, v);
  const CharProbs p = frame_char_probs(l, h);
  double max_logit = 0.0;
  for (std::size_t f = 0; f < l.num_frames; ++f) {
    double sum = 0.0;
    for (std::size_t k = 0; k < p.vocab_size; ++k) {
      CHECK(std::isfinite(p.at(f, k)));
      CHECK(p.at(f, k) >= 0.0);
      sum += p.at(f, k);
    }
    CHECK(std::abs(sum - 1.0) <= 1e-9);
    for (std::size_t k = 0; k < p.vocab_size; ++k) {
      double z = h.bias[k];
      for (std::size_t j = 0; j < 8; ++j) z += double(h.weights[k * 8 + j]) * l.values[f * 8 + j];
      max_logit = std::max(max_logit, std::abs(z));
    }
  }
  CHECK(max_logit > 5e3);
  CHECK(max_logit <= 1.01e4);
}

TEST_CASE("softmax agrees with a long double oracle") {
  std::mt19937_64 rng(5);
  std::normal_distribution<float> w(0.0f, 2.0f);
  CtcHead h = zero_head(16);
  for (auto &x : h.weights) x = w(rng);
  for (auto &x : h.bias) x = w(rng);
  const LayerActivations l = random_layer(9, 16, 6);
  const CharProbs p = frame_char_probs(l, h);
  for (std::size_t f = 0; f < 9; ++f) {
    const auto want = softmax_oracle(h, l.row(f));
    for (std::size_t k = 0; k < 6; ++k)
      CHECK(p.at(f, k) == doctest::Approx(static_cast<double>(want[k])).epsilon(1e-12));
  }
}

TEST_CASE("char_preference") {
  const FrameSpec spec{};
  const TimeWindow window{0.10, 0.20};  // frames 4..9

  SUBCASE("planted character inside the window") {
    CtcHead h = zero_head(6);
    h.weights[3 * 6 + 0] = 8.0f;  // R reads axis 0
    LayerActivations l = random_layer(30, 6, 7, 0.1f);
    for (std::size_t f = 4; f <= 9; ++f) l.values[f * 6] = 2.0f;
    CHECK(char_preference(l, h, window, spec, "R") > 0.99);
    CHECK(char_preference(l, h, window, spec, "L") < 0.01);
  }
  SUBCASE("single overlapping frame") {
    const CtcHead h = [] {
      CtcHead c = zero_head(3);
      for (std::size_t i = 0; i < c.weights.size(); ++i) c.weights[i] = 0.1f * float(i % 7);
      return c;
    }();
    const LayerActivations l = random_layer(12, 3, 8);
    const FrameSpec exact{0.015625, 0.015625, 0.0};  // dyadic, so edges meet exactly
    const double got = char_preference(l, h, frame_span(exact, 5), exact, "L");
    CHECK(got == frame_char_probs(l, h).at(5, h.token_index("L")));
  }
  SUBCASE("constant probability") {
    // bias chosen so L has probability 0.3 everywhere.
    CtcHead h = zero_head(2);
    h.vocab = {"<pad>", "L", "R"};
    h.weights.assign(6, 0.0f);
    const double pl = 0.3, rest = 0.35;
    h.bias = {0.0f, static_cast<float>(std::log(pl / rest)), 0.0f};
    const double want = std::exp(double(h.bias[1])) / (std::exp(double(h.bias[1])) + 2.0);
    CHECK(want == doctest::Approx(0.3).epsilon(1e-7));
    const LayerActivations l = random_layer(20, 2, 9);
    CHECK(char_preference(l, h, window, spec, "L") == doctest::Approx(want).epsilon(1e-14));
  }
  SUBCASE("monotone under window inclusion") {
    std::mt19937_64 rng(10);
    std::normal_distribution<float> w(0.0f, 1.0f);
    CtcHead h = zero_head(4);
    for (auto &x : h.weights) x = w(rng);
    const LayerActivations l = random_layer(40, 4, 11);
    double prev = 0.0;
    for (double end = 0.13; end < 0.6; end += 0.04) {
      const double v = char_preference(l, h, {0.10, end}, spec, "R");
      CHECK(v >= prev);
      prev = v;
    }
  }
  SUBCASE("errors") {
    const CtcHead h = zero_head(4);
    CHECK_THROWS_AS(char_preference(random_layer(20, 4, 1), h, window, spec, "Q"), Error);
    CHECK_THROWS_AS(char_preference(random_layer(20, 5, 1), h, window, spec, "R"), Error);
    CHECK_THROWS_AS(char_preference(random_layer(20, 4, 1), h, {5.0, 6.0}, spec, "R"), Error);
    try {
      frame_char_probs(random_layer(20, 5, 1), h);
    } catch (const Error &e) {
      CHECK(e.kind() == ErrorKind::kDimensionMismatch);
    }
  }
}

TEST_CASE("normalized preference") {
  const auto a = normalized_preference(0.02, 0.01);
  CHECK(a.value == doctest::Approx(2.0 / 3.0));
  CHECK_FALSE(a.degenerate);
  const auto b = normalized_preference(0.0, 0.0);
  CHECK(b.value == 0.5);
  CHECK(b.degenerate);
}

TEST_CASE("lens on the final layer is the output readout") {
  FixtureOptions o;
  const CtcHead head = fixture_ctc_head(o);
  std::vector<StimulusArchive> archives;
  for (int s = 0; s < kNumSteps; ++s) archives.push_back(fixture_stimulus(o, "lih-rih", "E", s));
  const Continuum c = order_continuum(archives);
  const std::string last = archives[0].final_layer().layer_id;
  CHECK(last == "T4");
  const PreferenceCurve curve = lens_curve(c, last, head);
  CHECK(curve.measure == Measure::kCtc);
  for (int s = 0; s < kNumSteps; ++s) {
    const auto k = static_cast<std::size_t>(s);
    CHECK(curve.pref_r[k] == output_char_preference(*c[k], head, "R"));
    CHECK(curve.pref_l[k] == output_char_preference(*c[k], head, "L"));
  }
  CHECK(curve.normalized[0] < 0.5);
  CHECK(curve.normalized[10] > 0.5);
}

TEST_CASE("zero head yields an even normalized preference") {
  const auto archives = linear_continuum(6);
  const PreferenceCurve c = lens_curve(order_continuum(archives), "T1", zero_head(6));
  for (std::size_t k = 0; k < c.normalized.size(); ++k) {
    CHECK(c.pref_r[k] == c.pref_l[k]);
    CHECK(c.normalized[k] == 0.5);
  }
}

}  // namespace
}  // namespace phonoprobe
