// tests/test_metrics.cc

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
#include "phonoprobe/error.h"
#include "phonoprobe/fixture.h"
#include "phonoprobe/metrics.h"
#include "phonoprobe/similarity.h"

namespace phonoprobe {
namespace {

PreferenceCurve complementary(const std::array<double, kNumSteps> &r,
                              const std::string &pair = "lih-rih",
                              const std::string &voice = "A") {
  PreferenceCurve c;
  c.pair = pair;
  c.voice = voice;
  c.layer_id = "T5";
  for (std::size_t k = 0; k < kNumSteps; ++k) {
    c.pref_r[k] = r[k];
    c.pref_l[k] = 1.0 - r[k];
    c.normalized[k] = r[k];
  }
  return c;
}

// Logistic psychometric curve crossing 0.5 between steps `at`-1 and `at`.
std::array<double, kNumSteps> sigmoid_curve(double midpoint) {
  std::array<double, kNumSteps> r{};
  for (int k = 0; k < kNumSteps; ++k)
    r[static_cast<std::size_t>(k)] = 1.0 / (1.0 + std::exp(-1.5 * (k - midpoint)));
  return r;
}

TEST_CASE("forced choice examples") {
  CHECK(forced_choice(0.7, 0.3) == Choice::kR);
  CHECK(forced_choice(0.5, 0.5) == Choice::kL);
  CHECK(forced_choice(0.02, 0.01) == Choice::kR);
  CHECK(forced_choice(0.3, 0.7) == Choice::kL);
  CHECK(choice_char(Choice::kR) == 'R');
}

TEST_CASE("forced choice is invariant to joint positive scaling") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 1.0), s(1e-3, 1e3);
  for (int i = 0; i < 1000; ++i) {
    const double r = u(rng), l = u(rng), k = s(rng);
    CHECK(forced_choice(r, l) == forced_choice(k * r, k * l));
  }
}

TEST_CASE("crossing point examples") {
  SUBCASE("clean switch at step 5") {
    std::array<double, kNumSteps> r{};
    for (std::size_t k = 0; k < kNumSteps; ++k) r[k] = k < 5 ? 0.2 : 0.8;
    const CrossingReport c = crossing_point(complementary(r));
    REQUIRE(c.step.has_value());
    CHECK(*c.step == 5);
    CHECK(c.reversals == 0);
  }
  SUBCASE("never R") {
    std::array<double, kNumSteps> r{};
    r.fill(0.1);
    CHECK_FALSE(crossing_point(complementary(r)).step.has_value());
  }
  SUBCASE("linear continuum ties at step 5 and crosses at 6") {
    const auto archives = linear_continuum(4);
    const CrossingReport c = crossing_point(similarity_curve(archives, "T1"));
    REQUIRE(c.step.has_value());
    CHECK(*c.step == 6);
    CHECK(c.reversals == 0);
  }
  SUBCASE("reversals are counted after the first R") {
    const std::array<double, kNumSteps> r{0.1, 0.1, 0.6, 0.4, 0.6, 0.7, 0.8, 0.3, 0.9, 0.9, 0.9};
    const CrossingReport c = crossing_point(complementary(r));
    CHECK(*c.step == 2);
    CHECK(c.reversals == 4);
  }
}

TEST_CASE("crossing point depends only on the sign pattern") {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 200; ++t) {
    PreferenceCurve a, b;
    for (std::size_t k = 0; k < kNumSteps; ++k) {
      a.pref_r[k] = u(rng);
      a.pref_l[k] = u(rng);
      // Strictly increasing transform applied to both.
      b.pref_r[k] = std::exp(3.0 * a.pref_r[k]) - 0.5;
      b.pref_l[k] = std::exp(3.0 * a.pref_l[k]) - 0.5;
    }
    const auto ca = crossing_point(a), cb = crossing_point(b);
    CHECK(ca.step == cb.step);
    CHECK(ca.reversals == cb.reversals);
  }
}

TEST_CASE("voice average") {
  const PreferenceCurve a = complementary(sigmoid_curve(5.0), "lih-rih", "A");
  SUBCASE("identical curves") {
    const std::vector<PreferenceCurve> v{a, a};
    const PreferenceCurve avg = voice_average(v);
    CHECK(avg.voice == "avg");
    CHECK(avg.pair == "lih-rih");
    for (std::size_t k = 0; k < kNumSteps; ++k) {
      CHECK(avg.pref_r[k] == a.pref_r[k]);
      CHECK(avg.pref_l[k] == a.pref_l[k]);
    }
  }
  SUBCASE("0.2 and 0.6 average to 0.4") {
    std::array<double, kNumSteps> r1{}, r2{};
    r1.fill(0.2);
    r2.fill(0.6);
    const std::vector<PreferenceCurve> v{complementary(r1, "lih-rih", "A"),
                                         complementary(r2, "lih-rih", "E")};
    const PreferenceCurve avg = voice_average(v);
    for (std::size_t k = 0; k < kNumSteps; ++k) {
      CHECK(avg.pref_r[k] == doctest::Approx(0.4).epsilon(1e-15));
      CHECK(avg.pref_r[k] + avg.pref_l[k] == doctest::Approx(1.0).epsilon(1e-15));
    }
  }
  SUBCASE("order does not matter") {
    const PreferenceCurve b = complementary(sigmoid_curve(3.3), "lih-rih", "E");
    const std::vector<PreferenceCurve> ab{a, b}, ba{b, a};
    const auto x = voice_average(ab), y = voice_average(ba);
    for (std::size_t k = 0; k < kNumSteps; ++k) CHECK(x.pref_r[k] == y.pref_r[k]);
  }
  SUBCASE("mixed keys") {
    PreferenceCurve b = a;
    b.layer_id = "T6";
    const std::vector<PreferenceCurve> v{a, b};
    try {
      voice_average(v);
      FAIL("expected MixedKeys");
    } catch (const Error &e) {
      CHECK(e.kind() == ErrorKind::kMixedKeys);
    }
    CHECK_THROWS_AS(voice_average(std::span<const PreferenceCurve>{}), Error);
  }
}

TEST_CASE("sensitivity curve") {
  SUBCASE("identical curves give zero") {
    const auto t = complementary(sigmoid_curve(4.5), "tlih-trih", "avg");
    auto s = t;
    s.pair = "slih-srih";
    const SensitivityCurve d = sensitivity_curve(t, s);
    CHECK(d.context_a == "tlih-trih");
    CHECK(d.context_b == "slih-srih");
    for (double v : d.delta) CHECK(v == 0.0);
  }
  SUBCASE("earlier crossing in the t context") {
    const auto t = complementary(sigmoid_curve(3.5), "tlih-trih", "avg");
    const auto s = complementary(sigmoid_curve(5.5), "slih-srih", "avg");
    REQUIRE(*crossing_point(t).step == 4);
    REQUIRE(*crossing_point(s).step == 6);
    const SensitivityCurve d = sensitivity_curve(t, s);
    CHECK(d.delta[4] > 0.0);
    CHECK(d.delta[5] > 0.0);
  }
  SUBCASE("antisymmetry") {
    const auto t = complementary(sigmoid_curve(3.1), "tlih-trih", "A");
    const auto s = complementary(sigmoid_curve(6.2), "slih-srih", "A");
    const auto ts = sensitivity_curve(t, s), st = sensitivity_curve(s, t);
    for (std::size_t k = 0; k < kNumSteps; ++k) CHECK(ts.delta[k] == -st.delta[k]);
  }
  SUBCASE("uses normalized preferences") {
    auto t = complementary(sigmoid_curve(3.0), "tlih-trih", "A");
    auto s = complementary(sigmoid_curve(3.0), "slih-srih", "A");
    t.measure = s.measure = Measure::kCtc;
    t.pref_r.fill(0.01);
    t.normalized.fill(0.9);
    s.normalized.fill(0.4);
    for (double v : sensitivity_curve(t, s).delta) CHECK(v == doctest::Approx(0.5));
  }
  SUBCASE("mismatched keys") {
    auto t = complementary(sigmoid_curve(3.0), "tlih-trih", "A");
    auto s = complementary(sigmoid_curve(3.0), "slih-srih", "E");
    CHECK_THROWS_AS(sensitivity_curve(t, s), Error);
    s.voice = "A";
    s.measure = Measure::kProbe;
    CHECK_THROWS_AS(sensitivity_curve(t, s), Error);
  }
}

TEST_CASE("peak sensitivity") {
  SensitivityCurve s;
  s.layer_id = "T3";
  SUBCASE("all zero") {
    const PeakSensitivity p = peak_sensitivity(s);
    CHECK(p.peak == 0.0);
    CHECK(p.step == 1);
  }
  SUBCASE("endpoints ignored") {
    s.delta[0] = 0.9;
    s.delta[10] = 0.9;
    s.delta[5] = 0.3;
    const PeakSensitivity p = peak_sensitivity(s);
    CHECK(p.peak == 0.3);
    CHECK(p.step == 5);
  }
  SUBCASE("first argmax wins") {
    s.delta[3] = 0.2;
    s.delta[7] = 0.2;
    CHECK(peak_sensitivity(s).step == 3);
  }
  SUBCASE("all negative") {
    for (std::size_t k = 0; k < kNumSteps; ++k) s.delta[k] = -0.1 * static_cast<double>(k + 1);
    const PeakSensitivity p = peak_sensitivity(s);
    CHECK(p.step == 1);
    CHECK(p.peak == doctest::Approx(-0.2));
  }
}

TEST_CASE("layer summary is ordered by measure then depth") {
  std::vector<SensitivityCurve> curves;
  for (const char *id : {"T10", "C", "T2"}) {
    for (Measure m : {Measure::kSim, Measure::kCtc}) {
      SensitivityCurve s;
      s.layer_id = id;
      s.measure = m;
      s.delta[4] = 0.1;
      curves.push_back(s);
    }
  }
  const auto rows = summarize_layers("base", curves);
  REQUIRE(rows.size() == 6);
  CHECK(rows[0].measure == Measure::kCtc);
  CHECK(rows[0].layer_id == "C");
  CHECK(rows[1].layer_id == "T2");
  CHECK(rows[2].layer_id == "T10");
  CHECK(rows[3].measure == Measure::kSim);
  CHECK(rows[5].model_id == "base");
  CHECK(rows[5].step == 4);
}

}  // namespace
}  // namespace phonoprobe
