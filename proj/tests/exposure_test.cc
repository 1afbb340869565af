// Copyright 2026 The SPDT Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "spdt/exposure.h"

#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <vector>

#include <gtest/gtest.h>

#include "oracles.h"

namespace spdt {
namespace {

// Golden values from an independent scipy.integrate.quad evaluation with
// g = 18.24 PFU/min, r = 1/60 per min, V = 2512 m^3, p = 0.0075 m^3/min.
constexpr double kSteadyState = 0.43566878980891716;
constexpr double kAfterDeparture = 0.15455599191413943;  // 0, 200, t = 260
constexpr double kDirect = 0.032727843513949556;         // 0, 60, 10, 40
constexpr double kMixed = 0.071426065803284935;          // 0, 30, 10, 100
constexpr double kIndirect = 0.01358188800236834;        // 0, 30, 100, 150

const EnvironmentParams kEnv = DefaultEnvironment();

double Rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

TEST(EnvironmentTest, DefaultsAreInCanonicalUnits) {
  EXPECT_DOUBLE_EQ(kEnv.generation_rate, 18.24);
  EXPECT_DOUBLE_EQ(kEnv.volume, 2512.0);
  EXPECT_DOUBLE_EQ(kEnv.pulmonary_rate, 0.0075);
  EXPECT_DOUBLE_EQ(kEnv.removal_rate, 1.0 / 60.0);
  EXPECT_LT(Rel(kEnv.SteadyStateConcentration(), kSteadyState), 1e-14);
}

TEST(EnvironmentTest, RejectsNonPositiveParameters) {
  EXPECT_THROW(kEnv.WithRemovalRate(0.0).Validate(), std::invalid_argument);
  EnvironmentParams bad = kEnv;
  bad.volume = -1;
  EXPECT_THROW(bad.Validate(), std::invalid_argument);
  bad = kEnv;
  bad.generation_rate = std::nan("");
  EXPECT_THROW(bad.Validate(), std::invalid_argument);
}

TEST(ConcentrationTest, ZeroAtArrivalAndSaturates) {
  EXPECT_EQ(ConcentrationDuringPresence(kEnv, 0.0, 0.0), 0.0);
  EXPECT_LT(Rel(ConcentrationDuringPresence(kEnv, 0.0, 1e6), kSteadyState),
            1e-12);
}

TEST(ConcentrationTest, SmallerRemovalRateSaturatesSlowerAndHigher) {
  const auto slow = kEnv.WithRemovalRate(1.0 / 60.0);
  const auto fast = kEnv.WithRemovalRate(1.0 / 10.0);
  EXPECT_GT(slow.SteadyStateConcentration(), fast.SteadyStateConcentration());
  // Relative progress towards the plateau after 20 minutes.
  EXPECT_LT(ConcentrationDuringPresence(slow, 0, 20) /
                slow.SteadyStateConcentration(),
            ConcentrationDuringPresence(fast, 0, 20) /
                fast.SteadyStateConcentration());
}

TEST(ConcentrationTest, AfterDepartureGoldenAndContinuity) {
  EXPECT_LT(Rel(ConcentrationAfterDeparture(kEnv, 0, 200, 260),
                kAfterDeparture),
            1e-12);
  EXPECT_DOUBLE_EQ(ConcentrationAfterDeparture(kEnv, 0, 200, 200),
                   ConcentrationDuringPresence(kEnv, 0, 200));
  EXPECT_LT(ConcentrationAfterDeparture(kEnv, 0, 200, 1e5), 1e-300);
}

TEST(ConcentrationTest, PiecewiseDispatch) {
  EXPECT_THROW(Concentration(kEnv, 10, 50, 5), std::invalid_argument);
  EXPECT_DOUBLE_EQ(Concentration(kEnv, 10, 50, 30),
                   ConcentrationDuringPresence(kEnv, 10, 30));
  EXPECT_DOUBLE_EQ(Concentration(kEnv, 10, 50, 80),
                   ConcentrationAfterDeparture(kEnv, 10, 50, 80));
}

TEST(LinkExposureTest, GoldenValuesForEachCase) {
  EXPECT_EQ(Classify({0, 60, 10, 40}), LinkCase::kDirectOnly);
  EXPECT_EQ(Classify({0, 30, 10, 100}), LinkCase::kMixed);
  EXPECT_EQ(Classify({0, 30, 100, 150}), LinkCase::kIndirectOnly);
  EXPECT_LT(Rel(LinkExposure(kEnv, {0, 60, 10, 40}), kDirect), 1e-12);
  EXPECT_LT(Rel(LinkExposure(kEnv, {0, 30, 10, 100}), kMixed), 1e-12);
  EXPECT_LT(Rel(LinkExposure(kEnv, {0, 30, 100, 150}), kIndirect), 1e-12);
}

TEST(LinkExposureTest, MixedIsDirectPlusIndirect) {
  const double direct = DirectSegmentDose(kEnv, 0, 10, 30);
  const double indirect = IndirectSegmentDose(kEnv, 0, 30, 30, 100);
  EXPECT_LT(Rel(direct + indirect, kMixed), 1e-13);
}

TEST(LinkExposureTest, DegenerateWindows) {
  EXPECT_EQ(LinkExposure(kEnv, {0, 30, 20, 20}), 0.0);
  EXPECT_EQ(LinkExposure(kEnv, {0, 30, 40, 40}), 0.0);
  // Neighbour leaves exactly when the host arrives.
  EXPECT_EQ(LinkExposure(kEnv, {10, 30, 0, 10}), 0.0);
  EXPECT_THROW(LinkExposure(kEnv, {10, 30, 0, 5}), std::invalid_argument);
  EXPECT_THROW(LinkExposure(kEnv, {30, 10, 0, 50}), std::invalid_argument);
  EXPECT_THROW(LinkExposure(kEnv, {0, 30, 50, 40}), std::invalid_argument);
}

TEST(LinkExposureTest, ArrivalBeforeHostIsClamped) {
  EXPECT_DOUBLE_EQ(LinkExposure(kEnv, {10, 60, 0, 40}),
                   LinkExposure(kEnv, {10, 60, 10, 40}));
}

TEST(LinkExposureTest, AgreesWithQuadratureOnRandomLinks) {
  std::mt19937_64 gen(7);
  for (int i = 0; i < 2000; ++i) {
    const auto c = testing::DrawLinkCase(gen);
    const double want = testing::QuadratureExposure(c.env, c.link);
    const double got = LinkExposure(c.env, c.link);
    if (want == 0.0) {
      EXPECT_EQ(got, 0.0);
    } else {
      EXPECT_LT(Rel(got, want), 1e-8) << "case " << i;
    }
  }
}

// Rounding bound for the single-expression form: a few ulps of the largest
// term inside its bracket, scaled by the prefactor.
double MergedRoundingBound(const EnvironmentParams& e, const LinkInterval& l) {
  const double r = e.removal_rate;
  const double dep = l.host_departure - l.host_arrival;
  const double na = std::max(l.host_arrival, l.neighbour_arrival) -
                    l.host_arrival;
  const double nd = l.neighbour_departure - l.host_arrival;
  const double terms = r * (nd - na) + std::exp(r * (dep - na)) + 2.0;
  return 64 * std::numeric_limits<double>::epsilon() * e.generation_rate *
         e.pulmonary_rate / (e.volume * r * r) * terms;
}

TEST(LinkExposureTest, MergedFormMatchesCaseWise) {
  std::mt19937_64 gen(11);
  int long_windows = 0;
  for (int i = 0; i < 5000; ++i) {
    const auto c = testing::DrawLinkCase(gen);
    const double a = LinkExposure(c.env, c.link);
    const double b = LinkExposureMerged(c.env, c.link);
    const double start =
        std::max(c.link.host_arrival, c.link.neighbour_arrival);
    if (c.link.neighbour_departure - start >= 1.0) {
      ++long_windows;
      EXPECT_LT(Rel(b, a), 1e-9) << "case " << i;
    }
    EXPECT_LE(std::abs(b - a), MergedRoundingBound(c.env, c.link))
        << "case " << i;
  }
  EXPECT_GT(long_windows, 2500);
}

TEST(LinkExposureTest, SmallRemovalRateIsStable) {
  // r * dt around 1e-10: the naive closed forms lose most digits, so the
  // reference here is the r -> 0 limit rather than quadrature.
  const auto env = kEnv.WithRemovalRate(1e-12);
  const LinkInterval l{0, 30, 10, 20};
  const double want = env.pulmonary_rate * env.generation_rate / env.volume *
                      (20.0 * 20.0 - 10.0 * 10.0) / 2.0;
  EXPECT_LT(Rel(LinkExposure(env, l), want), 1e-9);
}

TEST(LinkExposureTest, ContinuousAcrossCaseBoundary) {
  const double below = LinkExposure(kEnv, {0, 30, 10, 30 - 1e-9});
  const double at = LinkExposure(kEnv, {0, 30, 10, 30});
  const double above = LinkExposure(kEnv, {0, 30, 10, 30 + 1e-9});
  EXPECT_NEAR(below, at, 1e-10);
  EXPECT_NEAR(above, at, 1e-10);
}

TEST(LinkExposureTest, MonotoneInBoundsAndRates) {
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 500; ++i) {
    const auto c = testing::DrawLinkCase(gen);
    const LinkInterval& l = c.link;
    const double base = LinkExposure(c.env, l);
    LinkInterval later_leave = l;
    later_leave.neighbour_departure += 50 * u(gen);
    EXPECT_GE(LinkExposure(c.env, later_leave), base);
    LinkInterval later_arrival = l;
    later_arrival.neighbour_arrival = std::min(
        l.neighbour_departure, l.neighbour_arrival + 50 * u(gen));
    EXPECT_LE(LinkExposure(c.env, later_arrival), base);
    EnvironmentParams more = c.env;
    more.generation_rate *= 1.5;
    more.pulmonary_rate *= 1.2;
    EXPECT_GE(LinkExposure(more, l), base);
  }
}

TEST(LinkExposureTest, BoundedBySteadyStateInhalation) {
  std::mt19937_64 gen(5);
  for (int i = 0; i < 2000; ++i) {
    const auto c = testing::DrawLinkCase(gen);
    const auto& l = c.link;
    const double span = l.neighbour_departure -
                        std::max(l.host_arrival, l.neighbour_arrival);
    const double bound = c.env.pulmonary_rate * std::max(span, 0.0) *
                         c.env.SteadyStateConcentration();
    EXPECT_LE(LinkExposure(c.env, l), bound * (1 + 1e-12));
  }
}

TEST(TotalExposureTest, SumsAndLinearity) {
  EXPECT_EQ(TotalExposure({}), 0.0);
  const std::vector<double> xs = {1.0, 2.0, 0.5};
  EXPECT_DOUBLE_EQ(TotalExposure(xs), 3.5);
  const double one = LinkExposure(kEnv, {0, 60, 10, 40});
  const std::vector<double> copies(7, one);
  EXPECT_NEAR(TotalExposure(copies), 7 * one, 1e-15);
  const std::vector<double> negative = {1.0, -0.1};
  EXPECT_THROW(TotalExposure(negative), std::invalid_argument);
}

TEST(TotalExposureTest, SplittingALinkIsAdditive) {
  std::mt19937_64 gen(9);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 500; ++i) {
    const auto c = testing::DrawLinkCase(gen);
    const auto& l = c.link;
    const double start = std::max(l.host_arrival, l.neighbour_arrival);
    if (l.neighbour_departure <= start) continue;
    const double cut = start + (l.neighbour_departure - start) * u(gen);
    const std::vector<double> parts = {
        LinkExposure(c.env, {l.host_arrival, l.host_departure, start, cut}),
        LinkExposure(c.env,
                     {l.host_arrival, l.host_departure, cut,
                      l.neighbour_departure})};
    const double whole = LinkExposure(c.env, l);
    EXPECT_LT(std::abs(TotalExposure(parts) - whole), 1e-12 * whole + 1e-300);
    EXPECT_NEAR(InfectionProbability(TotalExposure(parts), 0.33),
                InfectionProbability(whole, 0.33), 1e-14);
  }
}

TEST(InfectionProbabilityTest, Anchors) {
  EXPECT_EQ(InfectionProbability(0.0, 0.33), 0.0);
  EXPECT_NEAR(InfectionProbability(2.1, 0.33), 0.5, 1e-3);
  EXPECT_LT(Rel(InfectionProbability(2.1, 0.33), 0.49992640430423241), 1e-14);
  EXPECT_NEAR(InfectionProbability(1e4, 0.33), 1.0, 1e-15);
  EXPECT_THROW(InfectionProbability(-1.0, 0.33), std::invalid_argument);
}

TEST(CurveTest, EndpointsOrderingAndBound) {
  const auto curve = EmitConcentrationCurve(kEnv, 0, 200, 200, 7);
  ASSERT_FALSE(curve.empty());
  EXPECT_EQ(curve.front().time, 0.0);
  EXPECT_EQ(curve.back().time, 200.0);
  int at_departure = 0;
  for (const auto& s : curve) at_departure += s.time == 200.0 ? 1 : 0;
  EXPECT_EQ(at_departure, 1);

  std::vector<double> plateau;
  std::vector<double> tail;
  for (double rt : {10.0, 30.0, 60.0}) {
    const auto env = kEnv.WithRemovalRate(1.0 / rt);
    const auto c = EmitConcentrationCurve(env, 0, 200, 400, 5);
    for (const auto& s : c) {
      EXPECT_GE(s.concentration, 0.0);
      EXPECT_LE(s.concentration, env.SteadyStateConcentration() * (1 + 1e-12));
    }
    plateau.push_back(ConcentrationDuringPresence(env, 0, 200));
    tail.push_back(ConcentrationAfterDeparture(env, 0, 200, 260) /
                   ConcentrationDuringPresence(env, 0, 200));
  }
  EXPECT_LT(plateau[0], plateau[1]);
  EXPECT_LT(plateau[1], plateau[2]);
  EXPECT_LT(tail[0], tail[1]);
  EXPECT_LT(tail[1], tail[2]);

  std::ostringstream os;
  WriteConcentrationCsv(os, curve);
  EXPECT_EQ(os.str().substr(0, os.str().find('\n')),
            "time_min,concentration_pfu_m3");
}

}  // namespace
}  // namespace spdt
