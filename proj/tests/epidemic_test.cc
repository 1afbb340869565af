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

#include "spdt/epidemic.h"

#include <algorithm>
#include <numeric>
#include <sstream>
#include <vector>

#include <gtest/gtest.h>

#include "oracles.h"
#include "spdt/metrics.h"

namespace spdt {
namespace {

TEST(RemovalTimeTest, MedianAndSupport) {
  std::vector<double> draws;
  draws.reserve(100000);
  for (std::uint64_t i = 0; i < 100000; ++i) {
    StreamRng rng(1, Substream::kRemovalTime, {i});
    draws.push_back(SampleRemovalTime(60, 7.5, 300, rng));
  }
  for (double b : draws) {
    ASSERT_GE(b, 7.5);
    ASSERT_LE(b, 300.0);
  }
  std::nth_element(draws.begin(), draws.begin() + 50000, draws.end());
  EXPECT_NEAR(draws[50000], 60.0, 2.0);
}

TEST(RemovalTimeTest, RejectsMedianOutsideRange) {
  StreamRng rng(1, Substream::kRemovalTime, {});
  EXPECT_THROW(SampleRemovalTime(5, 7.5, 300, rng), std::invalid_argument);
  EXPECT_THROW(SampleRemovalTime(400, 7.5, 300, rng), std::invalid_argument);
}

TEST(TauModeTest, ParseAndName) {
  EXPECT_EQ(ParseTauMode("uniform"), TauMode::kUniform);
  EXPECT_EQ(ParseTauMode("mean3"), TauMode::kMean3);
  EXPECT_EQ(TauModeName(TauMode::kMean3), "mean3");
  EXPECT_THROW(ParseTauMode("gamma"), std::invalid_argument);
}

// A pair co-located all day on every day of the horizon, both directions.
ContactNetwork Pair(int days) {
  std::vector<SpdtLink> links;
  for (int d = 0; d < days; ++d) {
    const Minutes o = d * kMinutesPerDay;
    links.push_back({d, 1, 2, o + 60, o + 1200, o + 60, o + 1200});
    links.push_back({d, 2, 1, o + 60, o + 1200, o + 60, o + 1200});
  }
  return ContactNetwork::FromLinks(days, links);
}

SimulationConfig Small(int seeds, int runs, int days) {
  SimulationConfig cfg;
  cfg.seeds = seeds;
  cfg.runs = runs;
  cfg.horizon_days = days;
  return cfg;
}

TEST(SimulationTest, NoSeedsNoEvents) {
  const auto runs = RunSimulation(Pair(5), Small(0, 3, 5));
  ASSERT_EQ(runs.size(), 3u);
  for (const auto& run : runs) {
    ASSERT_EQ(run.size(), 5u);
    for (const auto& s : run) {
      EXPECT_EQ(s.new_infections, 0);
      EXPECT_EQ(s.new_recoveries, 0);
      EXPECT_EQ(s.prevalence, 0);
    }
  }
}

TEST(SimulationTest, EveryoneSeeded) {
  const auto runs = RunSimulation(Pair(1), Small(2, 1, 1));
  ASSERT_EQ(runs[0].size(), 1u);
  EXPECT_EQ(runs[0][0].prevalence, 2);
  EXPECT_EQ(runs[0][0].new_infections, 0);
}

TEST(SimulationTest, TooManySeedsThrows) {
  EXPECT_THROW(RunSimulation(Pair(1), Small(3, 1, 1)), std::invalid_argument);
}

TEST(SimulationTest, EnormousExposureAlmostAlwaysInfects) {
  SimulationConfig cfg = Small(1, 1000, 1);
  cfg.env.generation_rate *= 100;  // sigma * E is far above 7
  const IndexedNetwork net(Pair(1));
  std::int64_t infected = 0;
  for (const auto& run : RunSimulation(net, cfg)) {
    infected += run[0].new_infections;
  }
  EXPECT_GE(infected, 990);
}

TEST(SimulationTest, NewInfectionsWaitOneDay) {
  // 1 -> 2 and 2 -> 3 on day 0, 2 -> 3 again on day 1, with 1 infectious.
  std::vector<SpdtLink> links = {{0, 1, 2, 60, 600, 60, 600},
                                 {0, 2, 3, 700, 1200, 700, 1200},
                                 {1, 2, 3, 1500, 2000, 1500, 2000}};
  const IndexedNetwork net(ContactNetwork::FromLinks(2, links));
  SimulationConfig cfg = Small(0, 1, 2);
  cfg.env.generation_rate *= 100;
  std::vector<IndividualState> states(3);
  states[0] = {Status::kInfectious, 0, 3};
  const DailyStats d0 = StepDay(net, states, 0, cfg, 0, 1);
  EXPECT_EQ(d0.new_infections, 1);
  EXPECT_EQ(states[1].status, Status::kInfectious);
  EXPECT_EQ(states[1].day_infected, 1);
  EXPECT_EQ(states[2].status, Status::kSusceptible);
  const DailyStats d1 = StepDay(net, states, 1, cfg, 0, d0.prevalence);
  EXPECT_EQ(d1.new_infections, 1);
  EXPECT_EQ(d1.prevalence, 3);
}

TEST(SimulationTest, RecoveryAfterTau) {
  SimulationConfig cfg = Small(2, 1, 6);
  cfg.tau_mode = TauMode::kMean3;
  const ContactNetwork day0 = Pair(1);
  const auto net = ContactNetwork::FromLinks(
      6, {day0.links().begin(), day0.links().end()});
  const auto runs = RunSimulation(net, cfg);
  const auto& r = runs[0];
  for (int d = 0; d < 6; ++d) {
    EXPECT_EQ(r[d].new_recoveries, d == 3 ? 2 : 0) << "day " << d;
  }
  EXPECT_EQ(r[5].prevalence, 0);
}

TEST(SimulationTest, ConservationAndMonotoneRecovery) {
  const IndexedNetwork net(
      BuildNetwork(testing::SmallTrace(50, 400), {.horizon_days = 7}));
  SimulationConfig cfg = Small(20, 1, 7);
  cfg.sigma = 2.0;  // plenty of transitions
  for (int run = 0; run < 5; ++run) {
    auto states = SeedStates(net.population(), cfg, run);
    std::int64_t prevalence = cfg.seeds;
    std::size_t last_recovered = 0;
    std::int64_t infected_total = cfg.seeds, recovered_total = 0;
    for (int day = 0; day < cfg.horizon_days; ++day) {
      const auto before = states;
      const DailyStats s = StepDay(net, states, day, cfg, run, prevalence);
      prevalence = s.prevalence;
      infected_total += s.new_infections;
      recovered_total += s.new_recoveries;
      std::size_t sus = 0, inf = 0, rec = 0;
      for (std::size_t i = 0; i < states.size(); ++i) {
        const Status a = before[i].status, b = states[i].status;
        if (a == Status::kRecovered) EXPECT_EQ(b, Status::kRecovered);
        if (a == Status::kInfectious) EXPECT_NE(b, Status::kSusceptible);
        sus += b == Status::kSusceptible;
        inf += b == Status::kInfectious;
        rec += b == Status::kRecovered;
      }
      EXPECT_EQ(sus + inf + rec, net.population());
      EXPECT_GE(rec, last_recovered);
      last_recovered = rec;
      EXPECT_EQ(static_cast<std::int64_t>(inf), s.prevalence);
      EXPECT_EQ(static_cast<std::int64_t>(rec), recovered_total);
      EXPECT_EQ(static_cast<std::int64_t>(inf + rec), infected_total);
    }
  }
}

TEST(SimulationTest, DeterministicAcrossRepeatsAndWorkers) {
  const auto net =
      BuildNetwork(testing::SmallTrace(60, 400), {.horizon_days = 7});
  const SimulationConfig cfg = Small(20, 16, 7);
  const auto a = RunSimulation(net, cfg, 1);
  const auto b = RunSimulation(net, cfg, 1);
  const auto c = RunSimulation(net, cfg, 8);
  EXPECT_EQ(a, b);
  EXPECT_EQ(a, c);
  SimulationConfig other = cfg;
  other.rng_seed = 2;
  EXPECT_NE(RunSimulation(net, other, 1), a);
}

TEST(SimulationTest, DirectOnlyNetworkMatchesItsProjection) {
  std::vector<SpdtLink> links;
  const auto full =
      BuildNetwork(testing::SmallTrace(70, 400), {.horizon_days = 7});
  for (const auto& l : full.links()) {
    if (!l.IsIndirectOnly() && l.t_l_n <= l.t_l) links.push_back(l);
  }
  const auto direct = ContactNetwork::FromLinks(7, links);
  ASSERT_EQ(ProjectSpst(direct), direct);
  const SimulationConfig cfg = Small(10, 8, 7);
  EXPECT_EQ(RunSimulation(direct, cfg),
            RunSimulation(ProjectSpst(direct), cfg));
}

TEST(SimulationTest, SpdtOutbreakExceedsSpst) {
  const auto sdt =
      BuildNetwork(testing::SmallTrace(80, 800), {.horizon_days = 7});
  const auto sst = ProjectSpst(sdt);
  const SimulationConfig cfg = Small(20, 200, 7);
  auto mean = [&](const ContactNetwork& net) {
    double total = 0;
    for (const auto& run : RunSimulation(net, cfg, 4)) {
      total += static_cast<double>(SummarizeRun(run).outbreak_size);
    }
    return total / cfg.runs;
  };
  EXPECT_GT(mean(sdt), mean(sst));
}

TEST(DailyCsvTest, RoundTripAndErrors) {
  const auto runs = RunSimulation(Pair(4), Small(1, 3, 4));
  std::stringstream io;
  WriteDailyCsv(io, runs);
  EXPECT_EQ(io.str().substr(0, 20), "run,day,I_n,I_r,I_p\n");
  EXPECT_EQ(ReadDailyCsv(io), runs);
  for (const char* bad : {"", "run,day\n", "run,day,I_n,I_r,I_p\n1,0,0,0,0\n",
                          "run,day,I_n,I_r,I_p\n0,1,0,0,0\n",
                          "run,day,I_n,I_r,I_p\n0,0,0,0\n"}) {
    std::istringstream in(bad);
    EXPECT_THROW(ReadDailyCsv(in), std::runtime_error) << bad;
  }
}

}  // namespace
}  // namespace spdt
