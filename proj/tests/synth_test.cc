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

#include "spdt/synth.h"

#include <algorithm>
#include <set>
#include <vector>

#include <gtest/gtest.h>

namespace spdt {
namespace {

double MeanActiveDays(const std::vector<LocationUpdate>& trace, int users) {
  std::set<std::pair<UserId, Minutes>> active;
  for (const auto& u : trace) active.insert({u.user, u.t / kMinutesPerDay});
  return static_cast<double>(active.size()) / users;
}

TEST(SynthTest, SparsityTargetOnDefaultProfile) {
  SynthConfig cfg;
  const auto trace = GenerateTrace(cfg, 4);
  EXPECT_NEAR(MeanActiveDays(trace, cfg.n_users), 3.5, 0.2 * 3.5);
}

TEST(SynthTest, SparsityTargetOnDeskProfile) {
  const SynthConfig cfg = DeskSynthConfig();
  EXPECT_EQ(cfg.n_users, 2000);
  EXPECT_EQ(cfg.days, 14);
  const auto trace = GenerateTrace(cfg, 4);
  EXPECT_NEAR(MeanActiveDays(trace, cfg.n_users), 3.5, 0.2 * 3.5);
}

TEST(SynthTest, DeterministicAndWorkerIndependent) {
  SynthConfig cfg;
  cfg.n_users = 200;
  const auto a = GenerateTrace(cfg, 1);
  EXPECT_EQ(a, GenerateTrace(cfg, 1));
  EXPECT_EQ(a, GenerateTrace(cfg, 8));
  cfg.rng_seed = 2;
  EXPECT_NE(a, GenerateTrace(cfg, 1));
}

TEST(SynthTest, SortedInsideAreaAndHorizon) {
  SynthConfig cfg;
  cfg.n_users = 300;
  const auto trace = GenerateTrace(cfg);
  EXPECT_TRUE(std::is_sorted(trace.begin(), trace.end(), UpdateLess));
  for (std::size_t i = 0; i < trace.size(); ++i) {
    const auto& u = trace[i];
    EXPECT_LT(u.user, 300u);
    EXPECT_GE(u.x, 0.0);
    EXPECT_LE(u.x, cfg.area_width);
    EXPECT_GE(u.y, 0.0);
    EXPECT_LE(u.y, cfg.area_height);
    EXPECT_GE(u.t, 0);
    EXPECT_LT(u.t, cfg.days * kMinutesPerDay);
    if (i > 0 && trace[i - 1].user == u.user) EXPECT_LT(trace[i - 1].t, u.t);
  }
}

TEST(SynthTest, PopularLocationsAreVisitedMore) {
  SynthConfig cfg;
  cfg.n_users = 500;
  const auto locations = GenerateLocations(cfg);
  const auto trace = GenerateTrace(cfg);
  auto near = [&](const Location& l) {
    std::size_t n = 0;
    for (const auto& u : trace) {
      const double dx = u.x - l.x, dy = u.y - l.y;
      n += dx * dx + dy * dy <= 25.0 ? 1 : 0;
    }
    return n;
  };
  EXPECT_GT(near(locations[0]), near(locations[cfg.n_locations - 1]));
}

TEST(SynthTest, RejectsBadConfig) {
  SynthConfig cfg;
  cfg.active_day_probability = 1.5;
  EXPECT_THROW(GenerateTrace(cfg), std::invalid_argument);
  cfg = {};
  cfg.update_jitter = cfg.update_interval;
  EXPECT_THROW(GenerateTrace(cfg), std::invalid_argument);
  cfg = {};
  cfg.n_locations = 0;
  EXPECT_THROW(GenerateLocations(cfg), std::invalid_argument);
}

}  // namespace
}  // namespace spdt
