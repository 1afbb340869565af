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

#include "spdt/metrics.h"

#include <algorithm>
#include <random>
#include <sstream>
#include <vector>

#include <gtest/gtest.h>

#include "oracles.h"

namespace spdt {
namespace {

using Edge = std::pair<UserId, UserId>;

std::vector<UserId> Iota(std::size_t n) {
  std::vector<UserId> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = i;
  return v;
}

std::vector<DailyStats> Stats(
    std::initializer_list<std::pair<std::int64_t, std::int64_t>> nr) {
  std::vector<DailyStats> out;
  int day = 0;
  for (auto [n, r] : nr) out.push_back({day++, n, r, 0});
  return out;
}

TEST(ReproductionTest, RatioWhereDefined) {
  const auto series = ComputeReproductionSeries(Stats({{4, 0}, {6, 3}, {2, 2}, {0, 5}}));
  ASSERT_EQ(series.daily.size(), 4u);
  EXPECT_FALSE(series.daily[0].has_value());
  EXPECT_DOUBLE_EQ(*series.daily[1], 2.0);
  EXPECT_DOUBLE_EQ(*series.daily[2], 1.0);
  EXPECT_DOUBLE_EQ(*series.daily[3], 0.0);
  EXPECT_DOUBLE_EQ(*series.effective, 1.0);
}

TEST(ReproductionTest, ConstantMultipleGivesExactRatio) {
  for (std::int64_t k : {1, 2, 7}) {
    const auto s = SummarizeRun(Stats({{3 * k, 3}, {5 * k, 5}, {k, 1}}));
    EXPECT_EQ(*s.effective_r, static_cast<double>(k));
    EXPECT_EQ(*s.initial_r, static_cast<double>(k));
    EXPECT_EQ(s.outbreak_size, 9 * k);
  }
}

TEST(ReproductionTest, UndefinedWithoutRecoveries) {
  const auto s = SummarizeRun(Stats({{1, 0}, {2, 0}}));
  EXPECT_FALSE(s.effective_r.has_value());
  EXPECT_FALSE(s.initial_r.has_value());
  EXPECT_EQ(s.outbreak_size, 3);
  EXPECT_EQ(SummarizeRun({}).outbreak_size, 0);
}

TEST(StaticGraphTest, RejectsBadEdges) {
  const std::vector<Edge> self = {{1, 1}};
  const std::vector<Edge> unknown = {{1, 9}};
  EXPECT_THROW(StaticGraph({1, 2}, self), std::invalid_argument);
  EXPECT_THROW(StaticGraph({1, 2}, unknown), std::invalid_argument);
}

TEST(StaticGraphTest, DuplicatesAndDirectionCollapse) {
  const std::vector<Edge> edges = {{1, 2}, {2, 1}, {1, 2}, {3, 2}};
  const StaticGraph g({3, 2, 1, 2}, edges);
  EXPECT_EQ(g.node_count(), 3u);
  EXPECT_EQ(g.edge_count(), 2u);
  EXPECT_TRUE(g.HasEdge(2, 1));
  EXPECT_FALSE(g.HasEdge(1, 3));
  EXPECT_EQ(g.Edges(), (std::vector<Edge>{{1, 2}, {2, 3}}));
}

TEST(DegreeTest, TriangleStarEmpty) {
  const std::vector<Edge> tri = {{0, 1}, {1, 2}, {0, 2}};
  EXPECT_EQ(DegreeDistribution(StaticGraph(Iota(3), tri)),
            (std::map<std::size_t, std::size_t>{{2, 3}}));
  std::vector<Edge> star;
  for (UserId v = 1; v < 6; ++v) star.push_back({0, v});
  const StaticGraph s(Iota(6), star);
  EXPECT_EQ(DegreeDistribution(s),
            (std::map<std::size_t, std::size_t>{{1, 5}, {5, 1}}));
  EXPECT_DOUBLE_EQ(MeanDegree(s), 10.0 / 6.0);
  EXPECT_TRUE(DegreeDistribution(StaticGraph()).empty());
  EXPECT_EQ(MeanDegree(StaticGraph()), 0.0);
}

TEST(ClusteringTest, CompleteStarAndChordedCycle) {
  std::vector<Edge> k4;
  for (UserId a = 0; a < 4; ++a) {
    for (UserId b = a + 1; b < 4; ++b) k4.push_back({a, b});
  }
  for (double c : LocalClustering(StaticGraph(Iota(4), k4)).local) {
    EXPECT_EQ(c, 1.0);
  }
  std::vector<Edge> star;
  for (UserId v = 1; v < 6; ++v) star.push_back({0, v});
  EXPECT_EQ(LocalClustering(StaticGraph(Iota(6), star)).mean, 0.0);

  // Cycle 0-1-2-3-0 plus chord 0-2: triangles 012 and 023.
  const std::vector<Edge> cc = {{0, 1}, {1, 2}, {2, 3}, {3, 0}, {0, 2}};
  const auto r = LocalClustering(StaticGraph(Iota(4), cc));
  EXPECT_EQ(r.local, (std::vector<double>{2.0 / 3.0, 1.0, 2.0 / 3.0, 1.0}));
  EXPECT_DOUBLE_EQ(r.mean, 10.0 / 12.0);
  EXPECT_EQ(LocalClustering(StaticGraph()).mean, 0.0);
}

TEST(ClusteringTest, MatchesBruteForceOnRandomGraphs) {
  std::mt19937_64 gen(99);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 1 + gen() % 50;
    const double p = std::uniform_real_distribution<double>(0, 1)(gen);
    std::vector<std::vector<bool>> adj(n, std::vector<bool>(n, false));
    std::vector<Edge> edges;
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = a + 1; b < n; ++b) {
        if (std::bernoulli_distribution(p)(gen)) {
          adj[a][b] = adj[b][a] = true;
          edges.push_back({a, b});
        }
      }
    }
    const auto want = testing::BruteForceClustering(n, adj);
    EXPECT_EQ(LocalClustering(StaticGraph(Iota(n), edges)).local, want)
        << "trial " << trial;
  }
}

TEST(EdgeRuleTest, ThresholdDecidesEdges) {
  const auto net = ContactNetwork::FromLinks(
      1, {{0, 1, 2, 0, 60, 10, 40},      // ~0.033 PFU
          {0, 3, 4, 0, 30, 229, 230},    // tiny late indirect dose
          {0, 5, 6, 0, 30, 10, 10}});    // zero-length window
  const StaticGraph g = BuildStaticGraph(net, {});
  EXPECT_TRUE(g.HasEdge(1, 2));
  EXPECT_FALSE(g.HasEdge(3, 4));
  EXPECT_FALSE(g.HasEdge(5, 6));
  EXPECT_EQ(g.node_count(), 6u);
  EXPECT_EQ(BuildStaticGraph(net, {.threshold = 0.05}).edge_count(), 0u);
}

TEST(EdgeRuleTest, RaisingThresholdNeverAddsEdges) {
  const auto net =
      BuildNetwork(testing::SmallTrace(5), {.horizon_days = 7});
  std::vector<Edge> previous;
  bool first = true;
  for (double th : {0.0, 0.001, 0.01, 0.05, 0.2}) {
    const auto edges = BuildStaticGraph(net, {.threshold = th}).Edges();
    if (!first) {
      EXPECT_TRUE(std::includes(previous.begin(), previous.end(),
                                edges.begin(), edges.end()));
    }
    previous = edges;
    first = false;
  }
}

TEST(DominanceTest, SpstNeverExceedsSpdt) {
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    const auto sdt =
        BuildNetwork(testing::SmallTrace(seed), {.horizon_days = 7});
    const auto sst = ProjectSpst(sdt);
    const auto* universe = &sdt.users();
    for (double rt : {10.0, 35.0, 60.0}) {
      const EdgeRule rule{.removal_time = rt};
      const auto a = BuildStaticGraph(sdt, rule, std::nullopt, universe);
      const auto b = BuildStaticGraph(sst, rule, std::nullopt, universe);
      const auto ea = a.Edges(), eb = b.Edges();
      EXPECT_TRUE(std::includes(ea.begin(), ea.end(), eb.begin(), eb.end()));
      EXPECT_LE(MeanDegree(b), MeanDegree(a));
    }
    const std::vector<double> rts = {10, 35, 60};
    const auto da = DailyNetworkMetrics(sdt, rts, DefaultEnvironment(), 0.01,
                                        universe);
    const auto db = DailyNetworkMetrics(sst, rts, DefaultEnvironment(), 0.01,
                                        universe);
    ASSERT_EQ(da.size(), db.size());
    for (std::size_t i = 0; i < da.size(); ++i) {
      EXPECT_LE(db[i].mean_degree, da[i].mean_degree);
    }
  }
}

TEST(DailyMetricsTest, SingleDayEqualsStaticGraph) {
  const auto full =
      BuildNetwork(testing::SmallTrace(8), {.horizon_days = 7});
  const auto day2 = full.LinksOnDay(2);
  const auto net = ContactNetwork::FromLinks(
      7, std::vector<SpdtLink>(day2.begin(), day2.end()));
  const std::vector<double> rts = {30};
  const auto rows = DailyNetworkMetrics(net, rts);
  ASSERT_EQ(rows.size(), 7u);
  const auto g = BuildStaticGraph(net, {.removal_time = 30});
  EXPECT_DOUBLE_EQ(rows[2].mean_degree, MeanDegree(g));
  EXPECT_DOUBLE_EQ(rows[2].mean_clustering, LocalClustering(g).mean);
  EXPECT_EQ(rows[0].mean_degree, 0.0);
}

TEST(DailyMetricsTest, SpdtDegreeGrowsWithRemovalTime) {
  const auto net =
      BuildNetwork(testing::SmallTrace(9), {.horizon_days = 7});
  const std::vector<double> rts = {10, 20, 30, 40, 50, 60};
  const auto rows = DailyNetworkMetrics(net, rts);
  for (int day = 0; day < 7; ++day) {
    double last = -1;
    for (const auto& r : rows) {
      if (r.day != day) continue;
      EXPECT_GE(r.mean_degree, last);
      last = r.mean_degree;
    }
  }
}

TEST(CsvTest, Headers) {
  std::ostringstream a, b, c;
  WriteDailyMetricsCsv(a, std::vector<DailyMetricRow>{{0, 10, 1.5, 0.25}},
                       "SDT");
  EXPECT_EQ(a.str(), "day,mean_degree,mean_clustering,r_t,variant\n"
                     "0,1.5,0.25,10,SDT\n");
  WriteHistogramCsv(b, {{1, 5}, {5, 1}});
  EXPECT_EQ(b.str(), "value,count\n1,5\n5,1\n");
  ClusteringResult cr{{0.0, 1.0, 0.5, 0.52}, 0.0};
  WriteClusteringHistogramCsv(c, cr, 4);
  EXPECT_EQ(c.str(), "value,count\n0,1\n0.25,0\n0.5,2\n0.75,1\n");
}

}  // namespace
}  // namespace spdt
