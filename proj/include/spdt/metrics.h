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

#ifndef SPDT_METRICS_H_
#define SPDT_METRICS_H_

#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "spdt/epidemic.h"
#include "spdt/exposure.h"
#include "spdt/network.h"

namespace spdt {

// Daily R_t = I_n / I_r, undefined on days without recoveries. R_e is the
// mean of the defined values and is itself undefined if none are.
struct ReproductionSeries {
  std::vector<std::optional<double>> daily;
  std::optional<double> effective;
};

ReproductionSeries ComputeReproductionSeries(std::span<const DailyStats> stats);

struct RunSummary {
  std::int64_t outbreak_size = 0;  // sum of I_n; seeds are not counted
  std::optional<double> effective_r;
  std::optional<double> initial_r;  // first defined R_t
};

RunSummary SummarizeRun(std::span<const DailyStats> stats);

// Undirected, unweighted graph over a fixed node set.
class StaticGraph {
 public:
  StaticGraph() = default;
  // Nodes are sorted and deduplicated. Edges naming unknown nodes or
  // self-loops throw std::invalid_argument; duplicates collapse.
  StaticGraph(std::vector<UserId> nodes,
              std::span<const std::pair<UserId, UserId>> edges);

  std::size_t node_count() const { return nodes_.size(); }
  std::size_t edge_count() const { return edge_count_; }
  const std::vector<UserId>& nodes() const { return nodes_; }
  // Sorted neighbour indices of node `i`.
  const std::vector<std::uint32_t>& Neighbours(std::size_t i) const {
    return adjacency_[i];
  }
  bool HasEdge(UserId a, UserId b) const;
  // Canonical (min, max) edge list, sorted.
  std::vector<std::pair<UserId, UserId>> Edges() const;

 private:
  std::vector<UserId> nodes_;
  std::vector<std::vector<std::uint32_t>> adjacency_;
  std::size_t edge_count_ = 0;
};

struct EdgeRule {
  double removal_time = 60.0;  // r_t, minutes; r = 1 / r_t
  double threshold = 0.01;     // minimum link dose (PFU) for an edge
  EnvironmentParams env = DefaultEnvironment();
};

// Edge (u, v) iff some link between u and v, in either direction, delivers
// a dose >= threshold at r = 1 / removal_time. `day` restricts the links
// to one day. Nodes are `universe` if given, else the network's users.
StaticGraph BuildStaticGraph(const ContactNetwork& net, const EdgeRule& rule,
                             std::optional<int> day = std::nullopt,
                             const std::vector<UserId>* universe = nullptr);

// degree -> number of nodes with that degree.
std::map<std::size_t, std::size_t> DegreeDistribution(const StaticGraph& g);

struct ClusteringResult {
  std::vector<double> local;  // indexed like g.nodes()
  double mean = 0.0;          // 0 for an empty graph
};

// c(v) = 2 T(v) / (d(v)(d(v) - 1)) for d(v) >= 2, else 0.
ClusteringResult LocalClustering(const StaticGraph& g);

double MeanDegree(const StaticGraph& g);

struct DailyMetricRow {
  int day;
  double removal_time;
  double mean_degree;
  double mean_clustering;
};

// One graph per (day, removal time). Every graph uses the same node set
// (`universe` or the network's users), so means are comparable between a
// network and its projections when the same universe is passed.
std::vector<DailyMetricRow> DailyNetworkMetrics(
    const ContactNetwork& net, std::span<const double> removal_times,
    const EnvironmentParams& env = DefaultEnvironment(),
    double threshold = 0.01, const std::vector<UserId>* universe = nullptr);

// `day,mean_degree,mean_clustering,r_t,variant`
void WriteDailyMetricsCsv(std::ostream& out,
                          std::span<const DailyMetricRow> rows,
                          std::string_view variant, bool header = true);
// `value,count`
void WriteHistogramCsv(std::ostream& out,
                       const std::map<std::size_t, std::size_t>& histogram);
// Clustering coefficients binned to `bins` equal-width bins on [0, 1];
// rows are `value,count` with value the bin's lower edge.
void WriteClusteringHistogramCsv(std::ostream& out,
                                 const ClusteringResult& clustering,
                                 int bins = 20);

}  // namespace spdt

#endif  // SPDT_METRICS_H_
