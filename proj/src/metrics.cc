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
#include <iterator>
#include <stdexcept>

#include <fmt/format.h>

namespace spdt {

ReproductionSeries ComputeReproductionSeries(
    std::span<const DailyStats> stats) {
  ReproductionSeries out;
  out.daily.reserve(stats.size());
  double sum = 0.0;
  std::size_t defined = 0;
  for (const auto& s : stats) {
    if (s.new_recoveries > 0) {
      const double r = static_cast<double>(s.new_infections) /
                       static_cast<double>(s.new_recoveries);
      out.daily.emplace_back(r);
      sum += r;
      ++defined;
    } else {
      out.daily.emplace_back(std::nullopt);
    }
  }
  if (defined > 0) out.effective = sum / static_cast<double>(defined);
  return out;
}

RunSummary SummarizeRun(std::span<const DailyStats> stats) {
  RunSummary out;
  for (const auto& s : stats) out.outbreak_size += s.new_infections;
  const ReproductionSeries series = ComputeReproductionSeries(stats);
  out.effective_r = series.effective;
  for (const auto& r : series.daily) {
    if (r) {
      out.initial_r = r;
      break;
    }
  }
  return out;
}

StaticGraph::StaticGraph(std::vector<UserId> nodes,
                         std::span<const std::pair<UserId, UserId>> edges)
    : nodes_(std::move(nodes)) {
  std::sort(nodes_.begin(), nodes_.end());
  nodes_.erase(std::unique(nodes_.begin(), nodes_.end()), nodes_.end());
  adjacency_.resize(nodes_.size());
  auto index_of = [this](UserId id) {
    const auto it = std::lower_bound(nodes_.begin(), nodes_.end(), id);
    if (it == nodes_.end() || *it != id) {
      throw std::invalid_argument(fmt::format("edge names unknown node {}", id));
    }
    return static_cast<std::uint32_t>(it - nodes_.begin());
  };
  for (const auto& [a, b] : edges) {
    if (a == b) throw std::invalid_argument("self-loop in static graph");
    const std::uint32_t ia = index_of(a);
    const std::uint32_t ib = index_of(b);
    adjacency_[ia].push_back(ib);
    adjacency_[ib].push_back(ia);
  }
  for (auto& adj : adjacency_) {
    std::sort(adj.begin(), adj.end());
    adj.erase(std::unique(adj.begin(), adj.end()), adj.end());
    edge_count_ += adj.size();
  }
  edge_count_ /= 2;
}

bool StaticGraph::HasEdge(UserId a, UserId b) const {
  const auto ia = std::lower_bound(nodes_.begin(), nodes_.end(), a);
  const auto ib = std::lower_bound(nodes_.begin(), nodes_.end(), b);
  if (ia == nodes_.end() || *ia != a || ib == nodes_.end() || *ib != b) {
    return false;
  }
  const auto& adj = adjacency_[ia - nodes_.begin()];
  return std::binary_search(adj.begin(), adj.end(),
                            static_cast<std::uint32_t>(ib - nodes_.begin()));
}

std::vector<std::pair<UserId, UserId>> StaticGraph::Edges() const {
  std::vector<std::pair<UserId, UserId>> out;
  out.reserve(edge_count_);
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    for (std::uint32_t j : adjacency_[i]) {
      if (i < j) out.emplace_back(nodes_[i], nodes_[j]);
    }
  }
  return out;
}

StaticGraph BuildStaticGraph(const ContactNetwork& net, const EdgeRule& rule,
                             std::optional<int> day,
                             const std::vector<UserId>* universe) {
  const EnvironmentParams env = rule.env.WithRemovalRate(1.0 / rule.removal_time);
  env.Validate();
  const auto links = day ? net.LinksOnDay(*day) : net.links();
  std::vector<std::pair<UserId, UserId>> edges;
  for (const auto& l : links) {
    if (LinkExposure(env, l.Interval()) >= rule.threshold) {
      edges.emplace_back(std::min(l.host, l.neighbour),
                         std::max(l.host, l.neighbour));
    }
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  return StaticGraph(universe ? *universe : net.users(), edges);
}

std::map<std::size_t, std::size_t> DegreeDistribution(const StaticGraph& g) {
  std::map<std::size_t, std::size_t> hist;
  for (std::size_t i = 0; i < g.node_count(); ++i) {
    ++hist[g.Neighbours(i).size()];
  }
  return hist;
}

ClusteringResult LocalClustering(const StaticGraph& g) {
  ClusteringResult out;
  out.local.assign(g.node_count(), 0.0);
  double sum = 0.0;
  for (std::size_t v = 0; v < g.node_count(); ++v) {
    const auto& nv = g.Neighbours(v);
    const std::size_t d = nv.size();
    if (d < 2) continue;
    // Each triangle through v is seen twice, once from each other corner.
    std::size_t twice_triangles = 0;
    for (std::uint32_t u : nv) {
      const auto& nu = g.Neighbours(u);
      auto a = nv.begin();
      auto b = nu.begin();
      while (a != nv.end() && b != nu.end()) {
        if (*a < *b) {
          ++a;
        } else if (*b < *a) {
          ++b;
        } else {
          ++twice_triangles;
          ++a;
          ++b;
        }
      }
    }
    const std::size_t triangles = twice_triangles / 2;
    out.local[v] = 2.0 * static_cast<double>(triangles) /
                   (static_cast<double>(d) * static_cast<double>(d - 1));
    sum += out.local[v];
  }
  if (g.node_count() > 0) out.mean = sum / static_cast<double>(g.node_count());
  return out;
}

double MeanDegree(const StaticGraph& g) {
  if (g.node_count() == 0) return 0.0;
  return 2.0 * static_cast<double>(g.edge_count()) /
         static_cast<double>(g.node_count());
}

std::vector<DailyMetricRow> DailyNetworkMetrics(
    const ContactNetwork& net, std::span<const double> removal_times,
    const EnvironmentParams& env, double threshold,
    const std::vector<UserId>* universe) {
  std::vector<DailyMetricRow> rows;
  for (double rt : removal_times) {
    const EdgeRule rule{.removal_time = rt, .threshold = threshold, .env = env};
    for (int d = 0; d < net.horizon_days(); ++d) {
      const StaticGraph g = BuildStaticGraph(net, rule, d, universe);
      rows.push_back({d, rt, MeanDegree(g), LocalClustering(g).mean});
    }
  }
  return rows;
}

void WriteDailyMetricsCsv(std::ostream& out,
                          std::span<const DailyMetricRow> rows,
                          std::string_view variant, bool header) {
  if (header) out << "day,mean_degree,mean_clustering,r_t,variant\n";
  for (const auto& r : rows) {
    out << fmt::format("{},{:.10g},{:.10g},{:g},{}\n", r.day, r.mean_degree,
                       r.mean_clustering, r.removal_time, variant);
  }
}

void WriteHistogramCsv(std::ostream& out,
                       const std::map<std::size_t, std::size_t>& histogram) {
  out << "value,count\n";
  for (const auto& [value, count] : histogram) {
    out << value << ',' << count << '\n';
  }
}

void WriteClusteringHistogramCsv(std::ostream& out,
                                 const ClusteringResult& clustering,
                                 int bins) {
  if (bins < 1) throw std::invalid_argument("bins must be >= 1");
  std::vector<std::size_t> counts(static_cast<std::size_t>(bins), 0);
  for (double c : clustering.local) {
    auto b = static_cast<std::size_t>(c * bins);
    counts[std::min(b, counts.size() - 1)]++;
  }
  out << "value,count\n";
  for (int b = 0; b < bins; ++b) {
    out << fmt::format("{:g},{}\n", static_cast<double>(b) / bins,
                       counts[static_cast<std::size_t>(b)]);
  }
}

}  // namespace spdt
