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
#include <charconv>
#include <numeric>
#include <string>
#include <stdexcept>

#include <fmt/format.h>

#include "spdt/parallel.h"

namespace spdt {

TauMode ParseTauMode(std::string_view text) {
  if (text == "uniform") return TauMode::kUniform;
  if (text == "mean3") return TauMode::kMean3;
  throw std::invalid_argument(fmt::format("unknown tau mode '{}'", text));
}

std::string_view TauModeName(TauMode mode) {
  return mode == TauMode::kUniform ? "uniform" : "mean3";
}

void SimulationConfig::Validate() const {
  if (seeds < 0) throw std::invalid_argument("seeds must be >= 0");
  if (horizon_days < 1) throw std::invalid_argument("horizon_days must be >= 1");
  if (!(removal_time_min > 0 && removal_time_min <= removal_time_median &&
        removal_time_median <= removal_time_max)) {
    throw std::invalid_argument(fmt::format(
        "removal time median {} outside [{}, {}]", removal_time_median,
        removal_time_min, removal_time_max));
  }
  if (!(sigma > 0)) throw std::invalid_argument("sigma must be > 0");
  if (tau_min_days < 1 || tau_max_days < tau_min_days) {
    throw std::invalid_argument("tau range must satisfy 1 <= min <= max");
  }
  if (runs < 1) throw std::invalid_argument("runs must be >= 1");
  env.Validate();
}

double SampleRemovalTime(double median, double min, double max,
                         StreamRng& rng) {
  if (!(min <= median && median <= max)) {
    throw std::invalid_argument(fmt::format(
        "removal time median {} outside [{}, {}]", median, min, max));
  }
  const bool lower = rng.Uniform() < 0.5;
  return lower ? rng.Uniform(min, median) : rng.Uniform(median, max);
}

double SampleRemovalRate(double median, double min, double max,
                         StreamRng& rng) {
  return 1.0 / SampleRemovalTime(median, min, max, rng);
}

IndexedNetwork::IndexedNetwork(const ContactNetwork& net)
    : horizon_days_(net.horizon_days()), users_(net.users()) {
  auto index_of = [this](UserId id) {
    return static_cast<std::uint32_t>(
        std::lower_bound(users_.begin(), users_.end(), id) - users_.begin());
  };
  links_.reserve(net.links().size());
  day_offsets_.push_back(0);
  for (int d = 0; d < horizon_days_; ++d) {
    for (const auto& l : net.LinksOnDay(d)) {
      links_.push_back({index_of(l.host), index_of(l.neighbour), l.Interval()});
    }
    day_offsets_.push_back(links_.size());
  }
}

std::span<const IndexedNetwork::Link> IndexedNetwork::LinksOnDay(
    int day) const {
  if (day < 0 || day >= horizon_days_) return {};
  const auto d = static_cast<std::size_t>(day);
  return std::span<const Link>(links_).subspan(
      day_offsets_[d], day_offsets_[d + 1] - day_offsets_[d]);
}

namespace {

int DrawTau(const SimulationConfig& cfg, int run, std::size_t individual) {
  if (cfg.tau_mode == TauMode::kMean3) return 3;
  StreamRng rng(cfg.rng_seed, Substream::kInfectiousPeriod,
                {static_cast<std::uint64_t>(run), individual});
  const auto span =
      static_cast<std::uint64_t>(cfg.tau_max_days - cfg.tau_min_days + 1);
  return cfg.tau_min_days + static_cast<int>(rng.Below(span));
}

}  // namespace

std::vector<IndividualState> SeedStates(std::size_t population,
                                        const SimulationConfig& cfg, int run) {
  if (cfg.seeds < 0 || static_cast<std::size_t>(cfg.seeds) > population) {
    throw std::invalid_argument(fmt::format(
        "{} seeds requested for a population of {}", cfg.seeds, population));
  }
  std::vector<IndividualState> states(population);
  std::vector<std::size_t> order(population);
  std::iota(order.begin(), order.end(), 0);
  StreamRng rng(cfg.rng_seed, Substream::kSeedSelection,
                {static_cast<std::uint64_t>(run)});
  for (std::size_t i = 0; i < static_cast<std::size_t>(cfg.seeds); ++i) {
    const std::size_t j = i + rng.Below(population - i);
    std::swap(order[i], order[j]);
    IndividualState& s = states[order[i]];
    s.status = Status::kInfectious;
    s.day_infected = 0;
    s.tau = DrawTau(cfg, run, order[i]);
  }
  return states;
}

DailyStats StepDay(const IndexedNetwork& net,
                   std::vector<IndividualState>& states, int day,
                   const SimulationConfig& cfg, int run,
                   std::int64_t prevalence) {
  DailyStats stats{.day = day};

  for (auto& s : states) {
    if (s.status == Status::kInfectious && day - s.day_infected >= s.tau) {
      s.status = Status::kRecovered;
      ++stats.new_recoveries;
    }
  }

  const auto links = net.LinksOnDay(day);
  const auto run_key = static_cast<std::uint64_t>(run);
  const auto day_key = static_cast<std::uint64_t>(day);
  std::vector<std::uint32_t> infected;
  std::size_t i = 0;
  while (i < links.size()) {
    const std::uint32_t receiver = links[i].neighbour;
    std::size_t group_end = i;
    while (group_end < links.size() && links[group_end].neighbour == receiver) {
      ++group_end;
    }
    if (states[receiver].status == Status::kSusceptible) {
      double dose = 0.0;
      for (std::size_t k = i; k < group_end; ++k) {
        if (!states[links[k].host].TransmitsOn(day)) continue;
        StreamRng rng(cfg.rng_seed, Substream::kRemovalTime,
                      {run_key, day_key, k});
        const double r =
            SampleRemovalRate(cfg.removal_time_median, cfg.removal_time_min,
                              cfg.removal_time_max, rng);
        dose += LinkExposure(cfg.env.WithRemovalRate(r), links[k].interval);
      }
      if (dose > 0.0) {
        StreamRng rng(cfg.rng_seed, Substream::kInfection,
                      {run_key, day_key, receiver});
        if (rng.Uniform() < InfectionProbability(dose, cfg.sigma)) {
          infected.push_back(receiver);
        }
      }
    }
    i = group_end;
  }

  for (std::uint32_t u : infected) {
    IndividualState& s = states[u];
    s.status = Status::kInfectious;
    s.day_infected = day + 1;
    s.tau = DrawTau(cfg, run, u);
  }
  stats.new_infections = static_cast<std::int64_t>(infected.size());
  stats.prevalence = prevalence + stats.new_infections - stats.new_recoveries;
  return stats;
}

std::vector<DailyStats> RunOnce(const IndexedNetwork& net,
                                const SimulationConfig& cfg, int run) {
  std::vector<IndividualState> states =
      SeedStates(net.population(), cfg, run);
  std::vector<DailyStats> out;
  out.reserve(static_cast<std::size_t>(cfg.horizon_days));
  std::int64_t prevalence = cfg.seeds;
  for (int day = 0; day < cfg.horizon_days; ++day) {
    out.push_back(StepDay(net, states, day, cfg, run, prevalence));
    prevalence = out.back().prevalence;
  }
  return out;
}

std::vector<std::vector<DailyStats>> RunSimulation(const IndexedNetwork& net,
                                                   const SimulationConfig& cfg,
                                                   int workers) {
  cfg.Validate();
  if (static_cast<std::size_t>(cfg.seeds) > net.population()) {
    throw std::invalid_argument(
        fmt::format("{} seeds requested for a population of {}", cfg.seeds,
                    net.population()));
  }
  std::vector<std::vector<DailyStats>> runs(static_cast<std::size_t>(cfg.runs));
  ParallelFor(runs.size(), workers, [&](std::size_t run) {
    runs[run] = RunOnce(net, cfg, static_cast<int>(run));
  });
  return runs;
}

std::vector<std::vector<DailyStats>> RunSimulation(const ContactNetwork& net,
                                                   const SimulationConfig& cfg,
                                                   int workers) {
  return RunSimulation(IndexedNetwork(net), cfg, workers);
}

void WriteDailyCsv(std::ostream& out,
                   std::span<const std::vector<DailyStats>> runs) {
  out << "run,day,I_n,I_r,I_p\n";
  for (std::size_t run = 0; run < runs.size(); ++run) {
    for (const auto& s : runs[run]) {
      out << fmt::format("{},{},{},{},{}\n", run, s.day, s.new_infections,
                         s.new_recoveries, s.prevalence);
    }
  }
}

std::vector<std::vector<DailyStats>> ReadDailyCsv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("run,day,I_n,I_r,I_p", 0) != 0) {
    throw std::runtime_error("expected daily CSV header run,day,I_n,I_r,I_p");
  }
  std::vector<std::vector<DailyStats>> runs;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::int64_t v[5];
    const char* p = line.data();
    const char* end = line.data() + line.size();
    for (int f = 0; f < 5; ++f) {
      const auto r = std::from_chars(p, end, v[f]);
      const bool last = f == 4;
      if (r.ec != std::errc() || (last ? r.ptr != end : *r.ptr != ',')) {
        throw std::runtime_error(fmt::format("malformed daily row '{}'", line));
      }
      p = r.ptr + (last ? 0 : 1);
    }
    const auto run = static_cast<std::size_t>(v[0]);
    if (v[0] < 0 || run > runs.size()) {
      throw std::runtime_error("daily CSV runs out of order");
    }
    if (run == runs.size()) runs.emplace_back();
    if (v[1] != static_cast<std::int64_t>(runs[run].size())) {
      throw std::runtime_error("daily CSV days out of order");
    }
    runs[run].push_back({static_cast<int>(v[1]), v[2], v[3], v[4]});
  }
  return runs;
}

}  // namespace spdt
