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

#ifndef SPDT_EPIDEMIC_H_
#define SPDT_EPIDEMIC_H_

#include <cstdint>
#include <istream>
#include <ostream>
#include <span>
#include <string_view>
#include <vector>

#include "spdt/exposure.h"
#include "spdt/network.h"
#include "spdt/rng.h"

namespace spdt {

enum class TauMode {
  kUniform,  // integer days uniform on [tau_min_days, tau_max_days]
  kMean3,    // always 3 days
};

TauMode ParseTauMode(std::string_view text);
std::string_view TauModeName(TauMode mode);

struct SimulationConfig {
  int seeds = 500;
  int horizon_days = 32;
  double removal_time_median = 60.0;  // r_t, minutes
  double removal_time_min = 7.5;      // minutes
  double removal_time_max = 300.0;    // minutes
  double sigma = 0.33;                // per PFU
  int tau_min_days = 3;
  int tau_max_days = 5;
  TauMode tau_mode = TauMode::kUniform;
  std::uint64_t rng_seed = 1;
  int runs = 1;
  // Particle generation, volume and ventilation. The removal rate is drawn
  // per link, so env.removal_rate is ignored by the engine.
  EnvironmentParams env = DefaultEnvironment();

  // Throws std::invalid_argument on an inconsistent configuration.
  void Validate() const;
};

enum class Status : std::uint8_t { kSusceptible, kInfectious, kRecovered };

struct IndividualState {
  Status status = Status::kSusceptible;
  // First day on which the individual transmits; -1 while susceptible.
  int day_infected = -1;
  int tau = 0;

  // Infectious individuals still in their latent day do not transmit.
  bool TransmitsOn(int day) const {
    return status == Status::kInfectious && day_infected <= day;
  }
};

struct DailyStats {
  int day = 0;
  std::int64_t new_infections = 0;   // I_n
  std::int64_t new_recoveries = 0;   // I_r
  std::int64_t prevalence = 0;       // I_p, infected and not yet recovered

  friend bool operator==(const DailyStats&, const DailyStats&) = default;
};

// Removal time b (minutes) with median `median`: with probability 1/2
// uniform on [min, median], else uniform on [median, max].
double SampleRemovalTime(double median, double min, double max,
                         StreamRng& rng);
// 1 / SampleRemovalTime, per minute.
double SampleRemovalRate(double median, double min, double max,
                         StreamRng& rng);

// Network with user ids replaced by dense indices, used by the engine.
class IndexedNetwork {
 public:
  struct Link {
    std::uint32_t host;
    std::uint32_t neighbour;
    LinkInterval interval;
  };

  explicit IndexedNetwork(const ContactNetwork& net);

  std::size_t population() const { return users_.size(); }
  int horizon_days() const { return horizon_days_; }
  const std::vector<UserId>& users() const { return users_; }
  // Links of `day`, grouped by neighbour in ascending index order.
  std::span<const Link> LinksOnDay(int day) const;

 private:
  int horizon_days_;
  std::vector<UserId> users_;
  std::vector<Link> links_;
  std::vector<std::size_t> day_offsets_;
};

// Initial states of run `run`: `cfg.seeds` individuals drawn uniformly
// without replacement are infectious from day 0. Returns the states and
// the seed count in `prevalence`.
std::vector<IndividualState> SeedStates(std::size_t population,
                                        const SimulationConfig& cfg, int run);

// Advances one day in place. Recoveries are applied first, then every
// susceptible sums the doses of the day's links from transmitting hosts and
// is infected with probability 1 - exp(-sigma E), becoming infectious the
// following day. `prevalence` is the previous day's I_p.
DailyStats StepDay(const IndexedNetwork& net,
                   std::vector<IndividualState>& states, int day,
                   const SimulationConfig& cfg, int run,
                   std::int64_t prevalence);

// One full run: seeding plus `cfg.horizon_days` steps.
std::vector<DailyStats> RunOnce(const IndexedNetwork& net,
                                const SimulationConfig& cfg, int run);

// `cfg.runs` independent runs on up to `workers` threads. Outputs depend
// only on (network, cfg), never on the worker count.
std::vector<std::vector<DailyStats>> RunSimulation(const ContactNetwork& net,
                                                   const SimulationConfig& cfg,
                                                   int workers = 1);
std::vector<std::vector<DailyStats>> RunSimulation(const IndexedNetwork& net,
                                                   const SimulationConfig& cfg,
                                                   int workers = 1);

// `run,day,I_n,I_r,I_p` rows for every run.
void WriteDailyCsv(std::ostream& out,
                   std::span<const std::vector<DailyStats>> runs);

// Inverse of WriteDailyCsv. Runs must be numbered 0..n-1 with days in
// order; throws std::runtime_error otherwise.
std::vector<std::vector<DailyStats>> ReadDailyCsv(std::istream& in);

}  // namespace spdt

#endif  // SPDT_EPIDEMIC_H_
