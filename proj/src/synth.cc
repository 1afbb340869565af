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
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "spdt/parallel.h"
#include "spdt/rng.h"

namespace spdt {

void SynthConfig::Validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(what);
  };
  require(n_users >= 0, "n_users must be >= 0");
  require(n_locations >= 1, "n_locations must be >= 1");
  require(days >= 1, "days must be >= 1");
  require(area_width > 2 * position_jitter && area_height > 2 * position_jitter,
          "area must exceed the position jitter");
  require(active_day_probability >= 0 && active_day_probability <= 1,
          "active_day_probability must be in [0, 1]");
  require(visits_per_day_min >= 1 && visits_per_day_max >= visits_per_day_min,
          "visits per day must satisfy 1 <= min <= max");
  require(visit_minutes_min >= 0 && visit_minutes_max >= visit_minutes_min,
          "visit duration range is invalid");
  require(travel_minutes_min >= 0 && travel_minutes_max >= travel_minutes_min,
          "travel time range is invalid");
  require(update_interval > 0, "update_interval must be > 0");
  require(update_jitter >= 0 && update_jitter < update_interval / 2,
          "update_jitter must be in [0, update_interval / 2)");
  require(position_jitter >= 0, "position_jitter must be >= 0");
  require(day_start_minutes >= 0 && day_end_minutes > day_start_minutes &&
              day_end_minutes <= kMinutesPerDay,
          "day window must lie within one day");
  require(zipf_exponent >= 0, "zipf_exponent must be >= 0");
}

SynthConfig DeskSynthConfig() {
  SynthConfig cfg;
  cfg.n_users = 2000;
  cfg.n_locations = 5000;
  cfg.days = 14;
  cfg.active_day_probability = 3.5 / 14.0;
  return cfg;
}

std::vector<Location> GenerateLocations(const SynthConfig& cfg) {
  cfg.Validate();
  StreamRng rng(cfg.rng_seed, Substream::kSynthLocations, {});
  std::vector<Location> out(static_cast<std::size_t>(cfg.n_locations));
  const double m = cfg.position_jitter;
  for (auto& loc : out) {
    loc.x = rng.Uniform(m, cfg.area_width - m);
    loc.y = rng.Uniform(m, cfg.area_height - m);
  }
  return out;
}

std::vector<LocationUpdate> GenerateTrace(const SynthConfig& cfg,
                                          int workers) {
  const std::vector<Location> locations = GenerateLocations(cfg);

  // Cumulative Zipf weights over popularity ranks.
  std::vector<double> cdf(locations.size());
  double total = 0.0;
  for (std::size_t k = 0; k < cdf.size(); ++k) {
    total += 1.0 / std::pow(static_cast<double>(k + 1), cfg.zipf_exponent);
    cdf[k] = total;
  }

  std::vector<std::vector<LocationUpdate>> per_user(
      static_cast<std::size_t>(cfg.n_users));
  ParallelFor(per_user.size(), workers, [&](std::size_t user) {
    StreamRng rng(cfg.rng_seed, Substream::kSynthUser, {user});
    auto& out = per_user[user];
    for (int day = 0; day < cfg.days; ++day) {
      if (!rng.Bernoulli(cfg.active_day_probability)) continue;
      const double day_origin = static_cast<double>(day) * kMinutesPerDay;
      const int visits =
          cfg.visits_per_day_min +
          static_cast<int>(rng.Below(static_cast<std::uint64_t>(
              cfg.visits_per_day_max - cfg.visits_per_day_min + 1)));
      double t = cfg.day_start_minutes + rng.Uniform(0.0, 120.0);
      for (int v = 0; v < visits && t < cfg.day_end_minutes; ++v) {
        const double pick = rng.Uniform(0.0, total);
        const auto rank = static_cast<std::size_t>(
            std::upper_bound(cdf.begin(), cdf.end(), pick) - cdf.begin());
        const Location& loc = locations[std::min(rank, locations.size() - 1)];
        const double duration =
            rng.Uniform(cfg.visit_minutes_min, cfg.visit_minutes_max);
        const double leave = std::min(t + duration, cfg.day_end_minutes);
        Minutes previous = -1;
        for (double report = t; report <= leave;
             report += cfg.update_interval) {
          const double jitter =
              report == t ? 0.0
                          : rng.Uniform(-cfg.update_jitter, cfg.update_jitter);
          const auto minute = static_cast<Minutes>(
              std::llround(day_origin + std::min(report + jitter, leave)));
          if (minute <= previous) continue;
          previous = minute;
          const double radius = cfg.position_jitter * std::sqrt(rng.Uniform());
          const double angle = rng.Uniform(0.0, 2.0 * std::numbers::pi);
          out.push_back({static_cast<UserId>(user), minute,
                         loc.x + radius * std::cos(angle),
                         loc.y + radius * std::sin(angle)});
        }
        t = leave + rng.Uniform(cfg.travel_minutes_min, cfg.travel_minutes_max);
      }
    }
  });

  std::vector<LocationUpdate> trace;
  for (auto& u : per_user) trace.insert(trace.end(), u.begin(), u.end());
  std::sort(trace.begin(), trace.end(), UpdateLess);
  return trace;
}

}  // namespace spdt
