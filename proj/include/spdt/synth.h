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

#ifndef SPDT_SYNTH_H_
#define SPDT_SYNTH_H_

#include <cstdint>
#include <vector>

#include "spdt/trace.h"

namespace spdt {

// City-scale synthetic trace. Users are active on a random subset of days;
// on an active day they make a chain of visits to locations drawn with
// Zipf-distributed popularity and report their position about every
// `update_interval` minutes while there.
struct SynthConfig {
  int n_users = 1000;
  int n_locations = 500;
  double area_width = 10000.0;   // metres
  double area_height = 10000.0;  // metres
  int days = 32;
  // Mean active days = days * active_day_probability (3.5 by default).
  double active_day_probability = 3.5 / 32.0;
  int visits_per_day_min = 1;
  int visits_per_day_max = 4;
  double visit_minutes_min = 15.0;
  double visit_minutes_max = 180.0;
  double travel_minutes_min = 10.0;
  double travel_minutes_max = 60.0;
  double update_interval = 15.0;  // minutes
  double update_jitter = 3.0;     // +/- minutes around each report
  double position_jitter = 5.0;   // metres from the location centre
  double day_start_minutes = 7 * 60.0;
  double day_end_minutes = 22 * 60.0;
  double zipf_exponent = 1.0;
  std::uint64_t rng_seed = 1;

  // Throws std::invalid_argument on an inconsistent configuration.
  void Validate() const;
};

struct Location {
  double x;
  double y;
};

// 2,000 users over 14 days, each active on 3.5 days on average, visiting
// 5,000 candidate locations.
SynthConfig DeskSynthConfig();

// Location centres, by popularity rank (index 0 is the most popular).
std::vector<Location> GenerateLocations(const SynthConfig& cfg);

// Updates sorted with UpdateLess; user ids are 0 .. n_users-1. Positions
// stay inside [0, area_width] x [0, area_height].
std::vector<LocationUpdate> GenerateTrace(const SynthConfig& cfg,
                                          int workers = 1);

}  // namespace spdt

#endif  // SPDT_SYNTH_H_
