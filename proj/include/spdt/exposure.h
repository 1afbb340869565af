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

#ifndef SPDT_EXPOSURE_H_
#define SPDT_EXPOSURE_H_

#include <ostream>
#include <span>
#include <vector>

namespace spdt {

// Airborne particle model of one interaction location. All quantities use
// the canonical units of this library: minutes, cubic metres and PFU.
struct EnvironmentParams {
  double generation_rate;    // g, PFU per minute
  double volume;             // V, cubic metres
  double pulmonary_rate;     // p, cubic metres per minute
  double removal_rate;       // r, per minute

  // Throws std::invalid_argument unless every field is finite and > 0.
  void Validate() const;

  // g / (rV), the concentration reached after an infinitely long stay.
  double SteadyStateConcentration() const;

  EnvironmentParams WithRemovalRate(double r) const;
};

// Default environment: g = 0.304 PFU/s, V = 2512 m^3, p = 7.5 L/min,
// removal time 60 minutes.
EnvironmentParams DefaultEnvironment();

// Converts the commonly quoted units into canonical ones.
constexpr double PfuPerSecondToPerMinute(double g) { return g * 60.0; }
constexpr double LitresToCubicMetres(double l) { return l / 1000.0; }

// Host presence [host_arrival, host_departure] and neighbour presence
// [neighbour_arrival, neighbour_departure], in minutes.
struct LinkInterval {
  double host_arrival;
  double host_departure;
  double neighbour_arrival;
  double neighbour_departure;
};

enum class LinkCase { kDirectOnly, kMixed, kIndirectOnly };

std::ostream& operator<<(std::ostream& os, LinkCase c);

// Throws std::invalid_argument if the host or neighbour interval is
// reversed, or if the neighbour leaves before the host arrives.
void ValidateLinkInterval(const LinkInterval& link);

// Classification by where the neighbour departure falls relative to the
// host departure. The effective neighbour arrival is clamped to the host
// arrival before classifying.
LinkCase Classify(const LinkInterval& link);

// Concentration at time t while the host is still present.
double ConcentrationDuringPresence(const EnvironmentParams& env,
                                   double host_arrival, double t);

// Concentration at time t >= host_departure once the host has left.
double ConcentrationAfterDeparture(const EnvironmentParams& env,
                                   double host_arrival, double host_departure,
                                   double t);

// Concentration at any t >= host_arrival, switching regime at departure.
double Concentration(const EnvironmentParams& env, double host_arrival,
                     double host_departure, double t);

// Dose inhaled over [from, to] while the host is present
// (host_arrival <= from <= to <= host_departure).
double DirectSegmentDose(const EnvironmentParams& env, double host_arrival,
                         double from, double to);

// Dose inhaled over [from, to] after the host left
// (host_departure <= from <= to).
double IndirectSegmentDose(const EnvironmentParams& env, double host_arrival,
                           double host_departure, double from, double to);

// Total dose received by the neighbour over one link. The neighbour only
// inhales while present, so integration runs over
// [max(host_arrival, neighbour_arrival), neighbour_departure] with the
// concentration referenced to the host's true arrival.
double LinkExposure(const EnvironmentParams& env, const LinkInterval& link);

// Single-expression form selecting the upper bound of the linear term by
// link case. Algebraically identical to LinkExposure; kept for
// cross-checking. Evaluated relative to the host arrival so large absolute
// timestamps do not overflow.
double LinkExposureMerged(const EnvironmentParams& env,
                          const LinkInterval& link);

// Sum of per-link doses; entries must be non-negative.
double TotalExposure(std::span<const double> exposures);

// Dose-response: 1 - exp(-sigma * dose).
double InfectionProbability(double dose, double sigma);

struct ConcentrationSample {
  double time;
  double concentration;
};

// Samples the rise on [host_arrival, host_departure] and the decay on
// [host_departure, horizon] every `step` minutes. Both phase endpoints are
// always included; the departure instant appears once.
std::vector<ConcentrationSample> EmitConcentrationCurve(
    const EnvironmentParams& env, double host_arrival, double host_departure,
    double horizon, double step);

// CSV with header `time_min,concentration_pfu_m3`.
void WriteConcentrationCsv(std::ostream& os,
                           std::span<const ConcentrationSample> curve);

}  // namespace spdt

#endif  // SPDT_EXPOSURE_H_
