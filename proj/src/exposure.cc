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

#include "spdt/exposure.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

namespace spdt {
namespace {

// 1 - e^{-x}.
double OneMinusExp(double x) { return -std::expm1(-x); }

// x - (1 - e^{-x}), which loses all precision to cancellation for small x.
double LinearExcess(double x) {
  if (x < 1e-2) {
    // Alternating series x^2/2! - x^3/3! + ... ; truncation error < x^9/9!.
    double term = x * x / 2.0;
    double sum = term;
    for (int k = 3; k <= 8; ++k) {
      term *= -x / k;
      sum += term;
    }
    return sum;
  }
  return x + std::expm1(-x);
}

void RequireFinite(double v, const char* what) {
  if (!std::isfinite(v)) {
    throw std::invalid_argument(fmt::format("{} must be finite", what));
  }
}

}  // namespace

void EnvironmentParams::Validate() const {
  auto positive = [](double v, const char* name) {
    if (!(std::isfinite(v) && v > 0)) {
      throw std::invalid_argument(
          fmt::format("{} must be finite and > 0, got {}", name, v));
    }
  };
  positive(generation_rate, "generation_rate");
  positive(volume, "volume");
  positive(pulmonary_rate, "pulmonary_rate");
  positive(removal_rate, "removal_rate");
}

double EnvironmentParams::SteadyStateConcentration() const {
  return generation_rate / (removal_rate * volume);
}

EnvironmentParams EnvironmentParams::WithRemovalRate(double r) const {
  EnvironmentParams out = *this;
  out.removal_rate = r;
  return out;
}

EnvironmentParams DefaultEnvironment() {
  return EnvironmentParams{
      .generation_rate = PfuPerSecondToPerMinute(0.304),
      .volume = 2512.0,
      .pulmonary_rate = LitresToCubicMetres(7.5),
      .removal_rate = 1.0 / 60.0,
  };
}

std::ostream& operator<<(std::ostream& os, LinkCase c) {
  switch (c) {
    case LinkCase::kDirectOnly:
      return os << "direct-only";
    case LinkCase::kMixed:
      return os << "mixed";
    case LinkCase::kIndirectOnly:
      return os << "indirect-only";
  }
  return os;
}

void ValidateLinkInterval(const LinkInterval& link) {
  RequireFinite(link.host_arrival, "host_arrival");
  RequireFinite(link.host_departure, "host_departure");
  RequireFinite(link.neighbour_arrival, "neighbour_arrival");
  RequireFinite(link.neighbour_departure, "neighbour_departure");
  if (link.host_departure < link.host_arrival) {
    throw std::invalid_argument("host departs before arriving");
  }
  if (link.neighbour_departure < link.neighbour_arrival) {
    throw std::invalid_argument("neighbour departs before arriving");
  }
  if (link.neighbour_departure < link.host_arrival) {
    throw std::invalid_argument("neighbour departs before host arrives");
  }
}

LinkCase Classify(const LinkInterval& link) {
  const double start = std::max(link.host_arrival, link.neighbour_arrival);
  if (link.neighbour_departure <= link.host_departure) {
    return LinkCase::kDirectOnly;
  }
  if (start < link.host_departure) return LinkCase::kMixed;
  return LinkCase::kIndirectOnly;
}

double ConcentrationDuringPresence(const EnvironmentParams& env,
                                   double host_arrival, double t) {
  if (t < host_arrival) {
    throw std::invalid_argument("concentration queried before host arrival");
  }
  return env.SteadyStateConcentration() *
         OneMinusExp(env.removal_rate * (t - host_arrival));
}

double ConcentrationAfterDeparture(const EnvironmentParams& env,
                                   double host_arrival, double host_departure,
                                   double t) {
  if (host_departure < host_arrival) {
    throw std::invalid_argument("host departs before arriving");
  }
  if (t < host_departure) {
    throw std::invalid_argument("decay queried before host departure");
  }
  const double r = env.removal_rate;
  return env.SteadyStateConcentration() *
         OneMinusExp(r * (host_departure - host_arrival)) *
         std::exp(-r * (t - host_departure));
}

double Concentration(const EnvironmentParams& env, double host_arrival,
                     double host_departure, double t) {
  if (t <= host_departure) {
    return ConcentrationDuringPresence(env, host_arrival, t);
  }
  return ConcentrationAfterDeparture(env, host_arrival, host_departure, t);
}

double DirectSegmentDose(const EnvironmentParams& env, double host_arrival,
                         double from, double to) {
  if (!(host_arrival <= from && from <= to)) {
    throw std::invalid_argument("direct segment bounds out of order");
  }
  const double r = env.removal_rate;
  const double width = r * (to - from);
  const double lead = r * (from - host_arrival);
  // p g/(r^2 V) [ r(to-from) - e^{-r lead}(1 - e^{-r width}) ], rewritten as
  // a sum of two non-negative terms.
  const double bracket =
      LinearExcess(width) + OneMinusExp(lead) * OneMinusExp(width);
  return env.pulmonary_rate * env.SteadyStateConcentration() / r * bracket;
}

double IndirectSegmentDose(const EnvironmentParams& env, double host_arrival,
                           double host_departure, double from, double to) {
  if (!(host_arrival <= host_departure && host_departure <= from &&
        from <= to)) {
    throw std::invalid_argument("indirect segment bounds out of order");
  }
  const double r = env.removal_rate;
  const double peak = OneMinusExp(r * (host_departure - host_arrival));
  return env.pulmonary_rate * env.SteadyStateConcentration() / r * peak *
         std::exp(-r * (from - host_departure)) * OneMinusExp(r * (to - from));
}

double LinkExposure(const EnvironmentParams& env, const LinkInterval& link) {
  ValidateLinkInterval(link);
  const double start = std::max(link.host_arrival, link.neighbour_arrival);
  const double end = link.neighbour_departure;
  if (end <= start) return 0.0;

  double dose = 0.0;
  if (start < link.host_departure) {
    dose += DirectSegmentDose(env, link.host_arrival, start,
                              std::min(end, link.host_departure));
  }
  if (end > link.host_departure) {
    dose += IndirectSegmentDose(env, link.host_arrival, link.host_departure,
                                std::max(start, link.host_departure), end);
  }
  return dose;
}

double LinkExposureMerged(const EnvironmentParams& env,
                          const LinkInterval& link) {
  ValidateLinkInterval(link);
  const double r = env.removal_rate;
  // Shift the origin to the host arrival.
  const double arrive = 0.0;
  const double depart = link.host_departure - link.host_arrival;
  const double n_arrive =
      std::max(link.host_arrival, link.neighbour_arrival) - link.host_arrival;
  const double n_depart = link.neighbour_departure - link.host_arrival;
  if (n_depart <= n_arrive) return 0.0;

  double switch_time = n_arrive;
  switch (Classify(link)) {
    case LinkCase::kDirectOnly:
      switch_time = n_depart;
      break;
    case LinkCase::kMixed:
      switch_time = depart;
      break;
    case LinkCase::kIndirectOnly:
      switch_time = n_arrive;
      break;
  }
  const double bracket =
      r * (switch_time - n_arrive) +
      std::exp(r * depart) *
          (std::exp(-r * switch_time) - std::exp(-r * n_depart)) +
      std::exp(r * arrive) * (std::exp(-r * n_depart) - std::exp(-r * n_arrive));
  return env.generation_rate * env.pulmonary_rate / (env.volume * r * r) *
         bracket;
}

double TotalExposure(std::span<const double> exposures) {
  double total = 0.0;
  for (double e : exposures) {
    if (!(e >= 0.0)) {
      throw std::invalid_argument("exposure entries must be non-negative");
    }
    total += e;
  }
  return total;
}

double InfectionProbability(double dose, double sigma) {
  if (!(dose >= 0.0)) {
    throw std::invalid_argument("dose must be non-negative");
  }
  if (!(sigma > 0.0)) {
    throw std::invalid_argument("sigma must be > 0");
  }
  return OneMinusExp(sigma * dose);
}

std::vector<ConcentrationSample> EmitConcentrationCurve(
    const EnvironmentParams& env, double host_arrival, double host_departure,
    double horizon, double step) {
  env.Validate();
  if (!(step > 0.0)) throw std::invalid_argument("step must be > 0");
  if (host_departure < host_arrival) {
    throw std::invalid_argument("host departs before arriving");
  }
  if (horizon < host_departure) {
    throw std::invalid_argument("horizon precedes host departure");
  }

  std::vector<ConcentrationSample> curve;
  // Index-based stepping so accumulated rounding cannot skip endpoints.
  for (long i = 0;; ++i) {
    const double t = host_arrival + static_cast<double>(i) * step;
    if (t >= host_departure) break;
    curve.push_back({t, ConcentrationDuringPresence(env, host_arrival, t)});
  }
  curve.push_back({host_departure, ConcentrationDuringPresence(
                                       env, host_arrival, host_departure)});
  for (long i = 1;; ++i) {
    const double t = host_departure + static_cast<double>(i) * step;
    if (t >= horizon) break;
    curve.push_back({t, ConcentrationAfterDeparture(env, host_arrival,
                                                    host_departure, t)});
  }
  if (horizon > host_departure) {
    curve.push_back({horizon, ConcentrationAfterDeparture(
                                  env, host_arrival, host_departure, horizon)});
  }
  return curve;
}

void WriteConcentrationCsv(std::ostream& os,
                           std::span<const ConcentrationSample> curve) {
  os << "time_min,concentration_pfu_m3\n";
  for (const auto& s : curve) {
    os << fmt::format("{},{:.17g}\n", s.time, s.concentration);
  }
}

}  // namespace spdt
