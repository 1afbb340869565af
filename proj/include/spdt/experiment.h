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

#ifndef SPDT_EXPERIMENT_H_
#define SPDT_EXPERIMENT_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "spdt/epidemic.h"
#include "spdt/metrics.h"
#include "spdt/network.h"
#include "spdt/trace.h"

namespace spdt {

// SDT/SST: sparse networks from the raw trace. DDT/DST: densified.
// LDT/LST: densified with indirect-only links converted, equal densities.
enum class Variant { kSDT, kSST, kDDT, kDST, kLDT, kLST };

std::string_view VariantName(Variant v);
Variant ParseVariant(std::string_view name);
// True for the variants that keep indirect links.
bool IsSpdtVariant(Variant v);
// The concurrent-only counterpart of an SPDT variant (SDT -> SST, ...).
Variant SpstCounterpart(Variant v);

struct ExperimentPlan {
  std::vector<Variant> variants = {Variant::kSDT, Variant::kSST};
  std::vector<double> removal_times = {10.0, 35.0, 60.0};  // r_t, minutes
  std::vector<double> sigmas = {0.33};
  // Mean infectious periods; tau is uniform on {mean-1, mean, mean+1}.
  std::vector<int> tau_means = {4};
  TauMode tau_mode = TauMode::kUniform;
  int runs = 200;
  int seeds = 40;
  int horizon_days = 14;
  double removal_time_min = 7.5;
  double removal_time_max = 300.0;
  std::uint64_t rng_seed = 1;
  BuilderConfig builder = {.horizon_days = 14};
  LdtShift ldt_shift = LdtShift::kPreserveDuration;
  EnvironmentParams env = DefaultEnvironment();

  // Desk-scale profile (the defaults above).
  static ExperimentPlan Desk();
  // Full grid: all variants, r_t 10..60 step 5, three sigmas, three tau
  // means, 1000 runs, 500 seeds, 32 days.
  static ExperimentPlan Full();

  // Throws std::invalid_argument on an empty sweep or bad value.
  void Validate() const;
};

// Key-value configuration: one `key = value` per line, `#` comments.
// List values are comma separated. Unknown keys throw
// std::invalid_argument. Units follow the documented schema: the
// generation rate is PFU per second and the pulmonary rate litres per
// minute; both are converted to canonical units here.
void ApplyPlanSetting(ExperimentPlan& plan, std::string_view key,
                      std::string_view value);
// Same schema for a single simulation: seeds, runs, horizon_days, r_t,
// sigma, tau_min, tau_max, tau_mode, removal_time_min, removal_time_max,
// rng_seed and the environment keys.
void ApplySimulationSetting(SimulationConfig& cfg, std::string_view key,
                            std::string_view value);
std::map<std::string, std::string> ReadKeyValueFile(
    const std::filesystem::path& path);
ExperimentPlan LoadPlan(const std::filesystem::path& path,
                        ExperimentPlan base = ExperimentPlan::Desk());

// Every network variant the plan needs, built once from one trace.
class VariantSet {
 public:
  VariantSet(std::span<const LocationUpdate> trace, const ExperimentPlan& plan,
             int workers = 1);
  VariantSet(ContactNetwork sparse_spdt, const ExperimentPlan& plan);

  const ContactNetwork& Get(Variant v) const;

 private:
  void Derive(const ExperimentPlan& plan);

  std::map<Variant, ContactNetwork> nets_;
};

struct Cell {
  Variant variant;
  double removal_time;
  double sigma;
  int tau_mean;
};

std::string CellLabel(const Cell& cell);
SimulationConfig CellConfig(const ExperimentPlan& plan, const Cell& cell);
std::vector<Cell> EnumerateCells(const ExperimentPlan& plan);

struct CellResult {
  Cell cell;
  std::vector<std::vector<DailyStats>> runs;
  std::vector<RunSummary> summaries;
  std::optional<std::string> error;

  double MeanOutbreak() const;
};

// Runs every (cell, run) pair on up to `workers` threads. A cell whose
// configuration or runs fail carries `error` and no runs; the others are
// unaffected.
std::vector<CellResult> RunCells(const VariantSet& nets,
                                 const ExperimentPlan& plan,
                                 std::span<const Cell> cells, int workers = 1);

struct AmplificationRow {
  Variant spdt;
  Variant spst;
  double removal_time;
  double sigma;
  int tau_mean;
  double spdt_mean;
  double spst_mean;
  double ratio;  // spdt_mean / spst_mean, NaN if spst_mean == 0
};

std::vector<AmplificationRow> AmplificationTable(
    std::span<const CellResult> results);

// Reads the trace, builds the variants, runs all cells and writes into
// `out_dir`:
//   summary.csv         variant,r_t,sigma,tau,run,outbreak_size,R_e,initial_R_t
//   curves/<cell>.csv   day,mean_I_n,mean_I_r,mean_I_p
//   amplification.csv   spdt,spst,r_t,sigma,tau,spdt_mean,spst_mean,amplification
//   manifest.json       plan, trace digest, cell status, file digests
// Returns the cell results.
std::vector<CellResult> RunPlan(const ExperimentPlan& plan,
                                const std::filesystem::path& trace_path,
                                const std::filesystem::path& out_dir,
                                const ParseOptions& parse = {},
                                int workers = 1);

// Selects cells of one plan output for comparison.
struct CellSelector {
  std::optional<Variant> variant;
  std::optional<double> sigma;
  std::optional<int> tau_mean;
};

struct ComparisonRow {
  double removal_time;
  double a_mean;
  double b_mean;
  double difference;  // b_mean - a_mean
};

// Mean outbreak size per r_t of the selected cells in each output
// directory, joined on r_t. Throws std::runtime_error if the manifests
// name different trace digests or a selector matches several cells at one
// r_t.
std::vector<ComparisonRow> ReconstructCompare(
    const std::filesystem::path& dir_a, const CellSelector& select_a,
    const std::filesystem::path& dir_b, const CellSelector& select_b);

// `r_t,a_mean,b_mean,difference`
void WriteComparisonCsv(std::ostream& out,
                        std::span<const ComparisonRow> rows);

// Lowercase hex SHA-256 of a file's bytes.
std::string FileSha256(const std::filesystem::path& path);

// One-sided normal-approximation tests on per-run outbreak sizes.
struct SampleMoments {
  double mean = 0;
  double variance = 0;  // unbiased
  std::size_t n = 0;
};
SampleMoments Moments(std::span<const double> xs);
std::vector<double> OutbreakSizes(const CellResult& r);
// p-value for H1: mean(a) > mean(b) (Welch z statistic).
double PValueGreater(const SampleMoments& a, const SampleMoments& b);
// p-value for H1: mean(a1)/mean(b1) > mean(a2)/mean(b2), delta method.
double PValueRatioGreater(const SampleMoments& a1, const SampleMoments& b1,
                          const SampleMoments& a2, const SampleMoments& b2);

// Bisection on sigma in [lo, hi] so that the cell's mean outbreak size
// approaches `target`. Assumes the mean is non-decreasing in sigma.
double MatchSigma(const VariantSet& nets, const ExperimentPlan& plan,
                  Cell cell, double target, double lo, double hi,
                  int iterations, int workers = 1);

}  // namespace spdt

#endif  // SPDT_EXPERIMENT_H_
