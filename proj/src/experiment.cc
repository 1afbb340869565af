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

#include "spdt/experiment.h"

#include <openssl/evp.h>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <memory>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <tuple>

#include <fmt/format.h>

#include "json.hpp"
#include "spdt/parallel.h"

namespace spdt {
namespace {

using nlohmann::ordered_json;

std::string_view Trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
    s.remove_prefix(1);
  }
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {
    s.remove_suffix(1);
  }
  return s;
}

std::vector<std::string_view> SplitList(std::string_view s) {
  std::vector<std::string_view> out;
  while (true) {
    const std::size_t comma = s.find(',');
    const std::string_view item = Trim(s.substr(0, comma));
    if (!item.empty()) out.push_back(item);
    if (comma == std::string_view::npos) break;
    s.remove_prefix(comma + 1);
  }
  return out;
}

template <typename T>
T ParseNumber(std::string_view key, std::string_view text) {
  text = Trim(text);
  T v{};
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || end != text.data() + text.size()) {
    throw std::invalid_argument(
        fmt::format("bad value '{}' for key '{}'", text, key));
  }
  return v;
}

template <typename T>
std::vector<T> ParseNumberList(std::string_view key, std::string_view text) {
  std::vector<T> out;
  for (std::string_view item : SplitList(text)) {
    out.push_back(ParseNumber<T>(key, item));
  }
  return out;
}

std::string FormatOptional(const std::optional<double>& v) {
  return v ? fmt::format("{:.10g}", *v) : std::string("NA");
}

ordered_json PlanToJson(const ExperimentPlan& plan) {
  ordered_json j;
  std::vector<std::string> variants;
  for (Variant v : plan.variants) variants.emplace_back(VariantName(v));
  j["variants"] = variants;
  j["r_t"] = plan.removal_times;
  j["sigma"] = plan.sigmas;
  j["tau"] = plan.tau_means;
  j["tau_mode"] = std::string(TauModeName(plan.tau_mode));
  j["runs"] = plan.runs;
  j["seeds"] = plan.seeds;
  j["horizon_days"] = plan.horizon_days;
  j["removal_time_min"] = plan.removal_time_min;
  j["removal_time_max"] = plan.removal_time_max;
  j["rng_seed"] = plan.rng_seed;
  j["radius_m"] = plan.builder.radius;
  j["indirect_window_min"] = plan.builder.indirect_window;
  j["visit_gap_min"] = plan.builder.visit_gap;
  j["ldt_shift"] = plan.ldt_shift == LdtShift::kPreserveDuration
                       ? "preserve-duration"
                       : "keep-departure";
  j["generation_rate_pfu_min"] = plan.env.generation_rate;
  j["volume_m3"] = plan.env.volume;
  j["pulmonary_rate_m3_min"] = plan.env.pulmonary_rate;
  return j;
}

void WriteTextFile(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error(fmt::format("cannot write '{}'", path.string()));
  }
  out << text;
  out.flush();
  if (!out) {
    throw std::runtime_error(fmt::format("I/O error writing '{}'", path.string()));
  }
}

// Normal upper tail probability.
double UpperTail(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

struct SummaryRecord {
  Variant variant;
  double removal_time;
  double sigma;
  int tau_mean;
  double outbreak;
};

std::vector<SummaryRecord> ReadSummary(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error(fmt::format("cannot open '{}'", path.string()));
  }
  std::string line;
  std::getline(in, line);
  if (Trim(line) !=
      "variant,r_t,sigma,tau,run,outbreak_size,R_e,initial_R_t") {
    throw std::runtime_error(
        fmt::format("unexpected summary header in '{}'", path.string()));
  }
  std::vector<SummaryRecord> out;
  while (std::getline(in, line)) {
    if (Trim(line).empty()) continue;
    std::vector<std::string_view> f;
    std::string_view rest = line;
    while (true) {
      const std::size_t comma = rest.find(',');
      f.push_back(rest.substr(0, comma));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (f.size() != 8) {
      throw std::runtime_error(
          fmt::format("malformed summary row in '{}'", path.string()));
    }
    out.push_back({ParseVariant(f[0]), ParseNumber<double>("r_t", f[1]),
                   ParseNumber<double>("sigma", f[2]),
                   ParseNumber<int>("tau", f[3]),
                   ParseNumber<double>("outbreak_size", f[5])});
  }
  return out;
}

std::string TraceDigestOf(const std::filesystem::path& dir) {
  std::ifstream in(dir / "manifest.json");
  if (!in) {
    throw std::runtime_error(
        fmt::format("missing manifest in '{}'", dir.string()));
  }
  const ordered_json j = ordered_json::parse(in);
  return j.at("trace").at("sha256").get<std::string>();
}

// Mean outbreak size per r_t for the cells matching `select`.
std::map<double, double> MeansByRemovalTime(
    std::span<const SummaryRecord> records, const CellSelector& select) {
  struct Acc {
    double sum = 0;
    std::size_t n = 0;
    std::optional<std::tuple<Variant, double, int>> cell;
  };
  std::map<double, Acc> acc;
  for (const auto& r : records) {
    if (select.variant && r.variant != *select.variant) continue;
    if (select.sigma && std::abs(r.sigma - *select.sigma) > 1e-12) continue;
    if (select.tau_mean && r.tau_mean != *select.tau_mean) continue;
    Acc& a = acc[r.removal_time];
    const auto key = std::make_tuple(r.variant, r.sigma, r.tau_mean);
    if (a.cell && *a.cell != key) {
      throw std::runtime_error(fmt::format(
          "selector matches several cells at r_t={}", r.removal_time));
    }
    a.cell = key;
    a.sum += r.outbreak;
    ++a.n;
  }
  std::map<double, double> out;
  for (const auto& [rt, a] : acc) out[rt] = a.sum / static_cast<double>(a.n);
  return out;
}

}  // namespace

std::string_view VariantName(Variant v) {
  switch (v) {
    case Variant::kSDT: return "SDT";
    case Variant::kSST: return "SST";
    case Variant::kDDT: return "DDT";
    case Variant::kDST: return "DST";
    case Variant::kLDT: return "LDT";
    case Variant::kLST: return "LST";
  }
  return "?";
}

Variant ParseVariant(std::string_view name) {
  name = Trim(name);
  for (Variant v : {Variant::kSDT, Variant::kSST, Variant::kDDT, Variant::kDST,
                    Variant::kLDT, Variant::kLST}) {
    if (name == VariantName(v)) return v;
  }
  throw std::invalid_argument(fmt::format("unknown network variant '{}'", name));
}

bool IsSpdtVariant(Variant v) {
  return v == Variant::kSDT || v == Variant::kDDT || v == Variant::kLDT;
}

Variant SpstCounterpart(Variant v) {
  switch (v) {
    case Variant::kSDT: return Variant::kSST;
    case Variant::kDDT: return Variant::kDST;
    case Variant::kLDT: return Variant::kLST;
    default: return v;
  }
}

ExperimentPlan ExperimentPlan::Desk() { return ExperimentPlan{}; }

ExperimentPlan ExperimentPlan::Full() {
  ExperimentPlan plan;
  plan.variants = {Variant::kSDT, Variant::kSST, Variant::kDDT,
                   Variant::kDST, Variant::kLDT, Variant::kLST};
  plan.removal_times.clear();
  for (int rt = 10; rt <= 60; rt += 5) plan.removal_times.push_back(rt);
  plan.sigmas = {0.33, 0.4, 0.5};
  plan.tau_means = {3, 4, 5};
  plan.runs = 1000;
  plan.seeds = 500;
  plan.horizon_days = 32;
  plan.builder.horizon_days = 32;
  return plan;
}

void ExperimentPlan::Validate() const {
  if (variants.empty() || removal_times.empty() || sigmas.empty() ||
      tau_means.empty()) {
    throw std::invalid_argument("every sweep axis needs at least one value");
  }
  for (int tau : tau_means) {
    if (tau < 2) throw std::invalid_argument("tau means must be >= 2");
  }
  if (runs < 1) throw std::invalid_argument("runs must be >= 1");
  if (horizon_days != builder.horizon_days) {
    throw std::invalid_argument("simulation and builder horizons differ");
  }
  builder.Validate();
  for (double rt : removal_times) {
    SimulationConfig cfg;
    cfg.removal_time_min = removal_time_min;
    cfg.removal_time_max = removal_time_max;
    cfg.removal_time_median = rt;
    cfg.horizon_days = horizon_days;
    cfg.seeds = seeds;
    cfg.runs = runs;
    cfg.env = env;
    for (double s : sigmas) {
      cfg.sigma = s;
      cfg.Validate();
    }
  }
}

void ApplyPlanSetting(ExperimentPlan& plan, std::string_view key,
                      std::string_view value) {
  key = Trim(key);
  value = Trim(value);
  if (key == "variants") {
    plan.variants.clear();
    for (auto v : SplitList(value)) plan.variants.push_back(ParseVariant(v));
  } else if (key == "r_t") {
    plan.removal_times = ParseNumberList<double>(key, value);
  } else if (key == "sigma") {
    plan.sigmas = ParseNumberList<double>(key, value);
  } else if (key == "tau") {
    plan.tau_means = ParseNumberList<int>(key, value);
  } else if (key == "tau_mode") {
    plan.tau_mode = ParseTauMode(value);
  } else if (key == "runs") {
    plan.runs = ParseNumber<int>(key, value);
  } else if (key == "seeds") {
    plan.seeds = ParseNumber<int>(key, value);
  } else if (key == "horizon_days") {
    plan.horizon_days = ParseNumber<int>(key, value);
    plan.builder.horizon_days = plan.horizon_days;
  } else if (key == "removal_time_min") {
    plan.removal_time_min = ParseNumber<double>(key, value);
  } else if (key == "removal_time_max") {
    plan.removal_time_max = ParseNumber<double>(key, value);
  } else if (key == "rng_seed") {
    plan.rng_seed = ParseNumber<std::uint64_t>(key, value);
  } else if (key == "radius_m") {
    plan.builder.radius = ParseNumber<double>(key, value);
  } else if (key == "indirect_window_min") {
    plan.builder.indirect_window = ParseNumber<Minutes>(key, value);
  } else if (key == "visit_gap_min") {
    plan.builder.visit_gap = ParseNumber<Minutes>(key, value);
  } else if (key == "ldt_shift") {
    if (value == "preserve-duration") {
      plan.ldt_shift = LdtShift::kPreserveDuration;
    } else if (value == "keep-departure") {
      plan.ldt_shift = LdtShift::kKeepDeparture;
    } else {
      throw std::invalid_argument(fmt::format("bad ldt_shift '{}'", value));
    }
  } else if (key == "generation_rate_pfu_s") {
    plan.env.generation_rate =
        PfuPerSecondToPerMinute(ParseNumber<double>(key, value));
  } else if (key == "volume_m3") {
    plan.env.volume = ParseNumber<double>(key, value);
  } else if (key == "pulmonary_rate_l_min") {
    plan.env.pulmonary_rate = LitresToCubicMetres(ParseNumber<double>(key, value));
  } else {
    throw std::invalid_argument(fmt::format("unknown plan key '{}'", key));
  }
}

void ApplySimulationSetting(SimulationConfig& cfg, std::string_view key,
                            std::string_view value) {
  key = Trim(key);
  value = Trim(value);
  if (key == "seeds") {
    cfg.seeds = ParseNumber<int>(key, value);
  } else if (key == "runs") {
    cfg.runs = ParseNumber<int>(key, value);
  } else if (key == "horizon_days") {
    cfg.horizon_days = ParseNumber<int>(key, value);
  } else if (key == "r_t") {
    cfg.removal_time_median = ParseNumber<double>(key, value);
  } else if (key == "sigma") {
    cfg.sigma = ParseNumber<double>(key, value);
  } else if (key == "tau_min") {
    cfg.tau_min_days = ParseNumber<int>(key, value);
  } else if (key == "tau_max") {
    cfg.tau_max_days = ParseNumber<int>(key, value);
  } else if (key == "tau_mode") {
    cfg.tau_mode = ParseTauMode(value);
  } else if (key == "removal_time_min") {
    cfg.removal_time_min = ParseNumber<double>(key, value);
  } else if (key == "removal_time_max") {
    cfg.removal_time_max = ParseNumber<double>(key, value);
  } else if (key == "rng_seed") {
    cfg.rng_seed = ParseNumber<std::uint64_t>(key, value);
  } else if (key == "generation_rate_pfu_s") {
    cfg.env.generation_rate =
        PfuPerSecondToPerMinute(ParseNumber<double>(key, value));
  } else if (key == "volume_m3") {
    cfg.env.volume = ParseNumber<double>(key, value);
  } else if (key == "pulmonary_rate_l_min") {
    cfg.env.pulmonary_rate = LitresToCubicMetres(ParseNumber<double>(key, value));
  } else {
    throw std::invalid_argument(fmt::format("unknown simulation key '{}'", key));
  }
}

std::map<std::string, std::string> ReadKeyValueFile(
    const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error(fmt::format("cannot open config '{}'", path.string()));
  }
  std::map<std::string, std::string> out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view s = line;
    if (const auto hash = s.find('#'); hash != std::string_view::npos) {
      s = s.substr(0, hash);
    }
    s = Trim(s);
    if (s.empty()) continue;
    const auto eq = s.find('=');
    if (eq == std::string_view::npos) {
      throw std::invalid_argument(
          fmt::format("{}:{}: expected key = value", path.string(), line_no));
    }
    out[std::string(Trim(s.substr(0, eq)))] = std::string(Trim(s.substr(eq + 1)));
  }
  return out;
}

ExperimentPlan LoadPlan(const std::filesystem::path& path,
                        ExperimentPlan base) {
  for (const auto& [k, v] : ReadKeyValueFile(path)) {
    ApplyPlanSetting(base, k, v);
  }
  return base;
}

VariantSet::VariantSet(std::span<const LocationUpdate> trace,
                       const ExperimentPlan& plan, int workers) {
  nets_[Variant::kSDT] = BuildNetwork(trace, plan.builder, workers);
  Derive(plan);
}

VariantSet::VariantSet(ContactNetwork sparse_spdt, const ExperimentPlan& plan) {
  nets_[Variant::kSDT] = std::move(sparse_spdt);
  Derive(plan);
}

void VariantSet::Derive(const ExperimentPlan& plan) {
  auto wants = [&](std::initializer_list<Variant> any) {
    return std::any_of(plan.variants.begin(), plan.variants.end(),
                       [&](Variant v) {
                         return std::find(any.begin(), any.end(), v) != any.end();
                       });
  };
  const ContactNetwork& sdt = nets_.at(Variant::kSDT);
  if (wants({Variant::kSST})) nets_[Variant::kSST] = ProjectSpst(sdt);
  if (wants({Variant::kDDT, Variant::kDST, Variant::kLDT, Variant::kLST})) {
    nets_[Variant::kDDT] = Densify(sdt, plan.rng_seed);
    const ContactNetwork& ddt = nets_.at(Variant::kDDT);
    if (wants({Variant::kDST})) nets_[Variant::kDST] = ProjectSpst(ddt);
    if (wants({Variant::kLDT, Variant::kLST})) {
      LdtLstPair pair =
          MakeLdtLst(ddt, plan.builder.indirect_window, plan.ldt_shift);
      nets_[Variant::kLDT] = std::move(pair.ldt);
      nets_[Variant::kLST] = std::move(pair.lst);
    }
  }
}

const ContactNetwork& VariantSet::Get(Variant v) const {
  const auto it = nets_.find(v);
  if (it == nets_.end()) {
    throw std::invalid_argument(
        fmt::format("variant {} was not built", VariantName(v)));
  }
  return it->second;
}

std::string CellLabel(const Cell& cell) {
  return fmt::format("{}_rt{:g}_s{:g}_tau{}", VariantName(cell.variant),
                     cell.removal_time, cell.sigma, cell.tau_mean);
}

SimulationConfig CellConfig(const ExperimentPlan& plan, const Cell& cell) {
  SimulationConfig cfg;
  cfg.seeds = plan.seeds;
  cfg.horizon_days = plan.horizon_days;
  cfg.removal_time_median = cell.removal_time;
  cfg.removal_time_min = plan.removal_time_min;
  cfg.removal_time_max = plan.removal_time_max;
  cfg.sigma = cell.sigma;
  cfg.tau_min_days = cell.tau_mean - 1;
  cfg.tau_max_days = cell.tau_mean + 1;
  cfg.tau_mode = plan.tau_mode;
  cfg.rng_seed = plan.rng_seed;
  cfg.runs = plan.runs;
  cfg.env = plan.env;
  return cfg;
}

std::vector<Cell> EnumerateCells(const ExperimentPlan& plan) {
  std::vector<Cell> cells;
  for (Variant v : plan.variants) {
    for (double rt : plan.removal_times) {
      for (double s : plan.sigmas) {
        for (int tau : plan.tau_means) cells.push_back({v, rt, s, tau});
      }
    }
  }
  return cells;
}

double CellResult::MeanOutbreak() const {
  if (summaries.empty()) return std::numeric_limits<double>::quiet_NaN();
  double sum = 0;
  for (const auto& s : summaries) sum += static_cast<double>(s.outbreak_size);
  return sum / static_cast<double>(summaries.size());
}

std::vector<CellResult> RunCells(const VariantSet& nets,
                                 const ExperimentPlan& plan,
                                 std::span<const Cell> cells, int workers) {
  std::vector<CellResult> results(cells.size());
  std::map<Variant, IndexedNetwork> indexed;
  std::vector<SimulationConfig> configs(cells.size());
  std::vector<const IndexedNetwork*> cell_net(cells.size(), nullptr);

  for (std::size_t c = 0; c < cells.size(); ++c) {
    results[c].cell = cells[c];
    try {
      configs[c] = CellConfig(plan, cells[c]);
      configs[c].Validate();
      auto it = indexed.find(cells[c].variant);
      if (it == indexed.end()) {
        it = indexed
                 .emplace(cells[c].variant,
                          IndexedNetwork(nets.Get(cells[c].variant)))
                 .first;
      }
      if (static_cast<std::size_t>(configs[c].seeds) > it->second.population()) {
        throw std::invalid_argument(fmt::format(
            "{} seeds requested for a population of {}", configs[c].seeds,
            it->second.population()));
      }
      cell_net[c] = &it->second;
      results[c].runs.resize(static_cast<std::size_t>(configs[c].runs));
    } catch (const std::exception& e) {
      results[c].error = e.what();
    }
  }

  std::vector<std::pair<std::size_t, int>> jobs;
  for (std::size_t c = 0; c < cells.size(); ++c) {
    if (results[c].error) continue;
    for (int run = 0; run < configs[c].runs; ++run) jobs.emplace_back(c, run);
  }
  std::mutex mu;
  ParallelFor(jobs.size(), workers, [&](std::size_t j) {
    const auto [c, run] = jobs[j];
    try {
      results[c].runs[static_cast<std::size_t>(run)] =
          RunOnce(*cell_net[c], configs[c], run);
    } catch (const std::exception& e) {
      std::lock_guard lock(mu);
      if (!results[c].error) results[c].error = e.what();
    }
  });

  for (auto& r : results) {
    if (r.error) {
      r.runs.clear();
      continue;
    }
    for (const auto& run : r.runs) r.summaries.push_back(SummarizeRun(run));
  }
  return results;
}

std::vector<AmplificationRow> AmplificationTable(
    std::span<const CellResult> results) {
  std::vector<AmplificationRow> rows;
  for (const auto& a : results) {
    if (a.error || !IsSpdtVariant(a.cell.variant)) continue;
    const Variant counterpart = SpstCounterpart(a.cell.variant);
    for (const auto& b : results) {
      if (b.error || b.cell.variant != counterpart ||
          b.cell.removal_time != a.cell.removal_time ||
          b.cell.sigma != a.cell.sigma || b.cell.tau_mean != a.cell.tau_mean) {
        continue;
      }
      const double num = a.MeanOutbreak();
      const double den = b.MeanOutbreak();
      rows.push_back({a.cell.variant, counterpart, a.cell.removal_time,
                      a.cell.sigma, a.cell.tau_mean, num, den,
                      den > 0 ? num / den
                              : std::numeric_limits<double>::quiet_NaN()});
    }
  }
  return rows;
}

std::string FileSha256(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error(fmt::format("cannot open '{}'", path.string()));
  }
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(),
                                                              EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("SHA-256 initialisation failed");
  }
  char buf[1 << 16];
  while (in) {
    in.read(buf, sizeof(buf));
    if (in.gcount() > 0) {
      EVP_DigestUpdate(ctx.get(), buf, static_cast<std::size_t>(in.gcount()));
    }
  }
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx.get(), digest, &len);
  std::string hex;
  for (unsigned int i = 0; i < len; ++i) {
    hex += fmt::format("{:02x}", digest[i]);
  }
  return hex;
}

std::vector<CellResult> RunPlan(const ExperimentPlan& plan,
                                const std::filesystem::path& trace_path,
                                const std::filesystem::path& out_dir,
                                const ParseOptions& parse, int workers) {
  plan.Validate();
  const ParsedTrace trace = ReadTraceFile(trace_path, parse);
  const VariantSet nets(trace.updates, plan, workers);
  const std::vector<Cell> cells = EnumerateCells(plan);
  std::vector<CellResult> results = RunCells(nets, plan, cells, workers);

  std::filesystem::create_directories(out_dir / "curves");
  std::vector<std::string> written;

  std::string summary =
      "variant,r_t,sigma,tau,run,outbreak_size,R_e,initial_R_t\n";
  for (const auto& r : results) {
    for (std::size_t run = 0; run < r.summaries.size(); ++run) {
      const RunSummary& s = r.summaries[run];
      summary += fmt::format("{},{:g},{:g},{},{},{},{},{}\n",
                             VariantName(r.cell.variant), r.cell.removal_time,
                             r.cell.sigma, r.cell.tau_mean, run,
                             s.outbreak_size, FormatOptional(s.effective_r),
                             FormatOptional(s.initial_r));
    }
  }
  WriteTextFile(out_dir / "summary.csv", summary);
  written.push_back("summary.csv");

  for (const auto& r : results) {
    if (r.error) continue;
    std::string curve = "day,mean_I_n,mean_I_r,mean_I_p\n";
    const double n = static_cast<double>(r.runs.size());
    for (int d = 0; d < plan.horizon_days; ++d) {
      double in = 0, ir = 0, ip = 0;
      for (const auto& run : r.runs) {
        const DailyStats& s = run[static_cast<std::size_t>(d)];
        in += static_cast<double>(s.new_infections);
        ir += static_cast<double>(s.new_recoveries);
        ip += static_cast<double>(s.prevalence);
      }
      curve += fmt::format("{},{:.10g},{:.10g},{:.10g}\n", d, in / n, ir / n,
                           ip / n);
    }
    const std::string name = "curves/" + CellLabel(r.cell) + ".csv";
    WriteTextFile(out_dir / name, curve);
    written.push_back(name);
  }

  std::string amp =
      "spdt,spst,r_t,sigma,tau,spdt_mean,spst_mean,amplification\n";
  for (const auto& a : AmplificationTable(results)) {
    amp += fmt::format("{},{},{:g},{:g},{},{:.10g},{:.10g},{:.10g}\n",
                       VariantName(a.spdt), VariantName(a.spst),
                       a.removal_time, a.sigma, a.tau_mean, a.spdt_mean,
                       a.spst_mean, a.ratio);
  }
  WriteTextFile(out_dir / "amplification.csv", amp);
  written.push_back("amplification.csv");

  ordered_json manifest;
  manifest["format"] = "spdt-manifest v1";
  manifest["trace"] = {{"path", trace_path.filename().string()},
                       {"sha256", FileSha256(trace_path)},
                       {"skipped_rows", trace.skipped_rows}};
  manifest["plan"] = PlanToJson(plan);
  ordered_json networks = ordered_json::object();
  for (Variant v : plan.variants) {
    const ContactNetwork& net = nets.Get(v);
    networks[std::string(VariantName(v))] = {{"users", net.users().size()},
                                             {"links", net.links().size()}};
  }
  manifest["networks"] = networks;
  ordered_json cell_status = ordered_json::array();
  for (const auto& r : results) {
    ordered_json c = {{"cell", CellLabel(r.cell)},
                      {"status", r.error ? "failed" : "ok"}};
    if (r.error) c["error"] = *r.error;
    cell_status.push_back(c);
  }
  manifest["cells"] = cell_status;
  ordered_json files = ordered_json::array();
  for (const auto& name : written) {
    files.push_back({{"path", name}, {"sha256", FileSha256(out_dir / name)}});
  }
  manifest["files"] = files;
  WriteTextFile(out_dir / "manifest.json", manifest.dump(2) + "\n");
  return results;
}

std::vector<ComparisonRow> ReconstructCompare(
    const std::filesystem::path& dir_a, const CellSelector& select_a,
    const std::filesystem::path& dir_b, const CellSelector& select_b) {
  if (TraceDigestOf(dir_a) != TraceDigestOf(dir_b)) {
    throw std::runtime_error("plan outputs were produced from different traces");
  }
  const auto a = MeansByRemovalTime(ReadSummary(dir_a / "summary.csv"), select_a);
  const auto b = MeansByRemovalTime(ReadSummary(dir_b / "summary.csv"), select_b);
  std::vector<ComparisonRow> rows;
  for (const auto& [rt, mean_a] : a) {
    const auto it = b.find(rt);
    if (it == b.end()) continue;
    rows.push_back({rt, mean_a, it->second, it->second - mean_a});
  }
  return rows;
}

void WriteComparisonCsv(std::ostream& out,
                        std::span<const ComparisonRow> rows) {
  out << "r_t,a_mean,b_mean,difference\n";
  for (const auto& r : rows) {
    out << fmt::format("{:g},{:.10g},{:.10g},{:.10g}\n", r.removal_time,
                       r.a_mean, r.b_mean, r.difference);
  }
}

SampleMoments Moments(std::span<const double> xs) {
  SampleMoments m;
  m.n = xs.size();
  if (m.n == 0) return m;
  for (double x : xs) m.mean += x;
  m.mean /= static_cast<double>(m.n);
  if (m.n > 1) {
    for (double x : xs) m.variance += (x - m.mean) * (x - m.mean);
    m.variance /= static_cast<double>(m.n - 1);
  }
  return m;
}

std::vector<double> OutbreakSizes(const CellResult& r) {
  std::vector<double> out;
  out.reserve(r.summaries.size());
  for (const auto& s : r.summaries) {
    out.push_back(static_cast<double>(s.outbreak_size));
  }
  return out;
}

double PValueGreater(const SampleMoments& a, const SampleMoments& b) {
  const double se = std::sqrt(a.variance / static_cast<double>(a.n) +
                              b.variance / static_cast<double>(b.n));
  const double diff = a.mean - b.mean;
  if (se == 0) return diff > 0 ? 0.0 : 1.0;
  return UpperTail(diff / se);
}

double PValueRatioGreater(const SampleMoments& a1, const SampleMoments& b1,
                          const SampleMoments& a2, const SampleMoments& b2) {
  auto ratio_and_var = [](const SampleMoments& a, const SampleMoments& b) {
    const double ratio = a.mean / b.mean;
    const double rel = a.variance / (static_cast<double>(a.n) * a.mean * a.mean) +
                       b.variance / (static_cast<double>(b.n) * b.mean * b.mean);
    return std::pair{ratio, ratio * ratio * rel};
  };
  if (!(b1.mean > 0 && b2.mean > 0 && a1.mean > 0 && a2.mean > 0)) return 1.0;
  const auto [r1, v1] = ratio_and_var(a1, b1);
  const auto [r2, v2] = ratio_and_var(a2, b2);
  const double se = std::sqrt(v1 + v2);
  if (se == 0) return r1 > r2 ? 0.0 : 1.0;
  return UpperTail((r1 - r2) / se);
}

double MatchSigma(const VariantSet& nets, const ExperimentPlan& plan,
                  Cell cell, double target, double lo, double hi,
                  int iterations, int workers) {
  auto mean_at = [&](double sigma) {
    cell.sigma = sigma;
    const Cell one[] = {cell};
    const auto result = RunCells(nets, plan, one, workers);
    if (result[0].error) throw std::runtime_error(*result[0].error);
    return result[0].MeanOutbreak();
  };
  for (int i = 0; i < iterations; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mean_at(mid) < target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace spdt
