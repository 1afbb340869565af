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

// Command-line front end: synth | build | project-spst | densify |
// make-ldt-lst | simulate | metrics | sweep | compare | curve.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "spdt/epidemic.h"
#include "spdt/experiment.h"
#include "spdt/exposure.h"
#include "spdt/metrics.h"
#include "spdt/network.h"
#include "spdt/parallel.h"
#include "spdt/synth.h"
#include "spdt/trace.h"

namespace spdt {
namespace {

namespace fs = std::filesystem;

std::ofstream OpenOutput(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(fmt::format("cannot write {}", path.string()));
  return out;
}

std::string FormatOptional(const std::optional<double>& v) {
  return v ? fmt::format("{:.6g}", *v) : "NA";
}

// `key=value` strings given with --set.
template <typename Apply>
void ApplyOverrides(const std::vector<std::string>& overrides, Apply apply) {
  for (const auto& kv : overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument(fmt::format("override '{}' is not key=value", kv));
    }
    apply(std::string_view(kv).substr(0, eq), std::string_view(kv).substr(eq + 1));
  }
}

void AddSynth(CLI::App& app) {
  auto* cmd = app.add_subcommand("synth", "Generate a synthetic location trace");
  struct Opts {
    std::string out;
    bool desk = false;
    SynthConfig cfg;
  };
  auto o = std::make_shared<Opts>();
  cmd->add_option("-o,--out", o->out, "Trace CSV to write")->required();
  cmd->add_flag("--desk", o->desk,
                "Desk profile: 2000 users, 5000 locations, 14 days");
  cmd->add_option("--users", o->cfg.n_users);
  cmd->add_option("--locations", o->cfg.n_locations);
  cmd->add_option("--days", o->cfg.days);
  cmd->add_option("--active-prob", o->cfg.active_day_probability,
                  "Probability that a user is active on a given day");
  cmd->add_option("--area", o->cfg.area_width, "Side of the square area, m");
  cmd->add_option("--zipf", o->cfg.zipf_exponent);
  cmd->add_option("--seed", o->cfg.rng_seed);
  cmd->callback([o, cmd] {
    SynthConfig cfg = o->cfg;
    if (o->desk) {
      SynthConfig desk = DeskSynthConfig();
      desk.rng_seed = cfg.rng_seed;
      if (cmd->count("--users")) desk.n_users = cfg.n_users;
      if (cmd->count("--locations")) desk.n_locations = cfg.n_locations;
      if (cmd->count("--days")) desk.days = cfg.days;
      if (cmd->count("--active-prob")) {
        desk.active_day_probability = cfg.active_day_probability;
      }
      if (cmd->count("--area")) desk.area_width = cfg.area_width;
      if (cmd->count("--zipf")) desk.zipf_exponent = cfg.zipf_exponent;
      cfg = desk;
    }
    cfg.area_height = cfg.area_width;
    const auto trace = GenerateTrace(cfg, DefaultWorkerCount());
    WriteTraceFile(o->out, trace);
    std::cerr << fmt::format("wrote {} updates for {} users to {}\n",
                             trace.size(), cfg.n_users, o->out);
  });
}

void AddBuild(CLI::App& app) {
  auto* cmd = app.add_subcommand("build", "Build the sparse SPDT network");
  struct Opts {
    std::string trace, out;
    bool latlon = false;
    BuilderConfig cfg;
  };
  auto o = std::make_shared<Opts>();
  cmd->add_option("-t,--trace", o->trace, "Trace CSV")->required();
  cmd->add_option("-o,--out", o->out, "Network file to write")->required();
  cmd->add_flag("--project-latlon", o->latlon,
                "Trace columns are user_id,t_min,lat,lon");
  cmd->add_option("--radius", o->cfg.radius, "Co-location radius, m");
  cmd->add_option("--window", o->cfg.indirect_window,
                  "Indirect window after host departure, min");
  cmd->add_option("--visit-gap", o->cfg.visit_gap,
                  "Largest gap inside one visit, min");
  cmd->add_option("--horizon", o->cfg.horizon_days, "Days");
  cmd->callback([o] {
    const ParsedTrace parsed =
        ReadTraceFile(o->trace, ParseOptions{.project_latlon = o->latlon});
    const ContactNetwork net =
        BuildNetwork(parsed.updates, o->cfg, DefaultWorkerCount());
    SaveNetwork(net, fs::path(o->out));
    std::cerr << fmt::format(
        "{} updates ({} rows skipped) -> {} users, {} links\n",
        parsed.updates.size(), parsed.skipped_rows, net.users().size(),
        net.links().size());
  });
}

void AddProjection(CLI::App& app) {
  auto* cmd = app.add_subcommand("project-spst",
                                 "Project an SPDT network onto SPST links");
  auto in = std::make_shared<std::string>();
  auto out = std::make_shared<std::string>();
  cmd->add_option("-i,--in", *in)->required();
  cmd->add_option("-o,--out", *out)->required();
  cmd->callback([in, out] {
    SaveNetwork(ProjectSpst(LoadNetwork(fs::path(*in))), fs::path(*out));
  });
}

void AddDensify(CLI::App& app) {
  auto* cmd = app.add_subcommand(
      "densify", "Fill inactive days with copies of active days");
  auto in = std::make_shared<std::string>();
  auto out = std::make_shared<std::string>();
  auto seed = std::make_shared<std::uint64_t>(1);
  cmd->add_option("-i,--in", *in)->required();
  cmd->add_option("-o,--out", *out)->required();
  cmd->add_option("--seed", *seed);
  cmd->callback([in, out, seed] {
    SaveNetwork(Densify(LoadNetwork(fs::path(*in)), *seed), fs::path(*out));
  });
}

void AddLdtLst(CLI::App& app) {
  auto* cmd = app.add_subcommand(
      "make-ldt-lst", "Convert indirect links of a dense network (LDT, LST)");
  struct Opts {
    std::string in, ldt_out, lst_out;
    Minutes window = 200;
    bool keep_departure = false;
  };
  auto o = std::make_shared<Opts>();
  cmd->add_option("-i,--in", o->in, "Densified SPDT network")->required();
  cmd->add_option("--ldt-out", o->ldt_out)->required();
  cmd->add_option("--lst-out", o->lst_out)->required();
  cmd->add_option("--window", o->window, "Indirect window, min");
  cmd->add_flag("--keep-departure", o->keep_departure,
                "Keep the neighbour departure instead of the duration");
  cmd->callback([o] {
    const LdtLstPair pair =
        MakeLdtLst(LoadNetwork(fs::path(o->in)), o->window,
                   o->keep_departure ? LdtShift::kKeepDeparture
                                     : LdtShift::kPreserveDuration);
    SaveNetwork(pair.ldt, fs::path(o->ldt_out));
    SaveNetwork(pair.lst, fs::path(o->lst_out));
  });
}

void AddSimulate(CLI::App& app) {
  auto* cmd = app.add_subcommand("simulate", "Run the SIR engine on a network");
  struct Opts {
    std::string network, config, daily_out, summary_out;
    std::vector<std::string> overrides;
    std::optional<int> seeds, runs, horizon;
    std::optional<double> r_t, sigma;
    std::optional<std::uint64_t> seed;
  };
  auto o = std::make_shared<Opts>();
  cmd->add_option("-n,--network", o->network)->required();
  cmd->add_option("-c,--config", o->config, "Key-value simulation config");
  cmd->add_option("--set", o->overrides, "key=value override (repeatable)");
  cmd->add_option("--seeds", o->seeds);
  cmd->add_option("--runs", o->runs);
  cmd->add_option("--horizon", o->horizon, "Days");
  cmd->add_option("--r-t", o->r_t, "Median removal time, min");
  cmd->add_option("--sigma", o->sigma);
  cmd->add_option("--seed", o->seed, "RNG seed");
  cmd->add_option("--daily-out", o->daily_out, "run,day,I_n,I_r,I_p CSV")
      ->required();
  cmd->add_option("--summary-out", o->summary_out,
                  "run,outbreak_size,R_e CSV");
  cmd->callback([o] {
    SimulationConfig cfg;
    if (!o->config.empty()) {
      for (const auto& [k, v] : ReadKeyValueFile(o->config)) {
        ApplySimulationSetting(cfg, k, v);
      }
    }
    ApplyOverrides(o->overrides, [&](std::string_view k, std::string_view v) {
      ApplySimulationSetting(cfg, k, v);
    });
    if (o->seeds) cfg.seeds = *o->seeds;
    if (o->runs) cfg.runs = *o->runs;
    if (o->horizon) cfg.horizon_days = *o->horizon;
    if (o->r_t) cfg.removal_time_median = *o->r_t;
    if (o->sigma) cfg.sigma = *o->sigma;
    if (o->seed) cfg.rng_seed = *o->seed;

    const ContactNetwork net = LoadNetwork(fs::path(o->network));
    const auto runs = RunSimulation(net, cfg, DefaultWorkerCount());
    {
      std::ofstream out = OpenOutput(o->daily_out);
      WriteDailyCsv(out, runs);
    }
    if (!o->summary_out.empty()) {
      std::ofstream out = OpenOutput(o->summary_out);
      out << "run,outbreak_size,R_e\n";
      for (std::size_t r = 0; r < runs.size(); ++r) {
        const RunSummary s = SummarizeRun(runs[r]);
        out << fmt::format("{},{},{}\n", r, s.outbreak_size,
                           FormatOptional(s.effective_r));
      }
    }
  });
}

void AddMetrics(CLI::App& app) {
  auto* cmd = app.add_subcommand(
      "metrics", "Network metrics, or run metrics from a daily CSV");
  struct Opts {
    std::string network, universe, out_dir, daily, variant = "net";
    std::vector<double> removal_times = {10, 20, 30, 40, 50, 60};
    double static_rt = 60.0;
    double threshold = 0.01;
  };
  auto o = std::make_shared<Opts>();
  cmd->add_option("-n,--network", o->network);
  cmd->add_option("--universe", o->universe,
                  "Network whose users form the node set (e.g. the SPDT one)");
  cmd->add_option("--daily", o->daily, "Daily CSV from simulate");
  cmd->add_option("-o,--out-dir", o->out_dir)->required();
  cmd->add_option("--r-t", o->removal_times, "Removal times for daily graphs")
      ->delimiter(',');
  cmd->add_option("--static-r-t", o->static_rt,
                  "Removal time for the aggregate graph");
  cmd->add_option("--threshold", o->threshold, "Minimum link dose for an edge");
  cmd->add_option("--variant", o->variant, "Label for the variant column");
  cmd->callback([o] {
    if (o->network.empty() && o->daily.empty()) {
      throw CLI::ValidationError("metrics", "need --network or --daily");
    }
    const fs::path dir(o->out_dir);
    fs::create_directories(dir);
    if (!o->network.empty()) {
      const ContactNetwork net = LoadNetwork(fs::path(o->network));
      std::optional<ContactNetwork> universe_net;
      if (!o->universe.empty()) universe_net = LoadNetwork(fs::path(o->universe));
      const std::vector<UserId>* universe =
          universe_net ? &universe_net->users() : nullptr;
      const auto env = DefaultEnvironment();
      {
        std::ofstream out = OpenOutput(dir / "daily_metrics.csv");
        WriteDailyMetricsCsv(
            out,
            DailyNetworkMetrics(net, o->removal_times, env, o->threshold,
                                universe),
            o->variant);
      }
      const StaticGraph g = BuildStaticGraph(
          net, EdgeRule{o->static_rt, o->threshold, env}, std::nullopt,
          universe);
      {
        std::ofstream out = OpenOutput(dir / "degree_hist.csv");
        WriteHistogramCsv(out, DegreeDistribution(g));
      }
      std::ofstream out = OpenOutput(dir / "clustering_hist.csv");
      const ClusteringResult c = LocalClustering(g);
      WriteClusteringHistogramCsv(out, c);
      std::cerr << fmt::format(
          "static graph: {} nodes, {} edges, mean degree {:.4f}, mean "
          "clustering {:.4f}\n",
          g.node_count(), g.edge_count(), MeanDegree(g), c.mean);
    }
    if (!o->daily.empty()) {
      std::ifstream in(o->daily);
      if (!in) throw std::runtime_error("cannot read " + o->daily);
      const auto runs = ReadDailyCsv(in);
      std::ofstream out = OpenOutput(dir / "run_metrics.csv");
      out << "run,R_e,initial_R_t,outbreak_size\n";
      for (std::size_t r = 0; r < runs.size(); ++r) {
        const RunSummary s = SummarizeRun(runs[r]);
        out << fmt::format("{},{},{},{}\n", r, FormatOptional(s.effective_r),
                           FormatOptional(s.initial_r), s.outbreak_size);
      }
    }
  });
}

void AddSweep(CLI::App& app) {
  auto* cmd = app.add_subcommand("sweep", "Run an experiment plan on a trace");
  struct Opts {
    std::string trace, config, out_dir;
    std::vector<std::string> overrides;
    bool full = false;
    bool latlon = false;
  };
  auto o = std::make_shared<Opts>();
  cmd->add_option("-t,--trace", o->trace)->required();
  cmd->add_option("-c,--config", o->config, "Key-value plan file");
  cmd->add_option("-o,--out-dir", o->out_dir)->required();
  cmd->add_option("--set", o->overrides, "key=value override (repeatable)");
  cmd->add_flag("--full", o->full, "Start from the full grid");
  cmd->add_flag("--project-latlon", o->latlon);
  cmd->callback([o] {
    ExperimentPlan plan = o->full ? ExperimentPlan::Full() : ExperimentPlan::Desk();
    if (!o->config.empty()) plan = LoadPlan(o->config, plan);
    ApplyOverrides(o->overrides, [&](std::string_view k, std::string_view v) {
      ApplyPlanSetting(plan, k, v);
    });
    const auto results =
        RunPlan(plan, o->trace, o->out_dir,
                ParseOptions{.project_latlon = o->latlon}, DefaultWorkerCount());
    int failed = 0;
    for (const auto& r : results) {
      if (r.error) {
        ++failed;
        std::cerr << fmt::format("cell {} failed: {}\n", CellLabel(r.cell),
                                 *r.error);
      }
    }
    std::cerr << fmt::format("{} cells, {} failed; outputs in {}\n",
                             results.size(), failed, o->out_dir);
    if (failed > 0) throw CLI::RuntimeError(2);
  });
}

CellSelector ParseSelector(const std::string& variant,
                                          const std::optional<double>& sigma,
                                          const std::optional<int>& tau) {
  CellSelector s;
  if (!variant.empty()) s.variant = ParseVariant(variant);
  s.sigma = sigma;
  s.tau_mean = tau;
  return s;
}

void AddCompare(CLI::App& app) {
  auto* cmd = app.add_subcommand(
      "compare", "Per-r_t outbreak size difference between two sweeps");
  struct Opts {
    std::string a, b, out, a_variant, b_variant;
    std::optional<double> a_sigma, b_sigma;
    std::optional<int> a_tau, b_tau;
  };
  auto o = std::make_shared<Opts>();
  cmd->add_option("--a", o->a, "First sweep output directory")->required();
  cmd->add_option("--b", o->b, "Second sweep output directory")->required();
  cmd->add_option("--a-variant", o->a_variant);
  cmd->add_option("--a-sigma", o->a_sigma);
  cmd->add_option("--a-tau", o->a_tau);
  cmd->add_option("--b-variant", o->b_variant);
  cmd->add_option("--b-sigma", o->b_sigma);
  cmd->add_option("--b-tau", o->b_tau);
  cmd->add_option("-o,--out", o->out, "CSV to write (default stdout)");
  cmd->callback([o] {
    const auto rows = ReconstructCompare(
        o->a, ParseSelector(o->a_variant, o->a_sigma, o->a_tau), o->b,
        ParseSelector(o->b_variant, o->b_sigma, o->b_tau));
    if (o->out.empty()) {
      WriteComparisonCsv(std::cout, rows);
    } else {
      std::ofstream out = OpenOutput(o->out);
      WriteComparisonCsv(out, rows);
    }
  });
}

void AddCurve(CLI::App& app) {
  auto* cmd = app.add_subcommand(
      "curve", "Concentration curve for one host stay");
  struct Opts {
    double arrival = 0, departure = 60, horizon = 300, step = 1, r_t = 60;
    std::string out;
  };
  auto o = std::make_shared<Opts>();
  cmd->add_option("--arrival", o->arrival, "Host arrival, min");
  cmd->add_option("--departure", o->departure, "Host departure, min");
  cmd->add_option("--horizon", o->horizon, "Last sample time, min");
  cmd->add_option("--step", o->step, "Sample spacing, min");
  cmd->add_option("--r-t", o->r_t, "Removal time 1/r, min");
  cmd->add_option("-o,--out", o->out, "CSV to write (default stdout)");
  cmd->callback([o] {
    const auto env = DefaultEnvironment().WithRemovalRate(1.0 / o->r_t);
    const auto curve = EmitConcentrationCurve(env, o->arrival, o->departure,
                                              o->horizon, o->step);
    if (o->out.empty()) {
      WriteConcentrationCsv(std::cout, curve);
    } else {
      std::ofstream out = OpenOutput(o->out);
      WriteConcentrationCsv(out, curve);
    }
  });
}

}  // namespace
}  // namespace spdt

int main(int argc, char** argv) {
  CLI::App app{"Sparse trajectory epidemic simulator"};
  app.require_subcommand(1);
  spdt::AddSynth(app);
  spdt::AddBuild(app);
  spdt::AddProjection(app);
  spdt::AddDensify(app);
  spdt::AddLdtLst(app);
  spdt::AddSimulate(app);
  spdt::AddMetrics(app);
  spdt::AddSweep(app);
  spdt::AddCompare(app);
  spdt::AddCurve(app);
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "spdt: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
