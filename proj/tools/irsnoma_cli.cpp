// Command-line front end: single-instance solves, sweeps, region maps and a
// quick self-check. Exit codes: 0 ok, 1 other failure, 2 usage or config
// error, 3 solver failure in `single`.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "irsnoma/errors.hpp"
#include "irsnoma/experiment.hpp"
#include "irsnoma/selftest.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitOther = 1;
constexpr int kExitConfig = 2;
constexpr int kExitSolver = 3;

struct CommonFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::optional<int> trials;
  std::string baselines;
  std::string experiment;
  std::optional<int> threads;
};

void add_common(CLI::App* cmd, CommonFlags& f, bool with_trials) {
  cmd->add_option("--config", f.config, "flat key = value config file");
  cmd->add_option("--seed", f.seed, "override the scenario seed");
  cmd->add_option("--out", f.out, "output CSV path (stdout when omitted)");
  if (with_trials) {
    cmd->add_option("--trials", f.trials, "trials per sweep point")->check(CLI::PositiveNumber);
    cmd->add_option("--baselines", f.baselines, "comma list of hybrid,zfbf,ofdma,no_irs,dpc_proxy");
    cmd->add_option("--experiment", f.experiment, "sweep_antennas, sweep_distance or sweep_elements");
    cmd->add_option("--threads", f.threads, "worker threads (0: all cores)")->check(CLI::NonNegativeNumber);
  }
}

/// Config file first, then flag overrides; all errors surface as Error{Config}.
irsnoma::ExperimentSpec build_spec(const CommonFlags& f, irsnoma::ExperimentKind default_kind) {
  using namespace irsnoma;
  ExperimentSpec spec;
  if (!f.config.empty()) {
    spec = load_config(f.config);
  } else {
    spec.experiment = default_kind;
    if (default_kind == ExperimentKind::SweepAntennas) spec.sweep_values = {2, 4, 6, 8};
  }
  if (!f.experiment.empty()) {
    spec.experiment = parse_experiment_kind(f.experiment);
    // Re-derive defaults through the parser so sweep lists stay consistent.
    if (f.config.empty()) {
      spec = parse_config("experiment = " + f.experiment);
    }
  }
  if (f.seed) spec.scenario.seed = *f.seed;
  if (f.trials) spec.trials = *f.trials;
  if (f.threads) spec.threads = *f.threads;
  if (!f.baselines.empty()) {
    spec.baselines.clear();
    std::stringstream ss(f.baselines);
    std::string item;
    while (std::getline(ss, item, ',')) {
      if (!item.empty()) spec.baselines.push_back(parse_baseline(item));
    }
  }
  spec.output_path = f.out;
  spec.validate();
  return spec;
}

int run_single(const CommonFlags& f) {
  using namespace irsnoma;
  ExperimentSpec spec = build_spec(f, ExperimentKind::Single);
  spec.experiment = ExperimentKind::Single;
  spec.trials = 1;
  spec.sweep_values = {0.0};

  const ScenarioConfig cfg = scenario_at(spec, 0.0);
  const QosSpec qos = make_qos(cfg);
  const ChannelSet ch = synthesize_channels(cfg, 0);
  SolveReport rep;
  try {
    rep = solve_hybrid(ch, qos, spec.hybrid_options());
  } catch (const Error& e) {
    std::cerr << "solver failure: " << e.what() << '\n';
    return kExitSolver;
  }
  std::printf("scheme      %s\n", to_string(rep.scheme));
  std::printf("decision    %s (%s)\n", to_string(rep.decision.chosen), to_string(rep.decision.reason));
  std::printf("power_w     %.9e\n", rep.power_w);
  std::printf("power_dbm   %.4f\n", 10.0 * std::log10(rep.power_w) + 30.0);
  std::printf("fallback    %d\nlmi_dropped %d\nupgraded    %d\n", rep.fallback_used ? 1 : 0,
              rep.lmi_dropped ? 1 : 0, rep.upgraded ? 1 : 0);
  if (!rep.noma_failure.empty()) std::printf("noma_error  %s\n", rep.noma_failure.c_str());
  std::printf("iterations  %d\nwall_time_s %.3f\ntheta      ", rep.iterations, rep.wall_time_s);
  for (int i = 0; i < rep.theta.size(); ++i) std::printf(" %.6f", rep.theta.theta(i));
  std::printf("\n");

  if (!spec.output_path.empty()) run_experiment_to_file(spec);
  return kExitOk;
}

int run_sweep(const CommonFlags& f) {
  using namespace irsnoma;
  const ExperimentSpec spec = build_spec(f, ExperimentKind::SweepAntennas);
  if (spec.experiment == ExperimentKind::Single || spec.experiment == ExperimentKind::RegionMap) {
    throw Error(ErrorCode::Config, "sweep needs a sweep_* experiment");
  }
  run_experiment_to_file(spec);
  return kExitOk;
}

int run_region(const CommonFlags& f, const std::string& mode) {
  using namespace irsnoma;
  ExperimentSpec spec;
  if (!f.config.empty()) {
    spec = load_config(f.config);
  } else {
    // Small indoor geometry: user 1 right next to the surface.
    spec.scenario.irs_pos = {5.0, 5.0};
    spec.scenario.user1_pos = {5.0, 5.5};
  }
  spec.experiment = ExperimentKind::RegionMap;
  if (f.seed) spec.scenario.seed = *f.seed;
  if (mode == "no_irs") {
    spec.region_mode = RegionMode::NoIrs;
  } else if (mode == "improved") {
    spec.region_mode = RegionMode::Improved;
  } else if (!mode.empty()) {
    throw Error(ErrorCode::Config, "unknown region mode '" + mode + "'");
  }
  spec.output_path = f.out;
  spec.validate();
  run_experiment_to_file(spec);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Phase and beamformer optimization for a surface-assisted two-user downlink"};
  app.require_subcommand(1);

  CommonFlags single_f, sweep_f, region_f;
  std::string region_mode;
  std::uint64_t selftest_seed = 1;

  auto* single = app.add_subcommand("single", "solve one channel draw with the hybrid policy");
  add_common(single, single_f, false);
  single->add_option("--baselines", single_f.baselines, "baselines written to --out");

  auto* sweep = app.add_subcommand("sweep", "Monte-Carlo sweep over antennas, elements or distance");
  add_common(sweep, sweep_f, true);

  auto* region = app.add_subcommand("region-map", "feasibility map over user-2 positions");
  add_common(region, region_f, false);
  region->add_option("--mode", region_mode, "improved (default) or no_irs");

  auto* selftest = app.add_subcommand("selftest", "run the invariant suite");
  selftest->add_option("--seed", selftest_seed, "instance seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*single) return run_single(single_f);
    if (*sweep) return run_sweep(sweep_f);
    if (*region) return run_region(region_f, region_mode);
    if (*selftest) {
      const irsnoma::SelftestReport rep = irsnoma::run_selftest(selftest_seed);
      irsnoma::print_selftest(std::cout, rep);
      return rep.failed() == 0 ? kExitOk : kExitOther;
    }
  } catch (const irsnoma::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    if (e.code() == irsnoma::ErrorCode::Config) return kExitConfig;
    return kExitOther;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitOther;
  }
  return kExitOther;
}
