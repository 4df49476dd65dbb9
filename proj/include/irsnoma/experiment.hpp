#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "irsnoma/hybrid_policy.hpp"
#include "irsnoma/quasi_degradation.hpp"

namespace irsnoma {

enum class ExperimentKind { SweepAntennas, SweepDistance, SweepElements, RegionMap, Single };
enum class Baseline { Hybrid, Zfbf, Ofdma, NoIrs, DpcProxy };

const char* to_string(ExperimentKind k);
/// CSV label; the OFDMA curve is an in-house construction, hence "ofdma_proxy".
const char* to_string(Baseline b);
ExperimentKind parse_experiment_kind(const std::string& s);
Baseline parse_baseline(const std::string& s);

struct ExperimentSpec {
  ExperimentKind experiment = ExperimentKind::Single;
  ScenarioConfig scenario;
  std::vector<double> sweep_values;
  int trials = 1;
  std::vector<Baseline> baselines{Baseline::Hybrid, Baseline::Zfbf, Baseline::Ofdma, Baseline::NoIrs,
                                  Baseline::DpcProxy};
  int randomization_count = 1000;
  double sdp_tol = 1e-8;
  GridSpec grid;
  RegionMode region_mode = RegionMode::Improved;
  int threads = 0;  // 0: hardware concurrency
  std::string output_path;

  /// Throws Error{Config}.
  void validate() const;
  HybridOptions hybrid_options() const;
};

/// Flat `key = value` text; `#` starts a comment. Unknown keys are errors.
ExperimentSpec parse_config(const std::string& text);
ExperimentSpec load_config(const std::string& path);

SolveReport ofdma_baseline(const ChannelSet& ch, const QosSpec& qos, const NomaOptions& opts = {});
SolveReport no_irs_baseline(const ChannelSet& ch, const QosSpec& qos,
                            const Tolerances& tol = default_tolerances());

struct ResultRow {
  std::string experiment;
  double sweep_value = 0.0;
  int trial = 0;
  Baseline baseline = Baseline::Hybrid;
  std::optional<double> power_w;
  std::string status;  // "ok", "fallback", or an error code
  std::string scheme;
  std::optional<bool> qd_flag;
  int iterations = 0;
};

inline constexpr const char* kCsvHeader = "experiment,sweep_value,trial,baseline,power_w,status,scheme,qd_flag,iterations";

void write_csv(std::ostream& os, const std::vector<ResultRow>& rows);
void write_region_csv(std::ostream& os, const std::vector<RegionCell>& cells);

/// The scenario evaluated at one sweep point.
ScenarioConfig scenario_at(const ExperimentSpec& spec, double sweep_value);

/// All baselines of one trial on a shared channel draw.
std::vector<ResultRow> run_trial(const ExperimentSpec& spec, double sweep_value, int trial);

/// Every sweep point and trial; rows are ordered by point, trial, baseline
/// regardless of the worker count.
std::vector<ResultRow> run_experiment(const ExperimentSpec& spec);

/// Runs the experiment and writes its CSV to spec.output_path (stdout when empty).
void run_experiment_to_file(const ExperimentSpec& spec);

}  // namespace irsnoma
