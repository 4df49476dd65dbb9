#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "irsnoma/errors.hpp"
#include "irsnoma/experiment.hpp"

namespace irsnoma {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

[[noreturn]] void fail(const std::string& msg) { throw Error(ErrorCode::Config, msg); }

double to_double(const std::string& key, const std::string& v) {
  std::size_t pos = 0;
  double out = 0.0;
  try {
    out = std::stod(v, &pos);
  } catch (const std::exception&) {
    fail(key + ": not a number: '" + v + "'");
  }
  if (pos != v.size() || !std::isfinite(out)) fail(key + ": not a finite number: '" + v + "'");
  return out;
}

long long to_int(const std::string& key, const std::string& v) {
  const double d = to_double(key, v);
  if (d != std::floor(d)) fail(key + ": expected an integer: '" + v + "'");
  return static_cast<long long>(d);
}

bool to_bool(const std::string& key, const std::string& v) {
  const std::string l = lower(v);
  if (l == "1" || l == "true" || l == "yes") return true;
  if (l == "0" || l == "false" || l == "no") return false;
  fail(key + ": expected a boolean: '" + v + "'");
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

}  // namespace

const char* to_string(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::SweepAntennas: return "sweep_antennas";
    case ExperimentKind::SweepDistance: return "sweep_distance";
    case ExperimentKind::SweepElements: return "sweep_elements";
    case ExperimentKind::RegionMap: return "region_map";
    case ExperimentKind::Single: return "single";
  }
  return "unknown";
}

const char* to_string(Baseline b) {
  switch (b) {
    case Baseline::Hybrid: return "hybrid";
    case Baseline::Zfbf: return "zfbf";
    case Baseline::Ofdma: return "ofdma_proxy";
    case Baseline::NoIrs: return "no_irs";
    case Baseline::DpcProxy: return "dpc_proxy";
  }
  return "unknown";
}

ExperimentKind parse_experiment_kind(const std::string& s) {
  for (auto k : {ExperimentKind::SweepAntennas, ExperimentKind::SweepDistance, ExperimentKind::SweepElements,
                 ExperimentKind::RegionMap, ExperimentKind::Single}) {
    if (lower(s) == to_string(k)) return k;
  }
  fail("unknown experiment '" + s + "'");
}

Baseline parse_baseline(const std::string& s) {
  const std::string l = lower(s);
  if (l == "ofdma") return Baseline::Ofdma;
  for (auto b : {Baseline::Hybrid, Baseline::Zfbf, Baseline::Ofdma, Baseline::NoIrs, Baseline::DpcProxy}) {
    if (l == to_string(b)) return b;
  }
  fail("unknown baseline '" + s + "'");
}

void ExperimentSpec::validate() const {
  try {
    scenario.validate();
  } catch (const Error& e) {
    fail(e.what());
  }
  if (trials < 1) fail("trials must be >= 1");
  if (baselines.empty()) fail("baselines must not be empty");
  if (randomization_count < 1) fail("randomization_count must be >= 1");
  if (!(sdp_tol > 0.0)) fail("sdp_tol must be positive");
  if (grid.nx < 0 || grid.ny < 0) fail("grid resolution must be nonnegative");
  if (threads < 0) fail("threads must be >= 0");
  if (experiment != ExperimentKind::Single && experiment != ExperimentKind::RegionMap && sweep_values.empty()) {
    fail("sweep_values must not be empty");
  }
  for (double v : sweep_values) {
    if (experiment == ExperimentKind::SweepAntennas && (v < 2 || v != std::floor(v))) fail("antenna counts must be integers >= 2");
    if (experiment == ExperimentKind::SweepElements && (v < 1 || v != std::floor(v))) fail("element counts must be integers >= 1");
  }
}

ExperimentSpec parse_config(const std::string& text) {
  ExperimentSpec spec;
  ScenarioConfig& sc = spec.scenario;
  bool sweep_given = false;
  double grid_step = 0.0;
  using Setter = std::function<void(const std::string&, const std::string&)>;
  const std::map<std::string, Setter> setters = {
      {"m_antennas", [&](auto& k, auto& v) { sc.num_antennas = static_cast<int>(to_int(k, v)); }},
      {"n_elements", [&](auto& k, auto& v) { sc.num_elements = static_cast<int>(to_int(k, v)); }},
      {"bs_x", [&](auto& k, auto& v) { sc.bs_pos.x = to_double(k, v); }},
      {"bs_y", [&](auto& k, auto& v) { sc.bs_pos.y = to_double(k, v); }},
      {"irs_x", [&](auto& k, auto& v) { sc.irs_pos.x = to_double(k, v); }},
      {"irs_y", [&](auto& k, auto& v) { sc.irs_pos.y = to_double(k, v); }},
      {"u1_x", [&](auto& k, auto& v) { sc.user1_pos.x = to_double(k, v); }},
      {"u1_y", [&](auto& k, auto& v) { sc.user1_pos.y = to_double(k, v); }},
      {"u2_x", [&](auto& k, auto& v) { sc.user2_pos.x = to_double(k, v); }},
      {"u2_y", [&](auto& k, auto& v) { sc.user2_pos.y = to_double(k, v); }},
      {"pathloss_exp", [&](auto& k, auto& v) { sc.path_loss_exponent = to_double(k, v); }},
      {"bandwidth_hz", [&](auto& k, auto& v) { sc.bandwidth_hz = to_double(k, v); }},
      {"noise_dbm_hz", [&](auto& k, auto& v) { sc.noise_density_dbm_per_hz = to_double(k, v); }},
      {"rate1_bps_hz", [&](auto& k, auto& v) { sc.target_rates[0] = to_double(k, v); }},
      {"rate2_bps_hz", [&](auto& k, auto& v) { sc.target_rates[1] = to_double(k, v); }},
      {"rate_convention",
       [&](auto& k, auto& v) {
         const std::string l = lower(v);
         if (l == "bits") sc.rate_convention = RateConvention::Bits;
         else if (l == "nats") sc.rate_convention = RateConvention::Nats;
         else fail(k + ": expected bits or nats");
       }},
      {"seed",
       [&](auto& k, auto& v) {
         const long long s = to_int(k, v);
         if (s < 0) fail(k + ": must be nonnegative");
         sc.seed = static_cast<std::uint64_t>(s);
       }},
      {"trials", [&](auto& k, auto& v) { spec.trials = static_cast<int>(to_int(k, v)); }},
      {"baselines",
       [&](auto&, auto& v) {
         spec.baselines.clear();
         for (const auto& b : split_list(v)) spec.baselines.push_back(parse_baseline(b));
       }},
      {"randomization_count", [&](auto& k, auto& v) { spec.randomization_count = static_cast<int>(to_int(k, v)); }},
      {"sdp_tol", [&](auto& k, auto& v) { spec.sdp_tol = to_double(k, v); }},
      {"experiment", [&](auto&, auto& v) { spec.experiment = parse_experiment_kind(v); }},
      {"sweep_values",
       [&](auto& k, auto& v) {
         spec.sweep_values.clear();
         for (const auto& x : split_list(v)) spec.sweep_values.push_back(to_double(k, x));
         sweep_given = true;
       }},
      {"pathloss_on_amplitude", [&](auto& k, auto& v) { sc.pathloss_on_amplitude = to_bool(k, v); }},
      {"min_distance", [&](auto& k, auto& v) { sc.min_distance = to_double(k, v); }},
      {"grid_x_min", [&](auto& k, auto& v) { spec.grid.x_min = to_double(k, v); }},
      {"grid_x_max", [&](auto& k, auto& v) { spec.grid.x_max = to_double(k, v); }},
      {"grid_y_min", [&](auto& k, auto& v) { spec.grid.y_min = to_double(k, v); }},
      {"grid_y_max", [&](auto& k, auto& v) { spec.grid.y_max = to_double(k, v); }},
      {"grid_nx", [&](auto& k, auto& v) { spec.grid.nx = static_cast<int>(to_int(k, v)); }},
      {"grid_ny", [&](auto& k, auto& v) { spec.grid.ny = static_cast<int>(to_int(k, v)); }},
      {"grid_step", [&](auto& k, auto& v) { grid_step = to_double(k, v); }},
      {"region_mode",
       [&](auto& k, auto& v) {
         const std::string l = lower(v);
         if (l == "no_irs") spec.region_mode = RegionMode::NoIrs;
         else if (l == "improved") spec.region_mode = RegionMode::Improved;
         else fail(k + ": expected no_irs or improved");
       }},
      {"threads", [&](auto& k, auto& v) { spec.threads = static_cast<int>(to_int(k, v)); }},
  };
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) fail("line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = lower(trim(line.substr(0, eq)));
    const std::string value = trim(line.substr(eq + 1));
    const auto it = setters.find(key);
    if (it == setters.end()) fail("line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    if (value.empty()) fail("line " + std::to_string(lineno) + ": empty value for '" + key + "'");
    it->second(key, value);
  }
  if (grid_step > 0.0) {
    spec.grid.nx = static_cast<int>(std::floor((spec.grid.x_max - spec.grid.x_min) / grid_step + 1e-9)) + 1;
    spec.grid.ny = static_cast<int>(std::floor((spec.grid.y_max - spec.grid.y_min) / grid_step + 1e-9)) + 1;
  } else if (grid_step < 0.0) {
    fail("grid_step must be positive");
  }
  if (!sweep_given) {
    switch (spec.experiment) {
      case ExperimentKind::SweepAntennas: spec.sweep_values = {2, 4, 6, 8}; break;
      case ExperimentKind::SweepElements: spec.sweep_values = {5, 10, 20}; break;
      case ExperimentKind::SweepDistance: spec.sweep_values = {150, 175, 200, 225, 250}; break;
      default: break;
    }
  }
  spec.validate();
  return spec;
}

ExperimentSpec load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) fail("cannot open config '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str());
}

}  // namespace irsnoma
