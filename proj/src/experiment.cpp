#include "irsnoma/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <thread>

#include "irsnoma/errors.hpp"

namespace irsnoma {

namespace {

bool wants(const ExperimentSpec& spec, Baseline b) {
  return std::find(spec.baselines.begin(), spec.baselines.end(), b) != spec.baselines.end();
}

std::optional<bool> qd_at(const LiftedProblemData& data, const PhaseVector& theta) {
  try {
    const CVector h1 = composite_channel(data, theta, 1);
    const CVector h2 = composite_channel(data, theta, 2);
    return qd_holds(h1, h2, data.qos).holds;
  } catch (const Error&) {
    return std::nullopt;
  }
}

std::string format_double(double v, const char* fmt) {
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, v);
  return buf;
}

}  // namespace

HybridOptions ExperimentSpec::hybrid_options() const {
  HybridOptions o;
  o.noma.sdp.tol = sdp_tol;
  o.noma.sdp.randomization_count = randomization_count;
  o.zf.sdp = o.noma.sdp;
  return o;
}

SolveReport ofdma_baseline(const ChannelSet& ch, const QosSpec& qos, const NomaOptions& opts) {
  qos.validate();
  const auto t0 = std::chrono::steady_clock::now();
  const LiftedProblemData data = build_lifted(ch, qos);
  // Half the resource per user: the same rate needs (1 + r)^2 - 1 on half the
  // band, and the average power carries a factor 1/2.
  const double rp1 = (1.0 + qos.r1_min) * (1.0 + qos.r1_min) - 1.0;
  const double rp2 = (1.0 + qos.r2_min) * (1.0 + qos.r2_min) - 1.0;
  const double a = 0.5 * qos.sigma2 * rp1;
  const double b = 0.5 * qos.sigma2 * rp2;
  NomaOptions o = opts;
  o.with_lmi = false;
  const RatioSumResult rs = minimize_ratio_sum(data, a, b, o);
  const Tolerances& tol = opts.tolerances;
  auto accept = [&](const PhaseVector& th) {
    return composite_channel(data, th, 1).squaredNorm() >= tol.zero_channel &&
           composite_channel(data, th, 2).squaredNorm() >= tol.zero_channel;
  };
  auto score = [&](const PhaseVector& th) {
    return a / composite_channel(data, th, 1).squaredNorm() + b / composite_channel(data, th, 2).squaredNorm();
  };
  const ExtractionResult ex = extract_rank_one(rs.Q, accept, score, o.sdp, tol);
  const CVector h1 = composite_channel(data, ex.theta, 1);
  const CVector h2 = composite_channel(data, ex.theta, 2);
  SolveReport rep;
  rep.decision.chosen = ChosenScheme::Zfbf;
  rep.scheme = Scheme::Ofdma;
  rep.theta = ex.theta;
  rep.beamformers.scheme = Scheme::Ofdma;
  rep.beamformers.w1 = std::sqrt(a) / h1.squaredNorm() * h1;
  rep.beamformers.w2 = std::sqrt(b) / h2.squaredNorm() * h2;
  rep.beamformers.power = rep.beamformers.w1.squaredNorm() + rep.beamformers.w2.squaredNorm();
  rep.power_w = rep.beamformers.power;
  rep.iterations = static_cast<int>(rs.trace.records.size());
  rep.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

SolveReport no_irs_baseline(const ChannelSet& ch, const QosSpec& qos, const Tolerances& tol) {
  qos.validate();
  ch.check_dimensions();
  SolveReport rep;
  rep.theta = PhaseVector(RVector(0));
  const CVector& h1 = ch.h_d1;
  const CVector& h2 = ch.h_d2;
  const bool qd = qd_holds(h1, h2, qos, tol).holds;
  if (qd) {
    rep.decision.chosen = ChosenScheme::Noma;
    rep.decision.reason = DecisionReason::ImprovedQdHolds;
    rep.scheme = Scheme::Noma;
    rep.beamformers = noma_beamformers(h1, h2, qos, tol);
  } else {
    rep.decision.chosen = ChosenScheme::Zfbf;
    rep.scheme = Scheme::Zfbf;
    rep.beamformers = zf_beamformers(h1, h2, qos, tol);
  }
  rep.power_w = rep.beamformers.power;
  return rep;
}

ScenarioConfig scenario_at(const ExperimentSpec& spec, double v) {
  ScenarioConfig c = spec.scenario;
  switch (spec.experiment) {
    case ExperimentKind::SweepAntennas: c.num_antennas = static_cast<int>(v); break;
    case ExperimentKind::SweepElements: c.num_elements = static_cast<int>(v); break;
    case ExperimentKind::SweepDistance: c.user2_pos = {v, spec.scenario.user2_pos.y}; break;
    default: break;
  }
  return c;
}

std::vector<ResultRow> run_trial(const ExperimentSpec& spec, double sweep_value, int trial) {
  const ScenarioConfig cfg = scenario_at(spec, sweep_value);
  const QosSpec qos = make_qos(cfg);
  const ChannelSet ch = synthesize_channels(cfg, static_cast<std::uint64_t>(trial));
  const LiftedProblemData data = build_lifted(ch, qos);
  HybridOptions ho = spec.hybrid_options();
  ho.noma.sdp.seed = make_engine(cfg.seed, static_cast<std::uint64_t>(trial), 0xE7)();
  ho.zf.sdp.seed = ho.noma.sdp.seed;

  auto row_for = [&](Baseline b) {
    ResultRow r;
    r.experiment = to_string(spec.experiment);
    r.sweep_value = sweep_value;
    r.trial = trial;
    r.baseline = b;
    return r;
  };
  auto fill = [&](ResultRow& r, const SolveReport& rep, const LiftedProblemData& d) {
    r.power_w = rep.power_w;
    r.status = rep.fallback_used ? "fallback" : rep.lmi_dropped ? "lmi_dropped" : rep.upgraded ? "upgraded" : "ok";
    r.scheme = to_string(rep.scheme);
    r.qd_flag = qd_at(d, rep.theta);
    r.iterations = rep.iterations;
  };

  std::optional<SolveReport> hybrid;
  std::string hybrid_error;
  if (wants(spec, Baseline::Hybrid) || wants(spec, Baseline::DpcProxy)) {
    try {
      hybrid = solve_hybrid(data, ho);
    } catch (const Error& e) {
      hybrid_error = to_string(e.code());
    }
  }

  std::vector<ResultRow> rows;
  for (Baseline b : spec.baselines) {
    ResultRow r = row_for(b);
    try {
      switch (b) {
        case Baseline::Hybrid:
          if (!hybrid) throw Error(ErrorCode::SolverFailure, hybrid_error);
          fill(r, *hybrid, data);
          break;
        case Baseline::Zfbf: {
          SolveReport rep;
          if (hybrid && hybrid->zf) {
            // The hybrid already ran the ZF path on these channels.
            rep.theta = hybrid->zf->theta;
            rep.beamformers = hybrid->zf->beamformers;
            rep.power_w = hybrid->zf->power;
            for (const auto& o : hybrid->zf->trace.outer) rep.iterations += static_cast<int>(o.inner.size());
          } else {
            ZfResult z = optimize_phases_zfbf(data, ho.zf);
            rep.theta = z.theta;
            rep.beamformers = z.beamformers;
            rep.power_w = z.power;
            for (const auto& o : z.trace.outer) rep.iterations += static_cast<int>(o.inner.size());
          }
          rep.scheme = Scheme::Zfbf;
          fill(r, rep, data);
          break;
        }
        case Baseline::Ofdma:
          fill(r, ofdma_baseline(ch, qos, ho.noma), data);
          break;
        case Baseline::NoIrs: {
          const SolveReport rep = no_irs_baseline(ch, qos);
          fill(r, rep, data);
          r.qd_flag = rep.scheme == Scheme::Noma;
          break;
        }
        case Baseline::DpcProxy: {
          if (!hybrid) throw Error(ErrorCode::SolverFailure, hybrid_error);
          r.scheme = "noma";
          r.qd_flag = qd_at(data, hybrid->theta);
          r.iterations = 0;
          if (r.qd_flag.value_or(false)) {
            r.power_w = noma_power(composite_channel(data, hybrid->theta, 1), composite_channel(data, hybrid->theta, 2), qos);
            r.status = "ok";
          } else {
            r.status = "qd_fails";
          }
          break;
        }
      }
    } catch (const Error& e) {
      r.power_w.reset();
      r.status = to_string(e.code());
    }
    rows.push_back(std::move(r));
  }
  return rows;
}

std::vector<ResultRow> run_experiment(const ExperimentSpec& spec) {
  spec.validate();
  if (spec.experiment == ExperimentKind::RegionMap) {
    throw Error(ErrorCode::InvalidArgument, "region maps are produced by region_map, not as result rows");
  }
  const std::vector<double> points =
      spec.experiment == ExperimentKind::Single ? std::vector<double>{0.0} : spec.sweep_values;
  const std::size_t tasks = points.size() * static_cast<std::size_t>(spec.trials);
  std::vector<std::vector<ResultRow>> slots(tasks);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < tasks; k = next++) {
      const double v = points[k / static_cast<std::size_t>(spec.trials)];
      const int trial = static_cast<int>(k % static_cast<std::size_t>(spec.trials));
      slots[k] = run_trial(spec, v, trial);
    }
  };
  unsigned n = spec.threads > 0 ? static_cast<unsigned>(spec.threads) : std::max(1u, std::thread::hardware_concurrency());
  n = static_cast<unsigned>(std::min<std::size_t>(n, std::max<std::size_t>(tasks, 1)));
  if (n <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned i = 0; i < n; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  std::vector<ResultRow> rows;
  for (auto& s : slots) rows.insert(rows.end(), std::make_move_iterator(s.begin()), std::make_move_iterator(s.end()));
  return rows;
}

void write_csv(std::ostream& os, const std::vector<ResultRow>& rows) {
  os << kCsvHeader << '\n';
  for (const auto& r : rows) {
    os << r.experiment << ',' << format_double(r.sweep_value, "%.10g") << ',' << r.trial << ',' << to_string(r.baseline)
       << ',' << (r.power_w ? format_double(*r.power_w, "%.12e") : "") << ',' << r.status << ',' << r.scheme << ','
       << (r.qd_flag ? (*r.qd_flag ? "1" : "0") : "") << ',' << r.iterations << '\n';
  }
}

void write_region_csv(std::ostream& os, const std::vector<RegionCell>& cells) {
  os << "x,y,holds,margin\n";
  for (const auto& c : cells) {
    os << format_double(c.x, "%.10g") << ',' << format_double(c.y, "%.10g") << ',' << (c.holds ? 1 : 0) << ','
       << format_double(c.margin, "%.12e") << '\n';
  }
}

void run_experiment_to_file(const ExperimentSpec& spec) {
  std::ofstream file;
  if (!spec.output_path.empty()) {
    file.open(spec.output_path, std::ios::binary);
    if (!file) throw Error(ErrorCode::Io, "cannot open output '" + spec.output_path + "'");
  }
  std::ostream& os = spec.output_path.empty() ? std::cout : file;
  if (spec.experiment == ExperimentKind::RegionMap) {
    write_region_csv(os, region_map(spec.scenario, spec.grid, spec.region_mode));
  } else {
    write_csv(os, run_experiment(spec));
  }
  if (!os) throw Error(ErrorCode::Io, "write failed");
}

}  // namespace irsnoma
