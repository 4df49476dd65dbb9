#include "irsnoma/hybrid_policy.hpp"

#include <chrono>

#include "irsnoma/errors.hpp"
#include "irsnoma/quasi_degradation.hpp"

namespace irsnoma {

const char* to_string(ChosenScheme s) {
  switch (s) {
    case ChosenScheme::Noma: return "noma";
    case ChosenScheme::Zfbf: return "zfbf";
    case ChosenScheme::ZfbfFallback: return "zfbf_fallback";
  }
  return "unknown";
}

const char* to_string(DecisionReason r) {
  switch (r) {
    case DecisionReason::ImprovedQdHolds: return "improved_qd_holds";
    case DecisionReason::OrthogonalityFeasible: return "orthogonality_feasible";
    case DecisionReason::Neither: return "neither";
  }
  return "unknown";
}

SchemeDecision select_scheme(const LiftedProblemData& data, const Tolerances& tol) {
  SchemeDecision d;
  const ImprovedQd iq = improved_qd(data, tol);
  d.lambda_max = iq.lambda_max;
  d.r_norm = data.cross_R.norm();
  if (orthogonality_feasible(data, tol)) {
    d.chosen = ChosenScheme::Zfbf;
    d.reason = DecisionReason::OrthogonalityFeasible;
  } else if (iq.holds) {
    d.chosen = ChosenScheme::Noma;
    d.reason = DecisionReason::ImprovedQdHolds;
  }
  return d;
}

namespace {

void take_zf(SolveReport& rep, ZfResult zf) {
  rep.scheme = Scheme::Zfbf;
  rep.theta = zf.theta;
  rep.beamformers = zf.beamformers;
  for (const auto& o : zf.trace.outer) rep.iterations += static_cast<int>(o.inner.size());
  rep.zf = std::move(zf);
}

}  // namespace

SolveReport solve_hybrid(const LiftedProblemData& data, const HybridOptions& opts) {
  const auto t0 = std::chrono::steady_clock::now();
  SolveReport rep;
  rep.decision = select_scheme(data, opts.noma.tolerances);
  bool done = false;
  if (rep.decision.chosen == ChosenScheme::Noma) {
    auto attempt = [&](const NomaOptions& o) {
      NomaResult nr = optimize_phases_noma(data, o);
      rep.scheme = Scheme::Noma;
      rep.theta = nr.theta;
      rep.beamformers = nr.beamformers;
      rep.iterations = static_cast<int>(nr.trace.records.size());
      rep.noma = std::move(nr);
      done = true;
    };
    auto recoverable = [](ErrorCode c) {
      return c == ErrorCode::Infeasible || c == ErrorCode::NoFeasibleCandidate || c == ErrorCode::SolverFailure ||
             c == ErrorCode::DegenerateTrace || c == ErrorCode::QdViolation;
    };
    try {
      attempt(opts.noma);
    } catch (const Error& e) {
      if (!recoverable(e.code())) throw;
      rep.noma_failure = e.what();
      if (e.code() == ErrorCode::Infeasible && opts.relax_lmi_on_infeasible && opts.noma.with_lmi) {
        NomaOptions o = opts.noma;
        o.with_lmi = false;
        try {
          attempt(o);
          rep.lmi_dropped = true;
        } catch (const Error& e2) {
          if (!recoverable(e2.code())) throw;
          rep.noma_failure += std::string("; without LMI: ") + e2.what();
        }
      }
      rep.fallback_used = !done;
    }
  }
  if (!done) {
    take_zf(rep, optimize_phases_zfbf(data, opts.zf));
    if (opts.upgrade_zf_to_noma) {
      const CVector h1 = composite_channel(data, rep.theta, 1);
      const CVector h2 = composite_channel(data, rep.theta, 2);
      if (qd_holds(h1, h2, data.qos, opts.noma.tolerances).holds) {
        rep.scheme = Scheme::Noma;
        rep.beamformers = noma_beamformers(h1, h2, data.qos, opts.noma.tolerances);
        rep.upgraded = true;
      }
    }
  }
  rep.power_w = rep.beamformers.power;
  rep.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

SolveReport solve_hybrid(const ChannelSet& ch, const QosSpec& qos, const HybridOptions& opts) {
  qos.validate();
  return solve_hybrid(build_lifted(ch, qos), opts);
}

}  // namespace irsnoma
