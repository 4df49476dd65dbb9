#include "irsnoma/zfbf_phase_opt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "irsnoma/errors.hpp"

namespace irsnoma {

namespace {

struct Parts {
  double t1;
  double t2;
  Complex c;  // Tr(Q R)
};

Parts parts(const CMatrix& Q, const LiftedProblemData& data) {
  if (Q.rows() != data.lifted_dim() || Q.cols() != data.lifted_dim()) {
    throw Error(ErrorCode::DimensionMismatch, "lifted matrix size differs from N + 1");
  }
  return {re_trace(Q, data.upsilon1), re_trace(Q, data.upsilon2), trace_product(Q, data.cross_R)};
}

double balance(const Parts& p) {
  return p.t1 > 0.0 && p.t2 > 0.0 ? std::sqrt(p.t2 / p.t1) : 1.0;
}

CMatrix e_entry(int n, int r, int c, Complex v) {
  CMatrix e = CMatrix::Zero(n, n);
  e(r, c) = v;
  return e;
}

}  // namespace

GSplit g_split(const CMatrix& Q, const LiftedProblemData& data, double eta) {
  const Parts p = parts(Q, data);
  const QosSpec& q = data.qos;
  GSplit g;
  g.g1 = q.sigma2 * q.r1_min * p.t2 + q.sigma2 * q.r2_min * p.t1;
  g.g2 = p.t1 * p.t2 - std::norm(p.c);
  g.g = g.g1 - eta * g.g2;
  return g;
}

double w_objective(const CMatrix& Q, const LiftedProblemData& data, const Tolerances& tol) {
  const Parts p = parts(Q, data);
  const GSplit g = g_split(Q, data, 0.0);
  if (!(p.t1 > tol.degenerate_trace && p.t2 > tol.degenerate_trace) || g.g2 <= tol.collinear_sin2 * p.t1 * p.t2) {
    throw Error(ErrorCode::OrthDegenerate, "composite channels are collinear");
  }
  return g.g1 / g.g2;
}

CMatrix g2_gradient(const CMatrix& Qi, const LiftedProblemData& data) {
  const Parts p = parts(Qi, data);
  const CMatrix cr = p.c * data.cross_R.adjoint();
  return hermitian_part(p.t2 * data.upsilon1 + p.t1 * data.upsilon2 - (cr + cr.adjoint()));
}

double g2_surrogate(const CMatrix& Q, const CMatrix& Qi, const LiftedProblemData& data, Surrogate kind) {
  if (kind == Surrogate::Linearized) {
    return g_split(Qi, data, 0.0).g2 + re_trace(g2_gradient(Qi, data), Q - Qi);
  }
  // t1 t2 = (u^2 - w^2) / 4 with u = a t1 + t2 / a, w = a t1 - t2 / a; only
  // u^2 / 4 is convex. a^2 = t2 / t1 at Qi balances the linearization error.
  const Parts pi = parts(Qi, data);
  const Parts p = parts(Q, data);
  const double a = balance(pi);
  const double ui = a * pi.t1 + pi.t2 / a;
  const double u = a * p.t1 + p.t2 / a;
  const double w = a * p.t1 - p.t2 / a;
  return 0.25 * (2.0 * ui * u - ui * ui) - 0.25 * w * w - std::norm(p.c);
}

ScaResult sca_solve(double eta, const CMatrix& Q_init, const LiftedProblemData& data, const ZfOptions& opts) {
  if (!(eta >= 0.0) || !std::isfinite(eta)) throw Error(ErrorCode::InvalidArgument, "eta must be finite and nonnegative");
  const QosSpec& q = data.qos;
  const int n = data.lifted_dim();
  const CMatrix g1_coef = q.sigma2 * q.r1_min * data.upsilon2 + q.sigma2 * q.r2_min * data.upsilon1;
  ScaResult out;
  CMatrix Qi = Q_init;
  GSplit gi = g_split(Qi, data, eta);
  out.initial = gi;
  const int rounds = eta == 0.0 ? 1 : opts.max_inner;
  for (int it = 0; it < rounds; ++it) {
    ComplexSdpBuilder b;
    const int qb = b.add_block(n);
    for (int i = 0; i < n; ++i) b.fix_real_entry(qb, i, i, 1.0);
    if (eta == 0.0) {
      b.add_objective(qb, g1_coef);
    } else if (opts.surrogate == Surrogate::Linearized) {
      b.add_objective(qb, g1_coef - eta * g2_gradient(Qi, data));
    } else {
      const Parts pi = parts(Qi, data);
      const double a = balance(pi);
      const CMatrix u_coef = a * data.upsilon1 + data.upsilon2 / a;
      const double ui = a * pi.t1 + pi.t2 / a;
      const double kappa = std::max(ui, 1e-300);
      b.add_objective(qb, g1_coef - 0.5 * eta * ui * u_coef);
      // [[p, w / kappa], [., 1]] >= 0 bounds w^2 / 4 through p.
      const int pb = b.add_block(2);
      b.fix_real_entry(pb, 1, 1, 1.0);
      b.add_equality({{pb, e_entry(2, 1, 0, 1.0)}, {qb, -(a * data.upsilon1 - data.upsilon2 / a) / kappa}}, 0.0);
      b.add_objective(pb, e_entry(2, 0, 0, 0.25 * eta * kappa * kappa));
      // [[w, c / kappa], [., 1]] >= 0 bounds |c|^2 through w.
      const int wb = b.add_block(2);
      b.fix_real_entry(wb, 1, 1, 1.0);
      b.add_equality({{wb, e_entry(2, 1, 0, 1.0)}, {qb, -data.cross_R / kappa}}, 0.0);
      b.add_equality({{wb, e_entry(2, 1, 0, Complex(0.0, -1.0))}, {qb, Complex(0.0, 1.0) * data.cross_R / kappa}},
                     0.0);
      b.add_objective(wb, e_entry(2, 0, 0, eta * kappa * kappa));
    }
    const SdpSolution sol = solve(b.problem(), opts.sdp);
    ZfInnerRecord rec;
    rec.status = sol.status;
    if (sol.status != SdpStatus::Optimal) {
      if (it == 0 || sol.status == SdpStatus::Infeasible) {
        throw Error(ErrorCode::SolverFailure,
                    std::string("surrogate solve: ") + to_string(sol.status) + " (" + sol.detail + ")");
      }
      rec.accepted = false;
      out.inner.push_back(rec);
      break;
    }
    const CMatrix Qn = b.block_value(sol, qb);
    const GSplit gn = g_split(Qn, data, eta);
    const double model = g2_surrogate(Qn, Qi, data, opts.surrogate);
    rec.surrogate = gn.g1 - eta * model;
    rec.g = gn.g;
    rec.g1 = gn.g1;
    const double scale = gi.g1 + eta * std::abs(gi.g2);
    if (eta > 0.0 && opts.surrogate == Surrogate::Linearized && gn.g2 < model - 1e-9 * std::abs(model)) {
      throw Error(ErrorCode::UnderEstimatorViolated, "linearized G2 exceeds G2 at the new iterate");
    }
    if (eta > 0.0 && gn.g > gi.g + 1e-12 * scale) {
      // Solver noise at the fixed point; keep the incumbent.
      rec.accepted = false;
      out.inner.push_back(rec);
      break;
    }
    out.inner.push_back(rec);
    const double change = std::abs(gn.g - gi.g);
    Qi = Qn;
    gi = gn;
    if (change <= opts.inner_tol * scale) break;
  }
  out.Q.Q = Qi;
  out.value = gi;
  return out;
}

ZfResult optimize_phases_zfbf(const LiftedProblemData& data, const ZfOptions& opts) {
  data.qos.validate();
  const Tolerances& tol = opts.tolerances;
  const CMatrix Q0 = lift(PhaseVector::zeros(data.lifted_dim() - 1)).Q;
  ZfResult out;
  double eta = 0.0;
  CMatrix Qprev = Q0;
  ScaResult last;
  for (int outer = 0; outer < opts.max_outer; ++outer) {
    CMatrix start = Qprev;
    if (outer > 0 && g_split(Q0, data, eta).g < g_split(Qprev, data, eta).g) start = Q0;
    last = sca_solve(eta, start, data, opts);
    ZfOuterRecord rec;
    rec.eta = eta;
    rec.g_start = last.initial.g;
    rec.g_star = last.value.g;
    rec.w_relaxed = last.value.g2 > 0.0 ? last.value.g1 / last.value.g2 : std::numeric_limits<double>::infinity();
    rec.inner = last.inner;
    out.trace.outer.push_back(rec);
    out.delta = opts.delta_rel * last.value.g1;
    if (std::abs(last.value.g) <= out.delta) {
      out.trace.converged = true;
      break;
    }
    if (!(last.value.g2 > 0.0)) throw Error(ErrorCode::OrthDegenerate, "relaxed G2 vanished");
    eta = last.value.g1 / last.value.g2;
    Qprev = last.Q.Q;
  }
  if (!out.trace.converged && opts.throw_on_max_outer) {
    throw Error(ErrorCode::MaxOuterIter, "Dinkelbach iteration cap reached");
  }
  out.eta = eta;
  out.relaxed_Q = last.Q.Q;
  out.relaxed_w = out.trace.outer.back().w_relaxed;

  auto accept = [&](const PhaseVector& th) {
    const CVector h1 = composite_channel(data, th, 1);
    const CVector h2 = composite_channel(data, th, 2);
    if (h1.squaredNorm() < tol.zero_channel || h2.squaredNorm() < tol.zero_channel) return false;
    return 1.0 - cos2_alpha(h1, h2, tol) > tol.collinear_sin2;
  };
  auto score = [&](const PhaseVector& th) { return w_objective(lift(th).Q, data, tol); };
  const ExtractionResult ex = extract_rank_one(out.relaxed_Q, accept, score, opts.sdp, tol);
  out.theta = ex.theta;
  out.rank_one = ex.rank_one;
  out.beamformers =
      zf_beamformers(composite_channel(data, ex.theta, 1), composite_channel(data, ex.theta, 2), data.qos, tol);
  out.power = out.beamformers.power;
  return out;
}

}  // namespace irsnoma
