#include "irsnoma/noma_phase_opt.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <tuple>

#include <boost/math/tools/minima.hpp>

#include "irsnoma/errors.hpp"
#include "irsnoma/quasi_degradation.hpp"

namespace irsnoma {

namespace {

struct Traces {
  double t1;
  double t2;
};

Traces traces(const CMatrix& Q, const LiftedProblemData& data, const Tolerances& tol) {
  if (Q.rows() != data.lifted_dim() || Q.cols() != data.lifted_dim()) {
    throw Error(ErrorCode::DimensionMismatch, "lifted matrix size differs from N + 1");
  }
  const Traces t{re_trace(Q, data.upsilon1), re_trace(Q, data.upsilon2)};
  if (t.t1 <= tol.degenerate_trace || t.t2 <= tol.degenerate_trace) {
    throw Error(ErrorCode::DegenerateTrace, "Tr(Q Y_k) vanishes");
  }
  return t;
}

// Numerators of the two ratios in the bound.
double num_a(const QosSpec& q) { return q.sigma2 * q.r1_min * (1.0 + q.r2_min); }
double num_b(const QosSpec& q) { return q.sigma2 * q.r2_min; }

SdrResult finish_sdr(const ComplexSdpBuilder& b, int q_block, const SolverOptions& opts, const char* what) {
  const SdpSolution sol = solve(b.problem(), opts);
  if (sol.status == SdpStatus::Infeasible) {
    throw Error(ErrorCode::Infeasible, std::string(what) + ": relaxation is infeasible");
  }
  if (sol.status != SdpStatus::Optimal) {
    throw Error(ErrorCode::SolverFailure, std::string(what) + ": " + to_string(sol.status) + " (" + sol.detail + ")");
  }
  SdrResult r;
  r.Q.Q = b.block_value(sol, q_block);
  r.status = sol.status;
  r.objective = sol.objective;
  r.iterations = sol.iterations;
  return r;
}

ComplexSdpBuilder unit_diagonal_base(const LiftedProblemData& data, bool with_lmi, int& q_block) {
  ComplexSdpBuilder b;
  const int n = data.lifted_dim();
  q_block = b.add_block(n);
  for (int i = 0; i < n; ++i) b.fix_real_entry(q_block, i, i, 1.0);
  if (with_lmi) add_lmi_as_block(b, q_block, data.chi1, data.chi2, data.qos.r1_min);
  return b;
}

}  // namespace

double bound_objective(const CMatrix& Q, const LiftedProblemData& data, const Tolerances& tol) {
  const Traces t = traces(Q, data, tol);
  return num_a(data.qos) / t.t1 + num_b(data.qos) / t.t2;
}

double exact_objective(const CMatrix& Q, const LiftedProblemData& data, const Tolerances& tol) {
  const Traces t = traces(Q, data, tol);
  const double r1 = data.qos.r1_min;
  const double r2 = data.qos.r2_min;
  const double s2 = data.qos.sigma2;
  const double cos2 = std::clamp(std::norm(trace_product(Q, data.cross_R)) / (t.t1 * t.t2), 0.0, 1.0);
  const double k = 1.0 + r2 * (1.0 - cos2);
  const double phi1 = r1 * s2 / (t.t1 * k * k);
  const double phi2 = r2 * s2 / t.t2 + r1 * s2 * r2 * cos2 / (t.t1 * k * k);
  return phi1 * ((1.0 + r2) * (1.0 + r2) - (2.0 + r2) * r2 * cos2) + phi2;
}

std::pair<double, double> update_y(const CMatrix& Q, const LiftedProblemData& data, const Tolerances& tol) {
  const Traces t = traces(Q, data, tol);
  return {std::sqrt(num_a(data.qos)) / t.t1, std::sqrt(num_b(data.qos)) / t.t2};
}

double transform_objective(const CMatrix& Q, double y1, double y2, const LiftedProblemData& data) {
  const double t1 = re_trace(Q, data.upsilon1);
  const double t2 = re_trace(Q, data.upsilon2);
  return -2.0 * y1 * std::sqrt(num_a(data.qos)) + y1 * y1 * t1 - 2.0 * y2 * std::sqrt(num_b(data.qos)) + y2 * y2 * t2;
}

SdrResult sdr_step(double y1, double y2, const LiftedProblemData& data, const SolverOptions& opts, bool with_lmi) {
  if (!std::isfinite(y1) || !std::isfinite(y2)) throw Error(ErrorCode::InvalidArgument, "non-finite y");
  int q = 0;
  ComplexSdpBuilder b = unit_diagonal_base(data, with_lmi, q);
  b.set_maximize(true);
  b.add_objective(q, y1 * y1 * data.upsilon1 + y2 * y2 * data.upsilon2);
  return finish_sdr(b, q, opts, "sdr step");
}

SdrResult minimize_bound_sdp(const LiftedProblemData& data, const SolverOptions& opts, bool with_lmi) {
  int q = 0;
  ComplexSdpBuilder b = unit_diagonal_base(data, with_lmi, q);
  const double num[2] = {num_a(data.qos), num_b(data.qos)};
  // [[u, 1], [1, t / tau]] >= 0  <=>  u >= tau / t; the bound is sum num_k u_k / tau_k.
  for (int k = 1; k <= 2; ++k) {
    const CMatrix& ups = data.upsilon(k);
    const double tau = std::max(ups.trace().real(), 1e-300);
    const int p = b.add_block(2);
    CMatrix e11 = CMatrix::Zero(2, 2);
    e11(1, 1) = 1.0;
    b.add_equality({{p, e11}, {q, -ups / tau}}, 0.0);
    b.fix_real_entry(p, 0, 1, 1.0);
    CMatrix e00 = CMatrix::Zero(2, 2);
    e00(0, 0) = num[k - 1] / tau;
    b.add_objective(p, e00);
  }
  return finish_sdr(b, q, opts, "bound minimization");
}

RatioSumResult minimize_ratio_sum(const LiftedProblemData& data, double a, double b, const NomaOptions& opts) {
  const Tolerances& tol = opts.tolerances;
  const double sa = std::sqrt(a);
  const double sb = std::sqrt(b);
  auto value = [&](const CMatrix& q) {
    const Traces t = traces(q, data, tol);
    return a / t.t1 + b / t.t2;
  };
  RatioSumResult out;
  CMatrix Q = lift(PhaseVector::zeros(data.lifted_dim() - 1)).Q;
  Traces t = traces(Q, data, tol);
  double y1 = sa / t.t1;
  double y2 = sb / t.t2;
  double f_prev = 0.0;
  for (int it = 0; it < opts.max_iter; ++it) {
    const SdrResult sdr = sdr_step(y1, y2, data, opts.sdp, opts.with_lmi);
    const CMatrix dir = sdr.Q.Q - Q;
    double step = 1.0;
    // The first move always lands on the relaxation's feasible set; later
    // moves are kept only as far as they lower the objective.
    if (it > 0 && opts.line_search) {
      const double current = value(Q);
      auto along = [&](double g) { return value(Q + g * dir); };
      const auto [g, val] = boost::math::tools::brent_find_minima(along, 0.0, 1.0, 52);
      step = val < current ? g : 0.0;
      if (along(1.0) <= std::min(val, current)) step = 1.0;
    }
    Q = hermitian_part(Q + step * dir);
    t = traces(Q, data, tol);
    y1 = sa / t.t1;
    y2 = sb / t.t2;
    NomaIterRecord rec;
    rec.y1 = y1;
    rec.y2 = y2;
    rec.f = -2.0 * y1 * sa + y1 * y1 * t.t1 - 2.0 * y2 * sb + y2 * y2 * t.t2;
    rec.bound = a / t.t1 + b / t.t2;
    rec.step = step;
    rec.status = sdr.status;
    out.trace.records.push_back(rec);
    if (it > 0 && std::abs(rec.f - f_prev) <= opts.tol * std::abs(f_prev)) {
      out.trace.converged = true;
      break;
    }
    f_prev = rec.f;
  }
  out.Q = Q;
  out.value = value(Q);
  return out;
}

NomaResult optimize_phases_noma(const LiftedProblemData& data, const NomaOptions& opts) {
  data.qos.validate();
  const Tolerances& tol = opts.tolerances;
  NomaResult out;
  RatioSumResult rs = minimize_ratio_sum(data, num_a(data.qos), num_b(data.qos), opts);
  out.trace = std::move(rs.trace);
  const CMatrix Q = std::move(rs.Q);
  out.relaxed_Q = Q;
  out.relaxed_bound = bound_objective(Q, data, tol);

  auto accept = [&](const PhaseVector& th) {
    if (opts.acceptance == NomaAcceptance::LmiOnLift) return lmi_qd_holds(lift(th), data, tol);
    const CVector h1 = composite_channel(data, th, 1);
    const CVector h2 = composite_channel(data, th, 2);
    if (h1.squaredNorm() < tol.zero_channel || h2.squaredNorm() < tol.zero_channel) return false;
    return qd_holds(h1, h2, data.qos, tol).holds;
  };
  auto score = [&](const PhaseVector& th) { return exact_objective(lift(th).Q, data, tol); };
  const ExtractionResult ex = extract_rank_one(Q, accept, score, opts.sdp, tol);
  out.theta = ex.theta;
  out.rank_one = ex.rank_one;
  out.beamformers = noma_beamformers(composite_channel(data, ex.theta, 1), composite_channel(data, ex.theta, 2),
                                     data.qos, tol);
  out.power = out.beamformers.power;
  out.bound_at_theta = bound_objective(lift(ex.theta).Q, data, tol);
  return out;
}

}  // namespace irsnoma
