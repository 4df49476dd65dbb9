#pragma once

#include <utility>
#include <vector>

#include "irsnoma/beamforming.hpp"
#include "irsnoma/sdp_solver.hpp"

namespace irsnoma {

/// sigma^2 r1 (1 + r2) / Tr(Q Y1) + sigma^2 r2 / Tr(Q Y2); upper bound of the NOMA power.
double bound_objective(const CMatrix& Q, const LiftedProblemData& data,
                       const Tolerances& tol = default_tolerances());

/// NOMA power of a rank-one Q written in lifted traces.
double exact_objective(const CMatrix& Q, const LiftedProblemData& data,
                       const Tolerances& tol = default_tolerances());

std::pair<double, double> update_y(const CMatrix& Q, const LiftedProblemData& data,
                                   const Tolerances& tol = default_tolerances());

/// -2 y1 sqrt(a) + y1^2 t1 - 2 y2 sqrt(b) + y2^2 t2, with a, b the bound numerators.
double transform_objective(const CMatrix& Q, double y1, double y2, const LiftedProblemData& data);

struct SdrResult {
  LiftedMatrix Q;
  SdpStatus status = SdpStatus::NumericalFailure;
  double objective = 0.0;
  int iterations = 0;
};

/// Maximizes y1^2 Tr(Q Y1) + y2^2 Tr(Q Y2) over unit-diagonal PSD Q, with the
/// LMI sufficient condition unless `with_lmi` is false. Throws Infeasible or
/// SolverFailure when no optimal point is certified.
SdrResult sdr_step(double y1, double y2, const LiftedProblemData& data, const SolverOptions& opts,
                   bool with_lmi = true);

/// Direct convex solve of min bound_objective(Q) over the same feasible set;
/// the fixed point the alternation should reach.
SdrResult minimize_bound_sdp(const LiftedProblemData& data, const SolverOptions& opts, bool with_lmi = true);

struct NomaIterRecord {
  double y1 = 0.0;
  double y2 = 0.0;
  double f = 0.0;       // transform objective at (Q^t, y^t); equals -bound
  double bound = 0.0;
  double step = 1.0;    // fraction of the SDR move accepted
  SdpStatus status = SdpStatus::Optimal;
};

struct NomaIterTrace {
  std::vector<NomaIterRecord> records;
  bool converged = false;
};

enum class NomaAcceptance {
  QdOnChannels,  // qd_holds on the composite channels
  LmiOnLift,     // LMI sufficient condition at lift(theta)
};

struct NomaOptions {
  SolverOptions sdp;
  int max_iter = 50;
  double tol = 1e-6;              // relative change of f
  bool with_lmi = true;
  bool line_search = true;        // guard each SDR move with an exact segment search
  NomaAcceptance acceptance = NomaAcceptance::QdOnChannels;
  Tolerances tolerances = default_tolerances();
};

struct RatioSumResult {
  CMatrix Q;  // relaxed minimizer
  double value = 0.0;
  NomaIterTrace trace;
};

/// Quadratic-transform alternation for min a / Tr(Q Y1) + b / Tr(Q Y2) over
/// unit-diagonal PSD Q (plus the LMI when opts.with_lmi). The NOMA bound is
/// the case a = sigma^2 r1 (1 + r2), b = sigma^2 r2.
RatioSumResult minimize_ratio_sum(const LiftedProblemData& data, double a, double b, const NomaOptions& opts);

struct NomaResult {
  PhaseVector theta;
  BeamformerPair beamformers;
  NomaIterTrace trace;
  CMatrix relaxed_Q;
  double relaxed_bound = 0.0;
  double power = 0.0;          // achieved, = ||w1||^2 + ||w2||^2
  double bound_at_theta = 0.0;
  bool rank_one = false;
};

/// Quadratic-transform alternation with SDR steps, followed by Gaussian
/// randomization and closed-form beamformer recovery.
NomaResult optimize_phases_noma(const LiftedProblemData& data, const NomaOptions& opts = {});

}  // namespace irsnoma
