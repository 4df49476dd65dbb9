#pragma once

#include <vector>

#include "irsnoma/beamforming.hpp"
#include "irsnoma/sdp_solver.hpp"

namespace irsnoma {

struct GSplit {
  double g1 = 0.0;  // sigma^2 r1 Tr(Q Y2) + sigma^2 r2 Tr(Q Y1)
  double g2 = 0.0;  // Tr(Q Y1) Tr(Q Y2) - |Tr(Q R)|^2
  double g = 0.0;   // g1 - eta g2
};

GSplit g_split(const CMatrix& Q, const LiftedProblemData& data, double eta);

/// ZF power G1 / G2 at Q. Throws OrthDegenerate when the composite channels
/// are collinear (G2 <= collinear_sin2 * Tr(Q Y1) Tr(Q Y2)).
double w_objective(const CMatrix& Q, const LiftedProblemData& data,
                   const Tolerances& tol = default_tolerances());

/// Gradient of G2 at Qi under <A, B> = Re Tr(A^H B), Hermitian.
CMatrix g2_gradient(const CMatrix& Qi, const LiftedProblemData& data);

enum class Surrogate {
  DcMinorizer,  // convex part linearized only; always a valid lower model of G2
  Linearized,   // first-order Taylor model of G2; checked per step
};

/// Lower model of G2 built at Qi, evaluated at Q.
double g2_surrogate(const CMatrix& Q, const CMatrix& Qi, const LiftedProblemData& data, Surrogate kind);

struct ZfInnerRecord {
  double surrogate = 0.0;  // G1 - eta * surrogate G2 at the new point
  double g = 0.0;          // true G at the new point
  double g1 = 0.0;         // G1 at the new point
  SdpStatus status = SdpStatus::Optimal;
  bool accepted = true;
};

struct ZfOuterRecord {
  double eta = 0.0;
  double g_start = 0.0;    // true G at the inner loop's starting point
  double g_star = 0.0;
  double w_relaxed = 0.0;  // G1 / G2 at the returned relaxed Q
  std::vector<ZfInnerRecord> inner;
};

struct ZfIterTrace {
  std::vector<ZfOuterRecord> outer;
  bool converged = false;
};

struct ZfOptions {
  SolverOptions sdp;
  int max_outer = 30;
  int max_inner = 50;
  double inner_tol = 1e-9;   // |dG| <= inner_tol * (G1 + eta G2)
  double delta_rel = 1e-6;   // |G*(eta)| <= delta_rel * G1(Q*)
  Surrogate surrogate = Surrogate::DcMinorizer;
  bool throw_on_max_outer = false;
  Tolerances tolerances = default_tolerances();
};

struct ScaResult {
  LiftedMatrix Q;
  GSplit initial;  // at Q_init
  GSplit value;
  std::vector<ZfInnerRecord> inner;
};

/// Successive convex approximation of min G1 - eta G2 over unit-diagonal PSD Q.
ScaResult sca_solve(double eta, const CMatrix& Q_init, const LiftedProblemData& data, const ZfOptions& opts);

struct ZfResult {
  PhaseVector theta;
  BeamformerPair beamformers;
  ZfIterTrace trace;
  CMatrix relaxed_Q;
  double eta = 0.0;
  double delta = 0.0;
  double relaxed_w = 0.0;
  double power = 0.0;
  bool rank_one = false;
};

/// Dinkelbach iteration over eta with SCA inner solves, then extraction and
/// zero-forcing beamformer recovery.
ZfResult optimize_phases_zfbf(const LiftedProblemData& data, const ZfOptions& opts = {});

}  // namespace irsnoma
