#pragma once

#include <optional>
#include <string>

#include "irsnoma/noma_phase_opt.hpp"
#include "irsnoma/zfbf_phase_opt.hpp"

namespace irsnoma {

enum class ChosenScheme { Noma, Zfbf, ZfbfFallback };
enum class DecisionReason { ImprovedQdHolds, OrthogonalityFeasible, Neither };

const char* to_string(ChosenScheme s);
const char* to_string(DecisionReason r);

struct SchemeDecision {
  ChosenScheme chosen = ChosenScheme::ZfbfFallback;
  DecisionReason reason = DecisionReason::Neither;
  double lambda_max = 0.0;  // of Y1 - Y2
  double r_norm = 0.0;      // ||R||_F
};

/// Orthogonality is tested first: when R = 0 every configuration gives
/// orthogonal channels, quasi-degradation can never hold, and ZF is optimal.
SchemeDecision select_scheme(const LiftedProblemData& data, const Tolerances& tol = default_tolerances());

struct HybridOptions {
  NomaOptions noma;
  ZfOptions zf;
  /// After a ZF solve, switch to the NOMA closed form at the same phases when
  /// those channels are quasi-degraded (never worse at fixed phases).
  bool upgrade_zf_to_noma = true;
  /// When the LMI-constrained relaxation is infeasible, rerun the NOMA path
  /// without it. Candidates must still pass the exact quasi-degradation test,
  /// so the closed-form beamformers remain valid.
  bool relax_lmi_on_infeasible = true;
};

struct SolveReport {
  SchemeDecision decision;
  Scheme scheme = Scheme::Zfbf;  // scheme of the returned beamformers
  PhaseVector theta;
  BeamformerPair beamformers;
  double power_w = 0.0;
  bool fallback_used = false;  // NOMA path failed and ZF took over
  bool lmi_dropped = false;    // NOMA path ran without the LMI
  bool upgraded = false;       // ZF phases, NOMA beamformers
  std::string noma_failure;
  std::optional<NomaResult> noma;
  std::optional<ZfResult> zf;
  int iterations = 0;
  double wall_time_s = 0.0;
};

/// Dispatches on select_scheme. A NOMA-path failure (infeasible relaxation or
/// no acceptable candidate) falls back to the ZF path; errors of the ZF path
/// propagate.
SolveReport solve_hybrid(const ChannelSet& ch, const QosSpec& qos, const HybridOptions& opts = {});
SolveReport solve_hybrid(const LiftedProblemData& data, const HybridOptions& opts = {});

}  // namespace irsnoma
