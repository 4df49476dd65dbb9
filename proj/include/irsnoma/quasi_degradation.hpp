#pragma once

#include <vector>

#include "irsnoma/channel_model.hpp"

namespace irsnoma {

/// Outcome of the quasi-degradation inequality lhs <= rhs.
struct QdVerdict {
  bool holds = false;
  double lhs = 0.0;
  double rhs = 0.0;
  double margin = 0.0;  // rhs - lhs
};

/// (1 + r1) / c - r1 c / (1 + r2 (1 - c))^2 for c = cos^2(alpha) in (0, 1].
double qd_lhs(double cos2, double r1, double r2);

QdVerdict qd_holds(const CVector& h1, const CVector& h2, const QosSpec& qos,
                   const Tolerances& tol = default_tolerances());

struct ImprovedQd {
  bool holds = false;
  double lambda_max = 0.0;
};

/// Surface-assisted sufficient condition: lambda_max(Y1 - Y2) >= 0.
ImprovedQd improved_qd(const LiftedProblemData& data, const Tolerances& tol = default_tolerances());

/// chi1 Q chi1^H - (1 + r1) chi2 Q chi2^H
CMatrix lmi_matrix(const CMatrix& Q, const LiftedProblemData& data);

/// Convex sufficient condition: lmi_matrix(Q) is PSD.
bool lmi_qd_holds(const LiftedMatrix& Q, const LiftedProblemData& data,
                  const Tolerances& tol = default_tolerances());

/// True iff R = 0, i.e. every phase configuration gives orthogonal channels.
bool orthogonality_feasible(const LiftedProblemData& data, const Tolerances& tol = default_tolerances());

enum class RegionMode { NoIrs, Improved };

struct GridSpec {
  double x_min = 0.0;
  double x_max = 10.0;
  double y_min = 0.0;
  double y_max = 10.0;
  int nx = 41;
  int ny = 41;
};

struct RegionCell {
  double x = 0.0;
  double y = 0.0;
  bool holds = false;
  double margin = 0.0;
};

/// Sweeps user 2 over `grid` with one shared fading draw and evaluates the
/// selected feasibility test in every cell. Cells are row-major in y then x.
std::vector<RegionCell> region_map(const ScenarioConfig& cfg, const FadingDraw& fading,
                                   const GridSpec& grid, RegionMode mode,
                                   const Tolerances& tol = default_tolerances());

/// Convenience overload drawing the fading from (cfg.seed, stream 0).
std::vector<RegionCell> region_map(const ScenarioConfig& cfg, const GridSpec& grid, RegionMode mode);

std::size_t count_holding(const std::vector<RegionCell>& cells);

}  // namespace irsnoma
