#include "irsnoma/quasi_degradation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "irsnoma/errors.hpp"

namespace irsnoma {

double qd_lhs(double cos2, double r1, double r2) {
  if (cos2 <= 0.0) return std::numeric_limits<double>::infinity();
  const double denom = 1.0 + r2 * (1.0 - cos2);
  return (1.0 + r1) / cos2 - r1 * cos2 / (denom * denom);
}

QdVerdict qd_holds(const CVector& h1, const CVector& h2, const QosSpec& qos, const Tolerances& tol) {
  const double c = cos2_alpha(h1, h2, tol);
  QdVerdict v;
  v.rhs = h1.squaredNorm() / h2.squaredNorm();
  v.lhs = qd_lhs(c, qos.r1_min, qos.r2_min);
  v.margin = v.rhs - v.lhs;
  // Orthogonal channels make the left side diverge; the constraint cannot hold.
  v.holds = c > 0.0 && v.margin >= -tol.qd_margin;
  return v;
}

ImprovedQd improved_qd(const LiftedProblemData& data, const Tolerances& tol) {
  const CMatrix diff = data.upsilon1 - data.upsilon2;
  ImprovedQd out;
  out.lambda_max = max_eigenvalue(diff);
  out.holds = out.lambda_max >= -tol.improved_qd_rel * diff.norm();
  return out;
}

CMatrix lmi_matrix(const CMatrix& Q, const LiftedProblemData& data) {
  if (Q.rows() != data.lifted_dim() || Q.cols() != data.lifted_dim()) {
    throw Error(ErrorCode::DimensionMismatch, "lifted matrix size differs from N + 1");
  }
  const CMatrix a = data.chi1 * Q * data.chi1.adjoint();
  const CMatrix b = data.chi2 * Q * data.chi2.adjoint();
  return hermitian_part(a - (1.0 + data.qos.r1_min) * b);
}

bool lmi_qd_holds(const LiftedMatrix& Q, const LiftedProblemData& data, const Tolerances& tol) {
  const CMatrix a = data.chi1 * Q.Q * data.chi1.adjoint();
  const CMatrix b = (1.0 + data.qos.r1_min) * (data.chi2 * Q.Q * data.chi2.adjoint());
  const double scale = a.norm() + b.norm();
  if (scale == 0.0) return true;
  return min_eigenvalue(a - b) >= -tol.lmi_psd_rel * scale;
}

bool orthogonality_feasible(const LiftedProblemData& data, const Tolerances& tol) {
  const double ref = std::sqrt(data.upsilon1.norm() * data.upsilon2.norm());
  return data.cross_R.norm() <= tol.orthogonality_rel * ref;
}

std::vector<RegionCell> region_map(const ScenarioConfig& cfg, const FadingDraw& fading,
                                   const GridSpec& grid, RegionMode mode, const Tolerances& tol) {
  std::vector<RegionCell> cells;
  if (grid.nx <= 0 || grid.ny <= 0) return cells;
  const QosSpec qos = make_qos(cfg);
  cells.reserve(static_cast<std::size_t>(grid.nx) * static_cast<std::size_t>(grid.ny));
  auto coord = [](double lo, double hi, int count, int i) {
    return count == 1 ? lo : lo + (hi - lo) * i / (count - 1);
  };
  for (int iy = 0; iy < grid.ny; ++iy) {
    for (int ix = 0; ix < grid.nx; ++ix) {
      ScenarioConfig c = cfg;
      c.user2_pos = {coord(grid.x_min, grid.x_max, grid.nx, ix), coord(grid.y_min, grid.y_max, grid.ny, iy)};
      const ChannelSet ch = apply_path_loss(c, fading);
      RegionCell cell{c.user2_pos.x, c.user2_pos.y, false, 0.0};
      if (mode == RegionMode::NoIrs) {
        const QdVerdict v = qd_holds(ch.h_d1, ch.h_d2, qos, tol);
        cell.holds = v.holds;
        cell.margin = v.margin;
      } else {
        const ImprovedQd v = improved_qd(build_lifted(ch, qos), tol);
        cell.holds = v.holds;
        cell.margin = v.lambda_max;
      }
      cells.push_back(cell);
    }
  }
  return cells;
}

std::vector<RegionCell> region_map(const ScenarioConfig& cfg, const GridSpec& grid, RegionMode mode) {
  cfg.validate();
  return region_map(cfg, draw_fading(cfg.num_antennas, cfg.num_elements, cfg.seed, 0), grid, mode);
}

std::size_t count_holding(const std::vector<RegionCell>& cells) {
  return static_cast<std::size_t>(std::count_if(cells.begin(), cells.end(), [](const RegionCell& c) { return c.holds; }));
}

}  // namespace irsnoma
