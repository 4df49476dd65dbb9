#pragma once

#include <array>
#include <cstdint>
#include <random>

#include "irsnoma/linalg.hpp"

namespace irsnoma {

enum class RateConvention { Bits, Nats };

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

double distance(Point2 a, Point2 b);

/// Geometry, link budget and QoS targets of one two-user scenario.
struct ScenarioConfig {
  int num_antennas = 4;    // M
  int num_elements = 10;   // N
  Point2 bs_pos{0.0, 0.0};
  Point2 irs_pos{20.0, 20.0};
  Point2 user1_pos{100.0, 100.0};
  Point2 user2_pos{200.0, 150.0};
  double path_loss_exponent = 3.0;
  double bandwidth_hz = 10e6;
  double noise_density_dbm_per_hz = -174.0;
  std::array<double, 2> target_rates{1.0, 1.0};
  RateConvention rate_convention = RateConvention::Bits;
  bool pathloss_on_amplitude = false;  // literal h = d^-a g instead of sqrt(d^-a) g
  double min_distance = 0.1;           // distances are floored here (meters)
  std::uint64_t seed = 1;

  /// Throws Error{Config} on violated invariants.
  void validate() const;
};

/// Raw channels. `h_r1`/`h_r2` hold the surface-to-user coefficients in the
/// orientation used by Phi_k = diag(h_rk) G, so that the user-k row channel is
/// h_k^H = v^H Phi_k + h_dk^H.
struct ChannelSet {
  CMatrix G;     // N x M
  CVector h_r1;  // N
  CVector h_r2;  // N
  CVector h_d1;  // M
  CVector h_d2;  // M

  int num_antennas() const { return static_cast<int>(G.cols()); }
  int num_elements() const { return static_cast<int>(G.rows()); }
  const CVector& h_r(int k) const { return k == 1 ? h_r1 : h_r2; }
  const CVector& h_d(int k) const { return k == 1 ? h_d1 : h_d2; }
  void check_dimensions() const;
};

/// Unit-variance small-scale fading, before any path loss is applied.
struct FadingDraw {
  CMatrix g_r;   // N x M
  CVector g_r1;  // N
  CVector g_r2;  // N
  CVector g_1;   // M
  CVector g_2;   // M
};

struct PhaseVector {
  RVector theta;  // N angles, wrapped into [0, 2pi)

  PhaseVector() = default;
  explicit PhaseVector(RVector angles);
  static PhaseVector zeros(int n) { return PhaseVector(RVector::Zero(n)); }

  int size() const { return static_cast<int>(theta.size()); }
  /// e^{j theta_n}
  CVector coefficients() const;
  /// [v; 1] with v_n = e^{-j theta_n}
  CVector lifted_vector() const;
};

struct QosSpec {
  double r1_min = 1.0;
  double r2_min = 1.0;
  double sigma2 = 1.0;

  void validate() const;
};

struct LiftedProblemData {
  CMatrix upsilon1;  // (N+1) x (N+1)
  CMatrix upsilon2;
  CMatrix cross_R;
  CMatrix chi1;      // M x (N+1)
  CMatrix chi2;
  QosSpec qos;

  int lifted_dim() const { return static_cast<int>(upsilon1.rows()); }
  int num_antennas() const { return static_cast<int>(chi1.rows()); }
  const CMatrix& upsilon(int k) const { return k == 1 ? upsilon1 : upsilon2; }
  const CMatrix& chi(int k) const { return k == 1 ? chi1 : chi2; }
};

struct LiftedMatrix {
  CMatrix Q;
  bool rank_one = false;
};

/// Counter-based stream derivation: a distinct, reproducible engine for every
/// (seed, stream, component) triple.
std::mt19937_64 make_engine(std::uint64_t seed, std::uint64_t stream, std::uint64_t component = 0);

/// One circularly-symmetric complex Gaussian sample with unit variance.
Complex complex_normal(std::mt19937_64& engine);

FadingDraw draw_fading(int num_antennas, int num_elements, std::uint64_t seed, std::uint64_t stream);
/// Amplitude factor applied to a unit-variance draw at distance d.
double path_loss_amplitude(const ScenarioConfig& cfg, double d);
ChannelSet apply_path_loss(const ScenarioConfig& cfg, const FadingDraw& fading);
ChannelSet synthesize_channels(const ScenarioConfig& cfg, std::uint64_t stream);

double noise_power(const ScenarioConfig& cfg);
double snr_target(double rate, RateConvention convention);
QosSpec make_qos(const ScenarioConfig& cfg);

CMatrix phi_matrix(const ChannelSet& ch, int k);
CVector composite_channel(const ChannelSet& ch, const PhaseVector& theta, int k);
/// h_k = chi_k [v; 1]; identical to composite_channel for the source channels.
CVector composite_channel(const LiftedProblemData& data, const PhaseVector& theta, int k);

LiftedProblemData build_lifted(const ChannelSet& ch, const QosSpec& qos);

double cos2_alpha(const CVector& h1, const CVector& h2,
                  const Tolerances& tol = default_tolerances());

LiftedMatrix lift(const PhaseVector& theta);

}  // namespace irsnoma
