#include "irsnoma/channel_model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "irsnoma/errors.hpp"

namespace irsnoma {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

double wrap_angle(double a) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double w = std::fmod(a, two_pi);
  if (w < 0.0) w += two_pi;
  if (w >= two_pi) w = 0.0;
  return w;
}

void require(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorCode::Config, what);
}

}  // namespace

double distance(Point2 a, Point2 b) { return std::hypot(a.x - b.x, a.y - b.y); }

void ScenarioConfig::validate() const {
  require(num_antennas >= 2, "num_antennas must be >= 2");
  require(num_elements >= 1, "num_elements must be >= 1");
  require(bandwidth_hz > 0.0, "bandwidth_hz must be positive");
  require(target_rates[0] > 0.0 && target_rates[1] > 0.0, "target rates must be positive");
  require(min_distance > 0.0, "min_distance must be positive");
  require(std::isfinite(path_loss_exponent), "path_loss_exponent must be finite");
}

void ChannelSet::check_dimensions() const {
  const auto n = G.rows();
  const auto m = G.cols();
  if (h_r1.size() != n || h_r2.size() != n || h_d1.size() != m || h_d2.size() != m) {
    throw Error(ErrorCode::DimensionMismatch, "channel set dimensions are inconsistent");
  }
}

PhaseVector::PhaseVector(RVector angles) : theta(std::move(angles)) {
  for (auto& a : theta) a = wrap_angle(a);
}

CVector PhaseVector::coefficients() const {
  CVector c(theta.size());
  for (Eigen::Index n = 0; n < theta.size(); ++n) c(n) = std::polar(1.0, theta(n));
  return c;
}

CVector PhaseVector::lifted_vector() const {
  CVector v(theta.size() + 1);
  for (Eigen::Index n = 0; n < theta.size(); ++n) v(n) = std::polar(1.0, -theta(n));
  v(theta.size()) = 1.0;
  return v;
}

void QosSpec::validate() const {
  if (!(r1_min > 0.0 && r2_min > 0.0 && sigma2 > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "QoS targets and noise power must be positive");
  }
}

std::mt19937_64 make_engine(std::uint64_t seed, std::uint64_t stream, std::uint64_t component) {
  const std::uint64_t s = splitmix64(splitmix64(splitmix64(seed) ^ stream) ^ (component * 0xD6E8FEB86659FD93ULL));
  std::seed_seq seq{static_cast<std::uint32_t>(s), static_cast<std::uint32_t>(s >> 32)};
  return std::mt19937_64(seq);
}

Complex complex_normal(std::mt19937_64& engine) {
  std::normal_distribution<double> nd(0.0, std::sqrt(0.5));
  const double re = nd(engine);
  const double im = nd(engine);
  return {re, im};
}

FadingDraw draw_fading(int num_antennas, int num_elements, std::uint64_t seed, std::uint64_t stream) {
  // One engine per component; G is filled antenna by antenna so that a smaller
  // M reuses the leading columns of a larger one under the same stream.
  FadingDraw f;
  const int m = num_antennas;
  const int n = num_elements;
  f.g_r.resize(n, m);
  for (int col = 0; col < m; ++col) {
    auto eng = make_engine(seed, stream, 100 + static_cast<std::uint64_t>(col));
    for (int row = 0; row < n; ++row) f.g_r(row, col) = complex_normal(eng);
  }
  auto fill = [&](CVector& v, int len, std::uint64_t component) {
    auto eng = make_engine(seed, stream, component);
    v.resize(len);
    for (int i = 0; i < len; ++i) v(i) = complex_normal(eng);
  };
  fill(f.g_r1, n, 1);
  fill(f.g_r2, n, 2);
  fill(f.g_1, m, 3);
  fill(f.g_2, m, 4);
  return f;
}

double path_loss_amplitude(const ScenarioConfig& cfg, double d) {
  const double dd = std::max(d, cfg.min_distance);
  const double power_gain = std::pow(dd, -cfg.path_loss_exponent);
  return cfg.pathloss_on_amplitude ? power_gain : std::sqrt(power_gain);
}

ChannelSet apply_path_loss(const ScenarioConfig& cfg, const FadingDraw& fading) {
  ChannelSet ch;
  ch.G = path_loss_amplitude(cfg, distance(cfg.bs_pos, cfg.irs_pos)) * fading.g_r;
  ch.h_r1 = path_loss_amplitude(cfg, distance(cfg.irs_pos, cfg.user1_pos)) * fading.g_r1;
  ch.h_r2 = path_loss_amplitude(cfg, distance(cfg.irs_pos, cfg.user2_pos)) * fading.g_r2;
  ch.h_d1 = path_loss_amplitude(cfg, distance(cfg.bs_pos, cfg.user1_pos)) * fading.g_1;
  ch.h_d2 = path_loss_amplitude(cfg, distance(cfg.bs_pos, cfg.user2_pos)) * fading.g_2;
  return ch;
}

ChannelSet synthesize_channels(const ScenarioConfig& cfg, std::uint64_t stream) {
  cfg.validate();
  return apply_path_loss(cfg, draw_fading(cfg.num_antennas, cfg.num_elements, cfg.seed, stream));
}

double noise_power(const ScenarioConfig& cfg) {
  return cfg.bandwidth_hz * std::pow(10.0, (cfg.noise_density_dbm_per_hz - 30.0) / 10.0);
}

double snr_target(double rate, RateConvention convention) {
  if (!(rate > 0.0)) throw Error(ErrorCode::InvalidArgument, "rate must be positive");
  return convention == RateConvention::Bits ? std::expm1(rate * std::numbers::ln2) : std::expm1(rate);
}

QosSpec make_qos(const ScenarioConfig& cfg) {
  QosSpec q;
  q.r1_min = snr_target(cfg.target_rates[0], cfg.rate_convention);
  q.r2_min = snr_target(cfg.target_rates[1], cfg.rate_convention);
  q.sigma2 = noise_power(cfg);
  return q;
}

CMatrix phi_matrix(const ChannelSet& ch, int k) {
  ch.check_dimensions();
  return ch.h_r(k).asDiagonal() * ch.G;
}

CVector composite_channel(const ChannelSet& ch, const PhaseVector& theta, int k) {
  ch.check_dimensions();
  if (theta.size() != ch.num_elements()) {
    throw Error(ErrorCode::DimensionMismatch, "phase vector length differs from N");
  }
  // h_k^H = v^H Phi_k + h_dk^H  =>  h_k = Phi_k^H v + h_dk
  const CVector v = theta.lifted_vector().head(ch.num_elements());
  return phi_matrix(ch, k).adjoint() * v + ch.h_d(k);
}

CVector composite_channel(const LiftedProblemData& data, const PhaseVector& theta, int k) {
  if (theta.size() + 1 != data.lifted_dim()) {
    throw Error(ErrorCode::DimensionMismatch, "phase vector length differs from N");
  }
  return data.chi(k) * theta.lifted_vector();
}

LiftedProblemData build_lifted(const ChannelSet& ch, const QosSpec& qos) {
  ch.check_dimensions();
  const int n = ch.num_elements();
  const int m = ch.num_antennas();
  LiftedProblemData d;
  d.qos = qos;
  d.chi1.resize(m, n + 1);
  d.chi2.resize(m, n + 1);
  d.chi1 << phi_matrix(ch, 1).adjoint(), ch.h_d1;
  d.chi2 << phi_matrix(ch, 2).adjoint(), ch.h_d2;
  d.upsilon1 = hermitian_part(d.chi1.adjoint() * d.chi1);
  d.upsilon2 = hermitian_part(d.chi2.adjoint() * d.chi2);
  d.cross_R = d.chi1.adjoint() * d.chi2;
  return d;
}

double cos2_alpha(const CVector& h1, const CVector& h2, const Tolerances& tol) {
  if (h1.size() != h2.size()) throw Error(ErrorCode::DimensionMismatch, "cos2_alpha operands differ in length");
  const double n1 = h1.squaredNorm();
  const double n2 = h2.squaredNorm();
  if (n1 < tol.zero_channel || n2 < tol.zero_channel) {
    throw Error(ErrorCode::ZeroChannel, "cos2_alpha of a zero channel");
  }
  // Cauchy-Schwarz bounds this by 1; clamping absorbs roundoff.
  return std::clamp(std::norm(h1.dot(h2)) / (n1 * n2), 0.0, 1.0);
}

LiftedMatrix lift(const PhaseVector& theta) {
  const CVector v = theta.lifted_vector();
  return LiftedMatrix{v * v.adjoint(), true};
}

}  // namespace irsnoma
