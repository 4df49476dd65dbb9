#include "irsnoma/beamforming.hpp"

#include <cmath>
#include <limits>

#include "irsnoma/errors.hpp"
#include "irsnoma/quasi_degradation.hpp"

namespace irsnoma {

namespace {

struct Geometry {
  double n1;    // ||h1||^2
  double n2;    // ||h2||^2
  double cos2;
  double sin2;
};

Geometry geometry(const CVector& h1, const CVector& h2, const Tolerances& tol) {
  const double c = cos2_alpha(h1, h2, tol);
  return {h1.squaredNorm(), h2.squaredNorm(), c, 1.0 - c};
}

double rate_of(double sinr, RateConvention convention) {
  return convention == RateConvention::Bits ? std::log2(1.0 + sinr) : std::log1p(sinr);
}

}  // namespace

const char* to_string(Scheme s) {
  switch (s) {
    case Scheme::Noma: return "noma";
    case Scheme::Zfbf: return "zfbf";
    case Scheme::Ofdma: return "ofdma";
  }
  return "unknown";
}

BeamformerPair noma_beamformers(const CVector& h1, const CVector& h2, const QosSpec& qos, const Tolerances& tol) {
  const Geometry g = geometry(h1, h2, tol);
  if (!qd_holds(h1, h2, qos, tol).holds) {
    throw Error(ErrorCode::QdViolation, "channels are not quasi-degraded");
  }
  const double r1 = qos.r1_min;
  const double r2 = qos.r2_min;
  const double s2 = qos.sigma2;
  const CVector e1 = h1 / std::sqrt(g.n1);
  const CVector e2 = h2 / std::sqrt(g.n2);
  const double k = 1.0 + r2 * g.sin2;
  const double phi1 = std::sqrt(r1 * s2 / (g.n1 * k * k));
  const double phi2 = std::sqrt(r2 * s2 / g.n2 + r1 * s2 * r2 * g.cos2 / (g.n1 * k * k));
  BeamformerPair p;
  p.scheme = Scheme::Noma;
  p.w1 = phi1 * ((1.0 + r2) * e1 - r2 * e2.dot(e1) * e2);
  p.w2 = phi2 * e2;
  p.power = p.w1.squaredNorm() + p.w2.squaredNorm();
  return p;
}

BeamformerPair zf_beamformers(const CVector& h1, const CVector& h2, const QosSpec& qos, const Tolerances& tol) {
  const Geometry g = geometry(h1, h2, tol);
  if (g.sin2 <= tol.collinear_sin2) throw Error(ErrorCode::CollinearChannels, "channels are collinear");
  const double d = g.n1 * g.n2 * g.sin2;
  const CVector a1 = g.n2 * h1 - h2.dot(h1) * h2;
  const CVector a2 = g.n1 * h2 - h1.dot(h2) * h1;
  BeamformerPair p;
  p.scheme = Scheme::Zfbf;
  p.w1 = std::sqrt(qos.r1_min * qos.sigma2) / d * a1;
  p.w2 = std::sqrt(qos.r2_min * qos.sigma2) / d * a2;
  p.power = p.w1.squaredNorm() + p.w2.squaredNorm();
  return p;
}

double noma_power(const CVector& h1, const CVector& h2, const QosSpec& qos, const Tolerances& tol) {
  const Geometry g = geometry(h1, h2, tol);
  const double r1 = qos.r1_min;
  const double r2 = qos.r2_min;
  return r1 * (1.0 + r2) * qos.sigma2 / (g.n1 * (1.0 + r2 * g.sin2)) + r2 * qos.sigma2 / g.n2;
}

double zf_power(const CVector& h1, const CVector& h2, const QosSpec& qos, const Tolerances& tol) {
  const Geometry g = geometry(h1, h2, tol);
  if (g.sin2 <= tol.collinear_sin2) throw Error(ErrorCode::CollinearChannels, "channels are collinear");
  return qos.sigma2 / g.sin2 * (qos.r1_min / g.n1 + qos.r2_min / g.n2);
}

SinrReport evaluate_sinr(const CVector& h1, const CVector& h2, const BeamformerPair& pair, const QosSpec& qos,
                         RateConvention convention) {
  if (h1.size() != h2.size() || pair.w1.size() != h1.size() || pair.w2.size() != h1.size()) {
    throw Error(ErrorCode::DimensionMismatch, "beamformer and channel lengths differ");
  }
  const double g11 = std::norm(h1.dot(pair.w1));
  const double g12 = std::norm(h1.dot(pair.w2));
  const double g21 = std::norm(h2.dot(pair.w1));
  const double g22 = std::norm(h2.dot(pair.w2));
  SinrReport r;
  r.snr1 = g11 / qos.sigma2;
  r.sinr21 = g12 / (g11 + qos.sigma2);
  r.sinr22 = g22 / (g21 + qos.sigma2);
  r.rate1 = rate_of(r.snr1, convention);
  // Only NOMA has user 1 decode user 2's stream before its own.
  r.rate2 = rate_of(pair.scheme == Scheme::Noma ? std::min(r.sinr21, r.sinr22) : r.sinr22, convention);
  return r;
}

SchemeComparison compare_schemes(const CVector& h1, const CVector& h2, const QosSpec& qos, const Tolerances& tol) {
  SchemeComparison c;
  c.p_noma = noma_power(h1, h2, qos, tol);
  const Geometry g = geometry(h1, h2, tol);
  if (g.sin2 <= tol.collinear_sin2) {
    c.collinear = true;
    c.p_zfbf = std::numeric_limits<double>::infinity();
  } else {
    c.p_zfbf = zf_power(h1, h2, qos, tol);
  }
  c.noma_wins = c.p_noma <= c.p_zfbf;
  return c;
}

}  // namespace irsnoma
