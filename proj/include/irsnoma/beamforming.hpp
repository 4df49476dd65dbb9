#pragma once

#include "irsnoma/channel_model.hpp"

namespace irsnoma {

enum class Scheme { Noma, Zfbf, Ofdma };

const char* to_string(Scheme s);

struct BeamformerPair {
  CVector w1;
  CVector w2;
  Scheme scheme = Scheme::Noma;
  double power = 0.0;  // ||w1||^2 + ||w2||^2
};

struct SinrReport {
  double snr1 = 0.0;
  double sinr21 = 0.0;  // user 2's signal decoded at user 1 (SIC stage)
  double sinr22 = 0.0;
  double rate1 = 0.0;
  double rate2 = 0.0;   // min(sinr21, sinr22) for NOMA, sinr22 otherwise
};

/// Closed-form minimum-power NOMA beamformers with decoding order (2, 1).
/// Requires the quasi-degradation condition; throws QdViolation otherwise.
BeamformerPair noma_beamformers(const CVector& h1, const CVector& h2, const QosSpec& qos,
                                const Tolerances& tol = default_tolerances());

/// Zero-forcing beamformers meeting both targets with equality.
BeamformerPair zf_beamformers(const CVector& h1, const CVector& h2, const QosSpec& qos,
                              const Tolerances& tol = default_tolerances());

double noma_power(const CVector& h1, const CVector& h2, const QosSpec& qos,
                  const Tolerances& tol = default_tolerances());
double zf_power(const CVector& h1, const CVector& h2, const QosSpec& qos,
                const Tolerances& tol = default_tolerances());

SinrReport evaluate_sinr(const CVector& h1, const CVector& h2, const BeamformerPair& pair, const QosSpec& qos,
                         RateConvention convention = RateConvention::Bits);

struct SchemeComparison {
  double p_noma = 0.0;
  double p_zfbf = 0.0;
  bool noma_wins = true;
  bool collinear = false;  // p_zfbf is +inf
};

SchemeComparison compare_schemes(const CVector& h1, const CVector& h2, const QosSpec& qos,
                                 const Tolerances& tol = default_tolerances());

}  // namespace irsnoma
