#include <doctest.h>

#include <cmath>

#include "irsnoma/errors.hpp"
#include "irsnoma/hybrid_policy.hpp"
#include "irsnoma/quasi_degradation.hpp"
#include "test_util.hpp"

using namespace irsnoma;
using namespace irsnoma::testutil;

namespace {

const QosSpec kUnit{1.0, 1.0, 1.0};

// User 1 sees antennas {0, 1}, user 2 sees antennas {2, 3}, for every phase.
ChannelSet separated_channels(std::mt19937_64& eng) {
  ChannelSet ch;
  ch.G = CMatrix::Zero(2, 4);
  ch.G.block(0, 0, 1, 2) = random_cmat(eng, 1, 2);
  ch.G.block(1, 2, 1, 2) = random_cmat(eng, 1, 2);
  ch.h_r1 = CVector::Zero(2);
  ch.h_r2 = CVector::Zero(2);
  ch.h_r1(0) = complex_normal(eng);
  ch.h_r2(1) = complex_normal(eng);
  ch.h_d1 = CVector::Zero(4);
  ch.h_d2 = CVector::Zero(4);
  ch.h_d1.head(2) = random_cvec(eng, 2);
  ch.h_d2.tail(2) = random_cvec(eng, 2);
  return ch;
}

}  // namespace

TEST_CASE("dominant first user selects noma") {
  auto eng = make_engine(81, 0);
  ChannelSet ch = random_channels(eng, 3, 3);
  ch.h_r1 = std::sqrt(2.0) * ch.h_r2;
  ch.h_d1 = std::sqrt(2.0) * ch.h_d2;
  const SchemeDecision d = select_scheme(build_lifted(ch, kUnit));
  CHECK(d.chosen == ChosenScheme::Noma);
  CHECK(d.reason == DecisionReason::ImprovedQdHolds);
  CHECK(d.lambda_max > 0.0);
}

TEST_CASE("vanishing cross matrix selects zf") {
  auto eng = make_engine(82, 0);
  const SchemeDecision d = select_scheme(build_lifted(separated_channels(eng), kUnit));
  CHECK(d.chosen == ChosenScheme::Zfbf);
  CHECK(d.reason == DecisionReason::OrthogonalityFeasible);
  CHECK(d.r_norm <= 1e-12);
}

TEST_CASE("dominant second user with coupling selects the fallback") {
  // M > N so that Y1 is nonsingular and Y1 - Y2 = -Y1 is negative definite.
  auto eng = make_engine(83, 0);
  ChannelSet ch = random_channels(eng, 4, 2);
  ch.h_r2 = std::sqrt(2.0) * ch.h_r1;
  ch.h_d2 = std::sqrt(2.0) * ch.h_d1;
  const SchemeDecision d = select_scheme(build_lifted(ch, kUnit));
  CHECK(d.chosen == ChosenScheme::ZfbfFallback);
  CHECK(d.reason == DecisionReason::Neither);
  CHECK(d.lambda_max < 0.0);
}

TEST_CASE("orthogonal subspaces give the decoupled single-user power") {
  auto eng = make_engine(84, 0);
  const ChannelSet ch = separated_channels(eng);
  const QosSpec q{1.0, 3.0, 0.5};
  const SolveReport r = solve_hybrid(ch, q);
  CHECK(r.scheme == Scheme::Zfbf);
  const CVector h1 = composite_channel(ch, r.theta, 1), h2 = composite_channel(ch, r.theta, 2);
  const double decoupled = q.sigma2 * (q.r1_min / h1.squaredNorm() + q.r2_min / h2.squaredNorm());
  CHECK(rel_gap(r.power_w, decoupled) <= 1e-10);
}

TEST_CASE("all-zero channels raise a typed error") {
  ChannelSet ch;
  ch.G = CMatrix::Zero(2, 2);
  ch.h_r1 = ch.h_r2 = CVector::Zero(2);
  ch.h_d1 = ch.h_d2 = CVector::Zero(2);
  CHECK_THROWS_AS(solve_hybrid(ch, kUnit), Error);
}

TEST_CASE("hybrid reports are consistent and never lose to zf at their phases") {
  int noma = 0, zf = 0;
  for (std::uint64_t t = 0; t < 20; ++t) {
    auto eng = make_engine(85, t);
    ChannelSet ch = random_channels(eng, 2, 3);
    const double s = 0.1 + 0.1 * static_cast<double>(t % 10);
    ch.h_r2 *= s;
    ch.h_d2 *= s;
    SolveReport r;
    try {
      r = solve_hybrid(ch, kUnit);
    } catch (const Error&) {
      continue;  // a typed error is an acceptable outcome
    }
    const BeamformerPair& bf = r.beamformers;
    CHECK(rel_gap(r.power_w, bf.w1.squaredNorm() + bf.w2.squaredNorm()) <= 1e-12);
    const CVector h1 = composite_channel(ch, r.theta, 1), h2 = composite_channel(ch, r.theta, 2);
    const SinrReport sr = evaluate_sinr(h1, h2, bf, kUnit);
    CHECK(sr.snr1 >= kUnit.r1_min * (1.0 - 1e-8));
    CHECK(sr.sinr22 >= kUnit.r2_min * (1.0 - 1e-8));
    const SchemeComparison c = compare_schemes(h1, h2, kUnit);
    CHECK(c.p_noma <= c.p_zfbf * (1.0 + 1e-12));
    if (r.scheme == Scheme::Noma) {
      ++noma;
      CHECK(qd_holds(h1, h2, kUnit).holds);
      CHECK(r.power_w <= zf_power(h1, h2, kUnit) * (1.0 + 1e-12));
      CHECK(sr.sinr21 >= kUnit.r2_min * (1.0 - 1e-8));
    } else {
      ++zf;
    }
  }
  CHECK(noma + zf > 0);
}

TEST_CASE("strict mode reports the fallback when the relaxation is infeasible") {
  ScenarioConfig cfg;
  const ChannelSet ch = synthesize_channels(cfg, 0);
  const LiftedProblemData d = build_lifted(ch, make_qos(cfg));
  HybridOptions o;
  o.relax_lmi_on_infeasible = false;
  o.upgrade_zf_to_noma = false;
  const SolveReport r = solve_hybrid(d, o);
  if (r.decision.chosen == ChosenScheme::Noma && r.fallback_used) {
    CHECK(r.scheme == Scheme::Zfbf);
    CHECK_FALSE(r.noma_failure.empty());
    CHECK(r.zf.has_value());
  }
  HybridOptions relaxed;
  const SolveReport r2 = solve_hybrid(d, relaxed);
  CHECK(r2.power_w <= r.power_w * (1.0 + 1e-9));
}

TEST_CASE("upgrading zf phases to noma never raises power") {
  for (std::uint64_t t = 0; t < 10; ++t) {
    ScenarioConfig cfg;
    cfg.seed = 100 + t;
    const ChannelSet ch = synthesize_channels(cfg, 0);
    const LiftedProblemData d = build_lifted(ch, make_qos(cfg));
    HybridOptions plain;
    plain.upgrade_zf_to_noma = false;
    plain.relax_lmi_on_infeasible = false;
    const SolveReport a = solve_hybrid(d, plain);
    HybridOptions up = plain;
    up.upgrade_zf_to_noma = true;
    const SolveReport b = solve_hybrid(d, up);
    CHECK(b.power_w <= a.power_w * (1.0 + 1e-12));
    if (b.upgraded) CHECK(b.scheme == Scheme::Noma);
  }
}
