#include <doctest.h>

#include <cmath>

#include "irsnoma/errors.hpp"
#include "irsnoma/zfbf_phase_opt.hpp"
#include "test_util.hpp"

using namespace irsnoma;
using namespace irsnoma::testutil;

namespace {

// Unit-diagonal PSD matrix that is generally not rank one.
CMatrix random_relaxed(std::mt19937_64& eng, int n, int rank) {
  const CMatrix v = random_cmat(eng, n, rank);
  CMatrix q = v * v.adjoint();
  const RVector d = q.diagonal().real().cwiseSqrt().cwiseInverse();
  return hermitian_part(d.asDiagonal() * q * d.asDiagonal());
}

}  // namespace

TEST_CASE("w objective equals zf power at lifted phases") {
  auto eng = make_engine(61, 0);
  for (int t = 0; t < 1000; ++t) {
    const int m = 2 + t % 3, n = 1 + t % 5;
    const ChannelSet ch = random_channels(eng, m, n);
    const QosSpec q{1.0 + 0.01 * (t % 50), 0.5, 2.0};
    const LiftedProblemData d = build_lifted(ch, q);
    const PhaseVector th = random_phases(eng, n);
    const double z = zf_power(composite_channel(ch, th, 1), composite_channel(ch, th, 2), q);
    CHECK(rel_gap(w_objective(lift(th).Q, d), z) <= 1e-10);
  }
}

TEST_CASE("w objective decouples when the cross term vanishes") {
  LiftedProblemData d;
  d.chi1 = CMatrix::Zero(2, 2);
  d.chi2 = CMatrix::Zero(2, 2);
  d.chi1(0, 1) = 2.0;
  d.chi2(1, 1) = 1.0;
  d.upsilon1 = d.chi1.adjoint() * d.chi1;
  d.upsilon2 = d.chi2.adjoint() * d.chi2;
  d.cross_R = d.chi1.adjoint() * d.chi2;
  d.qos = QosSpec{1.0, 3.0, 2.0};
  const CMatrix Q = lift(PhaseVector::zeros(1)).Q;
  CHECK(w_objective(Q, d) == doctest::Approx(2.0 * (1.0 / 4.0 + 3.0 / 1.0)));
  LiftedProblemData s = d;
  s.upsilon1 *= 2.0;
  s.upsilon2 *= 2.0;
  CHECK(w_objective(Q, s) == doctest::Approx(w_objective(Q, d) / 2.0));
}

TEST_CASE("w objective rejects collinear composite channels") {
  auto eng = make_engine(62, 0);
  ChannelSet ch = random_channels(eng, 2, 2);
  ch.h_r2 = 2.0 * ch.h_r1;
  ch.h_d2 = 2.0 * ch.h_d1;
  const LiftedProblemData d = build_lifted(ch, QosSpec{});
  try {
    w_objective(lift(random_phases(eng, 2)).Q, d);
    FAIL("expected an exception");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::OrthDegenerate);
  }
}

TEST_CASE("g split parts") {
  auto eng = make_engine(63, 0);
  for (int t = 0; t < 2000; ++t) {
    const ChannelSet ch = random_channels(eng, 2 + t % 3, 1 + t % 4);
    const int n = ch.num_elements();
    const LiftedProblemData d = build_lifted(ch, QosSpec{1.0, 2.0, 0.5});
    const CMatrix Q = random_relaxed(eng, n + 1, 1 + t % (n + 1));
    const GSplit g0 = g_split(Q, d, 0.0);
    CHECK(g0.g == g0.g1);
    CHECK(g0.g1 > 0.0);
    CHECK(g0.g2 >= -1e-12 * re_trace(Q, d.upsilon1) * re_trace(Q, d.upsilon2));
    CHECK(g_split(Q, d, 1.5).g == doctest::Approx(g0.g1 - 1.5 * g0.g2));
  }
}

TEST_CASE("g2 at a lifted phase is the zf denominator") {
  auto eng = make_engine(64, 0);
  const ChannelSet ch = random_channels(eng, 3, 4);
  const LiftedProblemData d = build_lifted(ch, QosSpec{});
  const PhaseVector th = random_phases(eng, 4);
  const CVector h1 = composite_channel(ch, th, 1), h2 = composite_channel(ch, th, 2);
  const double sin2 = 1.0 - cos2_alpha(h1, h2);
  CHECK(rel_gap(g_split(lift(th).Q, d, 0.0).g2, h1.squaredNorm() * h2.squaredNorm() * sin2) <= 1e-10);
}

TEST_CASE("g2 gradient matches central differences") {
  auto eng = make_engine(65, 0);
  for (int t = 0; t < 50; ++t) {
    const ChannelSet ch = random_channels(eng, 3, 3);
    const LiftedProblemData d = build_lifted(ch, QosSpec{});
    const CMatrix Q = random_relaxed(eng, 4, 2);
    const CMatrix D = hermitian_part(random_cmat(eng, 4, 4));
    const double h = 1e-6;
    const double fd = (g_split(Q + h * D, d, 0.0).g2 - g_split(Q - h * D, d, 0.0).g2) / (2.0 * h);
    const double an = re_trace(g2_gradient(Q, d).adjoint(), D);
    CHECK(std::abs(fd - an) <= 1e-5 * std::max(1.0, std::abs(an)));
    CHECK((g2_gradient(Q, d) - g2_gradient(Q, d).adjoint()).norm() <= 1e-12 * g2_gradient(Q, d).norm());
  }
}

TEST_CASE("surrogates are tangent at the expansion point") {
  auto eng = make_engine(66, 0);
  const LiftedProblemData d = build_lifted(random_channels(eng, 3, 3), QosSpec{});
  const CMatrix Qi = random_relaxed(eng, 4, 2);
  const double g2 = g_split(Qi, d, 0.0).g2;
  CHECK(rel_gap(g2_surrogate(Qi, Qi, d, Surrogate::DcMinorizer), g2) <= 1e-10);
  CHECK(rel_gap(g2_surrogate(Qi, Qi, d, Surrogate::Linearized), g2) <= 1e-10);
}

TEST_CASE("the difference-of-convex model never exceeds g2") {
  auto eng = make_engine(67, 0);
  for (int t = 0; t < 5000; ++t) {
    const LiftedProblemData d = build_lifted(random_channels(eng, 2 + t % 3, 1 + t % 4), QosSpec{});
    const int n = d.lifted_dim();
    const CMatrix Q = random_relaxed(eng, n, 1 + t % n);
    const CMatrix Qi = random_relaxed(eng, n, 1 + (t / 7) % n);
    const double g2 = g_split(Q, d, 0.0).g2;
    const double scale = re_trace(Q, d.upsilon1) * re_trace(Q, d.upsilon2) + 1.0;
    CHECK(g2_surrogate(Q, Qi, d, Surrogate::DcMinorizer) <= g2 + 1e-9 * scale);
  }
}

TEST_CASE("the first-order model of g2 is not a global under-estimator") {
  // g2 is a difference of a product and a squared modulus, so it is not
  // convex on the PSD cone and its tangent plane can cross above it.
  auto eng = make_engine(68, 0);
  int violations = 0;
  for (int t = 0; t < 2000; ++t) {
    const LiftedProblemData d = build_lifted(random_channels(eng, 2, 2), QosSpec{});
    const CMatrix Q = random_relaxed(eng, 3, 1);
    const CMatrix Qi = random_relaxed(eng, 3, 1);
    const double scale = re_trace(Q, d.upsilon1) * re_trace(Q, d.upsilon2) + 1.0;
    if (g2_surrogate(Q, Qi, d, Surrogate::Linearized) > g_split(Q, d, 0.0).g2 + 1e-6 * scale) ++violations;
  }
  CHECK(violations > 0);
}

TEST_CASE("sca with eta zero is one linear solve") {
  auto eng = make_engine(69, 0);
  const LiftedProblemData d = build_lifted(random_channels(eng, 2, 3), QosSpec{1.0, 1.0, 1.0});
  const ScaResult r = sca_solve(0.0, lift(PhaseVector::zeros(3)).Q, d, ZfOptions{});
  CHECK(r.inner.size() == 1);
  CHECK(r.value.g <= g_split(lift(PhaseVector::zeros(3)).Q, d, 0.0).g * (1.0 + 1e-7));
}

TEST_CASE("sca true objective is nonincreasing") {
  auto eng = make_engine(70, 0);
  for (int t = 0; t < 5; ++t) {
    ChannelSet ch = random_channels(eng, 2, 3);
    ch.h_r2 *= 0.2;
    ch.h_d2 *= 0.2;
    const LiftedProblemData d = build_lifted(ch, QosSpec{1.0, 1.0, 1.0});
    const CMatrix Q0 = lift(PhaseVector::zeros(3)).Q;
    const double eta = 0.5 * w_objective(Q0, d);
    const ScaResult r = sca_solve(eta, Q0, d, ZfOptions{});
    double prev = g_split(Q0, d, eta).g;
    const double scale = g_split(Q0, d, eta).g1;
    for (const auto& rec : r.inner) {
      if (!rec.accepted) continue;
      CHECK(rec.g <= prev + 1e-9 * scale);
      prev = rec.g;
    }
  }
}

TEST_CASE("linearized surrogate aborts when it overestimates") {
  // Surfaced as a typed error; the default minorizer never triggers it.
  auto eng = make_engine(71, 0);
  int raised = 0;
  for (int t = 0; t < 30; ++t) {
    const LiftedProblemData d = build_lifted(random_channels(eng, 2, 2), QosSpec{1.0, 1.0, 1.0});
    ZfOptions o;
    o.surrogate = Surrogate::Linearized;
    try {
      optimize_phases_zfbf(d, o);
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::UnderEstimatorViolated);
      ++raised;
    }
  }
  MESSAGE("linearized surrogate violations: " << raised << " of 30");
}

TEST_CASE("dinkelbach sign structure on toy instances") {
  for (std::uint64_t t = 0; t < 5; ++t) {
    const ChannelSet ch = toy_instance(77, t, 0.05);
    const LiftedProblemData d = build_lifted(ch, QosSpec{1.0, 1.0, 1.0});
    const ZfResult r = optimize_phases_zfbf(d);
    const double w = r.relaxed_w;
    const CMatrix Q = r.relaxed_Q;
    CHECK(sca_solve(0.5 * w, Q, d, ZfOptions{}).value.g > 0.0);
    CHECK(sca_solve(1.5 * w, Q, d, ZfOptions{}).value.g < 0.0);
  }
}

TEST_CASE("zf phase optimization on toy instances") {
  for (std::uint64_t t = 0; t < 10; ++t) {
    const ChannelSet ch = toy_instance(77, t, 0.05);
    const QosSpec q{1.0, 1.0, 1.0};
    const LiftedProblemData d = build_lifted(ch, q);
    const ZfResult r = optimize_phases_zfbf(d);
    CHECK(r.trace.converged);
    CHECK(r.trace.outer.size() <= 30);
    CHECK(std::abs(r.trace.outer.back().g_star) <= r.delta);
    // Slack of ten times the SDP tolerance: near the fixed point successive
    // relaxed values agree to solver accuracy only.
    for (std::size_t i = 1; i < r.trace.outer.size(); ++i) {
      CHECK(r.trace.outer[i].w_relaxed <= r.trace.outer[i - 1].w_relaxed * (1.0 + 1e-7));
    }
    CHECK(rel_gap(r.eta, r.relaxed_w) <= 1e-5);
    const CVector h1 = composite_channel(ch, r.theta, 1), h2 = composite_channel(ch, r.theta, 2);
    CHECK(rel_gap(r.power, zf_power(h1, h2, q)) <= 1e-10);
    const double grid = grid_minimum([&](const PhaseVector& th) {
      return zf_power(composite_channel(ch, th, 1), composite_channel(ch, th, 2), q);
    });
    CHECK(r.power <= grid * (1.0 + 1e-4));
  }
}
