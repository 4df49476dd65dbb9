#include "irsnoma/selftest.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <ostream>
#include <sstream>

#include "irsnoma/beamforming.hpp"
#include "irsnoma/errors.hpp"
#include "irsnoma/hybrid_policy.hpp"
#include "irsnoma/quasi_degradation.hpp"
#include "irsnoma/sdp_solver.hpp"

namespace irsnoma {

namespace {

double rel_err(double a, double b) { return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300}); }

ChannelSet random_channels(std::mt19937_64& eng, int m, int n) {
  ChannelSet ch;
  ch.G = CMatrix(n, m);
  ch.h_r1 = CVector(n);
  ch.h_r2 = CVector(n);
  ch.h_d1 = CVector(m);
  ch.h_d2 = CVector(m);
  for (Eigen::Index i = 0; i < ch.G.size(); ++i) ch.G(i) = complex_normal(eng);
  for (int i = 0; i < n; ++i) {
    ch.h_r1(i) = complex_normal(eng);
    ch.h_r2(i) = complex_normal(eng);
  }
  for (int i = 0; i < m; ++i) {
    ch.h_d1(i) = complex_normal(eng);
    ch.h_d2(i) = complex_normal(eng);
  }
  return ch;
}

PhaseVector random_phases(std::mt19937_64& eng, int n) {
  std::uniform_real_distribution<double> u(0.0, 2.0 * M_PI);
  RVector t(n);
  for (int i = 0; i < n; ++i) t(i) = u(eng);
  return PhaseVector(t);
}

using CheckFn = std::function<std::string()>;  // returns "" on success

SelftestCheck run_check(const std::string& name, const CheckFn& fn) {
  SelftestCheck c{name, false, ""};
  try {
    c.detail = fn();
    c.passed = c.detail.empty();
  } catch (const std::exception& e) {
    c.detail = std::string("exception: ") + e.what();
  }
  return c;
}

}  // namespace

int SelftestReport::passed() const {
  return static_cast<int>(std::count_if(checks.begin(), checks.end(), [](const auto& c) { return c.passed; }));
}

int SelftestReport::failed() const { return static_cast<int>(checks.size()) - passed(); }

SelftestReport run_selftest(std::uint64_t seed) {
  SelftestReport rep;
  const QosSpec qos{1.0, 1.0, 1.0};

  rep.checks.push_back(run_check("lifted identities", [&]() -> std::string {
    auto eng = make_engine(seed, 1);
    double worst = 0.0;
    for (int t = 0; t < 200; ++t) {
      const ChannelSet ch = random_channels(eng, 1 + t % 4, 1 + t % 7);
      const LiftedProblemData d = build_lifted(ch, qos);
      const PhaseVector th = random_phases(eng, ch.num_elements());
      const CMatrix Q = lift(th).Q;
      const CVector h1 = composite_channel(ch, th, 1);
      const CVector h2 = composite_channel(ch, th, 2);
      worst = std::max(worst, rel_err(h1.squaredNorm(), re_trace(Q, d.upsilon1)));
      worst = std::max(worst, rel_err(h2.squaredNorm(), re_trace(Q, d.upsilon2)));
      const Complex cross = trace_product(Q, d.cross_R);
      worst = std::max(worst, std::abs(h1.dot(h2) - cross) / std::max(h1.norm() * h2.norm(), 1e-300));
    }
    if (worst > 1e-10) return "worst relative error " + std::to_string(worst);
    return "";
  }));

  rep.checks.push_back(run_check("closed-form NOMA meets QoS with equality", [&]() -> std::string {
    auto eng = make_engine(seed, 2);
    int tested = 0;
    for (int t = 0; t < 500 && tested < 100; ++t) {
      CVector h1(3), h2(3);
      for (int i = 0; i < 3; ++i) {
        h1(i) = 3.0 * complex_normal(eng);
        h2(i) = complex_normal(eng);
      }
      if (!qd_holds(h1, h2, qos).holds) continue;
      ++tested;
      const BeamformerPair bf = noma_beamformers(h1, h2, qos);
      const SinrReport s = evaluate_sinr(h1, h2, bf, qos);
      if (std::abs(s.snr1 - qos.r1_min) > 1e-8 * qos.r1_min) return "user 1 target not tight";
      if (std::min(s.sinr21, s.sinr22) < qos.r2_min * (1.0 - 1e-8)) return "user 2 target violated";
      if (rel_err(bf.power, noma_power(h1, h2, qos)) > 1e-10) return "power formula mismatch";
    }
    if (tested == 0) return "no quasi-degraded instance drawn";
    return "";
  }));

  rep.checks.push_back(run_check("NOMA power never exceeds ZF power", [&]() -> std::string {
    auto eng = make_engine(seed, 3);
    for (int t = 0; t < 2000; ++t) {
      CVector h1(2), h2(2);
      for (int i = 0; i < 2; ++i) {
        h1(i) = complex_normal(eng);
        h2(i) = complex_normal(eng);
      }
      const SchemeComparison c = compare_schemes(h1, h2, qos);
      if (c.collinear) continue;
      if (c.p_noma > c.p_zfbf * (1.0 + 1e-12)) return "ordering violated at trial " + std::to_string(t);
    }
    return "";
  }));

  rep.checks.push_back(run_check("ZF beams null the other user", [&]() -> std::string {
    auto eng = make_engine(seed, 4);
    for (int t = 0; t < 500; ++t) {
      CVector h1(4), h2(4);
      for (int i = 0; i < 4; ++i) {
        h1(i) = complex_normal(eng);
        h2(i) = complex_normal(eng);
      }
      const BeamformerPair bf = zf_beamformers(h1, h2, qos);
      const double scale = h1.norm() * bf.w2.norm() + h2.norm() * bf.w1.norm();
      if (std::abs(h1.dot(bf.w2)) > 1e-10 * scale || std::abs(h2.dot(bf.w1)) > 1e-10 * scale) {
        return "cross term above threshold";
      }
      if (rel_err(bf.power, zf_power(h1, h2, qos)) > 1e-10) return "power formula mismatch";
    }
    return "";
  }));

  rep.checks.push_back(run_check("SDP trace-pinned eigenvalue problem", [&]() -> std::string {
    auto eng = make_engine(seed, 5);
    std::normal_distribution<double> nd;
    RMatrix C(4, 4);
    for (Eigen::Index i = 0; i < C.size(); ++i) C(i) = nd(eng);
    C = 0.5 * (C + C.transpose()).eval();
    SdpProblem p;
    p.block_dims = {4};
    p.objective = {BlockCoefficient{0, {}, C}};
    p.equalities = {SdpEquality{{BlockCoefficient{0, {}, RMatrix::Identity(4, 4)}}, 1.0}};
    const SdpSolution sol = solve(p);
    if (sol.status != SdpStatus::Optimal) return std::string("status ") + to_string(sol.status);
    const double expect = Eigen::SelfAdjointEigenSolver<RMatrix>(C).eigenvalues()(0);
    if (rel_err(sol.objective, expect) > 1e-6) return "objective off";
    if (!check_certificate(p, sol).passed) return "certificate failed";
    return "";
  }));

  rep.checks.push_back(run_check("complex SDP with unit diagonal", [&]() -> std::string {
    auto eng = make_engine(seed, 6);
    const int n = 3;
    CVector u(n);
    for (int i = 0; i < n; ++i) u(i) = complex_normal(eng);
    ComplexSdpBuilder b;
    const int q = b.add_block(n);
    b.set_maximize(true);
    b.add_objective(q, u * u.adjoint());
    for (int i = 0; i < n; ++i) b.fix_real_entry(q, i, i, 1.0);
    const SdpSolution sol = solve(b.problem());
    if (sol.status != SdpStatus::Optimal) return std::string("status ") + to_string(sol.status);
    const double expect = std::pow(u.cwiseAbs().sum(), 2);
    if (rel_err(sol.objective, expect) > 1e-6) return "objective off";
    return "";
  }));

  rep.checks.push_back(run_check("hybrid solve meets both targets", [&]() -> std::string {
    ScenarioConfig cfg;
    cfg.num_antennas = 2;
    cfg.num_elements = 4;
    cfg.seed = seed;
    const QosSpec q = make_qos(cfg);
    HybridOptions opts;
    opts.noma.sdp.randomization_count = 100;
    const ChannelSet ch = synthesize_channels(cfg, 0);
    const SolveReport r = solve_hybrid(ch, q, opts);
    const CVector h1 = composite_channel(ch, r.theta, 1);
    const CVector h2 = composite_channel(ch, r.theta, 2);
    const SinrReport s = evaluate_sinr(h1, h2, r.beamformers, q);
    if (s.snr1 < q.r1_min * (1.0 - 1e-6)) return "user 1 below target";
    const double s2 = r.scheme == Scheme::Noma ? std::min(s.sinr21, s.sinr22) : s.sinr22;
    if (s2 < q.r2_min * (1.0 - 1e-6)) return "user 2 below target";
    if (!(r.power_w > 0.0) || !std::isfinite(r.power_w)) return "non-positive power";
    return "";
  }));

  rep.checks.push_back(run_check("improved region contains the direct-link region", [&]() -> std::string {
    ScenarioConfig cfg;
    cfg.bs_pos = {0.0, 0.0};
    cfg.irs_pos = {5.0, 5.0};
    cfg.user1_pos = {5.0, 5.5};
    cfg.seed = seed;
    GridSpec g;
    g.nx = g.ny = 11;
    const auto plain = region_map(cfg, g, RegionMode::NoIrs);
    const auto improved = region_map(cfg, g, RegionMode::Improved);
    for (std::size_t i = 0; i < plain.size(); ++i) {
      if (plain[i].holds && !improved[i].holds) {
        std::ostringstream os;
        os << "cell (" << plain[i].x << ", " << plain[i].y << ") lost";
        return os.str();
      }
    }
    return "";
  }));

  return rep;
}

void print_selftest(std::ostream& os, const SelftestReport& report) {
  for (const auto& c : report.checks) {
    os << (c.passed ? "PASS " : "FAIL ") << c.name;
    if (!c.detail.empty()) os << " (" << c.detail << ")";
    os << '\n';
  }
  os << "passed " << report.passed() << ", failed " << report.failed() << '\n';
}

}  // namespace irsnoma
