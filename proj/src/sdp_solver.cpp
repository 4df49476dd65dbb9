#include "irsnoma/sdp_solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "irsnoma/errors.hpp"

namespace irsnoma {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// One constraint's coefficient on one block, with off-diagonal sparse
// entries expanded to both triangles.
struct Coef {
  int block = 0;
  bool is_dense = false;
  RMatrix d;
  std::vector<int> r;
  std::vector<int> c;
  std::vector<double> v;

  double inner(const RMatrix& x) const {
    if (is_dense) return (d.array() * x.array()).sum();
    double s = 0.0;
    for (std::size_t k = 0; k < v.size(); ++k) s += v[k] * x(r[k], c[k]);
    return s;
  }
  void axpy(double a, RMatrix& out) const {
    if (is_dense) {
      out += a * d;
    } else {
      for (std::size_t k = 0; k < v.size(); ++k) out(r[k], c[k]) += a * v[k];
    }
  }
  // X A Zi
  RMatrix sandwich(const RMatrix& x, const RMatrix& zi) const {
    if (is_dense) return x * d * zi;
    RMatrix w = RMatrix::Zero(x.rows(), zi.cols());
    for (std::size_t k = 0; k < v.size(); ++k) w.noalias() += v[k] * x.col(r[k]) * zi.row(c[k]);
    return w;
  }
  double norm2() const { return is_dense ? d.squaredNorm() : [&] {
    double s = 0.0;
    for (double e : v) s += e * e;
    return s;
  }(); }
  void scale(double a) {
    if (is_dense) d *= a;
    for (double& e : v) e *= a;
  }
};

Coef compile(const BlockCoefficient& bc, int n) {
  Coef out;
  out.block = bc.block;
  if (bc.dense.size() > 0) {
    out.is_dense = true;
    out.d = 0.5 * (bc.dense + bc.dense.transpose());
    return out;
  }
  // Merge duplicates through a dense scratch, then decide on storage.
  RMatrix s = RMatrix::Zero(n, n);
  for (const auto& e : bc.entries) {
    s(e.row, e.col) += e.value;
    if (e.row != e.col) s(e.col, e.row) += e.value;
  }
  const auto nnz = (s.array() != 0.0).count();
  if (nnz * 4 > static_cast<Eigen::Index>(n) * n) {
    out.is_dense = true;
    out.d = std::move(s);
    return out;
  }
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      if (s(i, j) != 0.0) {
        out.r.push_back(i);
        out.c.push_back(j);
        out.v.push_back(s(i, j));
      }
    }
  }
  return out;
}

using Blocks = std::vector<RMatrix>;

double inner(const Blocks& a, const Blocks& b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += (a[k].array() * b[k].array()).sum();
  return s;
}

double fro(const Blocks& a) {
  double s = 0.0;
  for (const auto& m : a) s += m.squaredNorm();
  return std::sqrt(s);
}

RMatrix sym(const RMatrix& a) { return 0.5 * (a + a.transpose()); }

struct Compiled {
  std::vector<int> dims;
  std::vector<std::vector<Coef>> rows;
  RVector b;
  std::vector<Coef> c;

  int m() const { return static_cast<int>(rows.size()); }

  Blocks zeros() const {
    Blocks out;
    for (int n : dims) out.push_back(RMatrix::Zero(n, n));
    return out;
  }
  RVector apply(const Blocks& x) const {
    RVector out(m());
    for (int i = 0; i < m(); ++i) {
      double s = 0.0;
      for (const auto& part : rows[static_cast<std::size_t>(i)]) s += part.inner(x[static_cast<std::size_t>(part.block)]);
      out(i) = s;
    }
    return out;
  }
  Blocks adjoint(const RVector& y) const {
    Blocks out = zeros();
    for (int i = 0; i < m(); ++i) {
      for (const auto& part : rows[static_cast<std::size_t>(i)]) part.axpy(y(i), out[static_cast<std::size_t>(part.block)]);
    }
    return out;
  }
  Blocks objective() const {
    Blocks out = zeros();
    for (const auto& part : c) part.axpy(1.0, out[static_cast<std::size_t>(part.block)]);
    return out;
  }
};

Compiled compile(const SdpProblem& p) {
  Compiled out;
  out.dims = p.block_dims;
  const double sign = p.maximize ? -1.0 : 1.0;
  for (const auto& bc : p.objective) {
    Coef k = compile(bc, p.block_dims[static_cast<std::size_t>(bc.block)]);
    k.scale(sign);
    out.c.push_back(std::move(k));
  }
  out.b.resize(static_cast<Eigen::Index>(p.equalities.size()));
  for (std::size_t i = 0; i < p.equalities.size(); ++i) {
    std::vector<Coef> row;
    for (const auto& bc : p.equalities[i].lhs) row.push_back(compile(bc, p.block_dims[static_cast<std::size_t>(bc.block)]));
    out.rows.push_back(std::move(row));
    out.b(static_cast<Eigen::Index>(i)) = p.equalities[i].rhs;
  }
  return out;
}

// Largest alpha with X + alpha dX >= 0 (may be +inf).
double max_step(const Blocks& x, const Blocks& dx, bool& ok) {
  double amax = kInf;
  ok = true;
  for (std::size_t k = 0; k < x.size(); ++k) {
    Eigen::LLT<RMatrix> llt(x[k]);
    if (llt.info() != Eigen::Success) {
      ok = false;
      return 0.0;
    }
    RMatrix t = llt.matrixL().solve(dx[k]);
    t = llt.matrixL().solve(t.transpose().eval());
    Eigen::SelfAdjointEigenSolver<RMatrix> es(sym(t), Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) {
      ok = false;
      return 0.0;
    }
    const double lmin = es.eigenvalues()(0);
    if (lmin < 0.0) amax = std::min(amax, -1.0 / lmin);
  }
  return amax;
}

double min_sym_eig(const RMatrix& a) {
  if (a.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<RMatrix> es(sym(a), Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

RMatrix chol_inverse(const RMatrix& z, bool& ok) {
  Eigen::LLT<RMatrix> llt(z);
  ok = llt.info() == Eigen::Success;
  if (!ok) return {};
  return sym(llt.solve(RMatrix::Identity(z.rows(), z.cols())));
}

struct SchurSolver {
  Eigen::LLT<RMatrix> llt;
  Eigen::LDLT<RMatrix> ldlt;
  bool use_llt = true;

  bool factor(RMatrix m) {
    const double diag = std::max(m.diagonal().cwiseAbs().maxCoeff(), 1e-300);
    llt.compute(m);
    if (llt.info() == Eigen::Success) {
      use_llt = true;
      return true;
    }
    // Rank-deficient constraint sets (dependent rows) land here.
    m.diagonal().array() += 1e-13 * diag;
    llt.compute(m);
    if (llt.info() == Eigen::Success) {
      use_llt = true;
      return true;
    }
    ldlt.compute(m);
    use_llt = false;
    return ldlt.info() == Eigen::Success;
  }
  RVector solve(const RVector& r) const { return use_llt ? RVector(llt.solve(r)) : RVector(ldlt.solve(r)); }
};

}  // namespace

const char* to_string(SdpStatus s) {
  switch (s) {
    case SdpStatus::Optimal: return "optimal";
    case SdpStatus::Infeasible: return "infeasible";
    case SdpStatus::MaxIter: return "max_iter";
    case SdpStatus::NumericalFailure: return "numerical_failure";
  }
  return "unknown";
}

void SdpProblem::validate() const {
  for (int n : block_dims) {
    if (n <= 0) throw Error(ErrorCode::InvalidArgument, "block dimensions must be positive");
  }
  auto check_form = [&](const LinearForm& f) {
    for (const auto& bc : f) {
      if (bc.block < 0 || bc.block >= static_cast<int>(block_dims.size())) {
        throw Error(ErrorCode::DimensionMismatch, "coefficient refers to a missing block");
      }
      const int n = block_dims[static_cast<std::size_t>(bc.block)];
      if (bc.dense.size() > 0) {
        if (bc.dense.rows() != n || bc.dense.cols() != n) {
          throw Error(ErrorCode::DimensionMismatch, "dense coefficient has the wrong size");
        }
        if ((bc.dense - bc.dense.transpose()).norm() > 1e-12 * (1.0 + bc.dense.norm())) {
          throw Error(ErrorCode::InvalidArgument, "coefficient matrix is not symmetric");
        }
      }
      for (const auto& e : bc.entries) {
        if (e.row < 0 || e.col < 0 || e.row >= n || e.col >= n) {
          throw Error(ErrorCode::DimensionMismatch, "sparse entry out of range");
        }
      }
    }
  };
  check_form(objective);
  for (const auto& eq : equalities) check_form(eq.lhs);
}

CertificateCheck check_certificate(const SdpProblem& p, const SdpSolution& sol) {
  CertificateCheck out;
  if (sol.blocks.size() != p.block_dims.size() || sol.y.size() != static_cast<Eigen::Index>(p.equalities.size())) {
    return out;
  }
  const Compiled d = compile(p);
  const RVector ax = d.apply(sol.blocks);
  double xnorm = fro(sol.blocks);
  out.max_residual = 0.0;
  for (int i = 0; i < d.m(); ++i) {
    double an = 0.0;
    for (const auto& part : d.rows[static_cast<std::size_t>(i)]) an += part.norm2();
    an = std::sqrt(an);
    const double res = std::abs(ax(i) - d.b(i)) / std::max(an, 1e-300);
    out.max_residual = std::max(out.max_residual, res);
  }
  out.min_primal_eig = kInf;
  out.min_dual_eig = kInf;
  // Dual quantities are measured against the unit-norm objective so the test
  // does not loosen when the data are tiny in absolute terms.
  const Blocks c = d.objective();
  const Blocks aty = d.adjoint(sol.y);
  const double cnorm = fro(c);
  const double cn = cnorm > 0.0 ? cnorm : 1.0;
  for (std::size_t k = 0; k < sol.blocks.size(); ++k) {
    out.min_primal_eig = std::min(out.min_primal_eig, min_sym_eig(sol.blocks[k]));
    out.min_dual_eig = std::min(out.min_dual_eig, min_sym_eig(c[k] - aty[k]) / cn);
  }
  const double pobj = inner(c, sol.blocks) / cn;
  const double dobj = d.b.dot(sol.y) / cn;
  out.rel_gap = std::abs(pobj - dobj) / (1.0 + std::abs(pobj) + std::abs(dobj));
  const double xs = std::max(1.0, xnorm);
  const double zs = 1.0 + (sol.y.size() ? sol.y.cwiseAbs().maxCoeff() / cn : 0.0);
  out.passed = out.max_residual <= 1e-7 * xs && out.min_primal_eig >= -1e-7 * xs && out.min_dual_eig >= -1e-7 * zs &&
               out.rel_gap <= 1e-6;
  return out;
}

SdpSolution solve(const SdpProblem& p, const SolverOptions& opts) {
  p.validate();
  SdpSolution sol;
  Compiled d = compile(p);
  const int m = d.m();
  int ntot = 0;
  for (int n : d.dims) ntot += n;

  // Row and objective normalization.
  RVector row_scale = RVector::Ones(m);
  for (int i = 0; i < m; ++i) {
    double s = 0.0;
    for (const auto& part : d.rows[static_cast<std::size_t>(i)]) s += part.norm2();
    s = std::sqrt(s);
    if (s == 0.0) {
      if (d.b(i) != 0.0) {
        sol.status = SdpStatus::Infeasible;
        sol.detail = "empty constraint row with nonzero right-hand side";
        return sol;
      }
      continue;
    }
    row_scale(i) = s;
    for (auto& part : d.rows[static_cast<std::size_t>(i)]) part.scale(1.0 / s);
    d.b(i) /= s;
  }
  double cscale = 0.0;
  for (const auto& part : d.c) cscale += part.norm2();
  cscale = cscale > 0.0 ? std::sqrt(cscale) : 1.0;
  for (auto& part : d.c) part.scale(1.0 / cscale);

  const Blocks C = d.objective();
  const double bnorm = d.b.norm();
  const double cnorm = fro(C);

  // Start point in the spirit of SDPT3's default.
  Blocks X = d.zeros();
  Blocks Z = d.zeros();
  RVector y = RVector::Zero(m);
  for (std::size_t k = 0; k < d.dims.size(); ++k) {
    const double n = d.dims[k];
    double xi = std::max(10.0, std::sqrt(n));
    for (int i = 0; i < m; ++i) xi = std::max(xi, n * (1.0 + std::abs(d.b(i))) / 2.0);
    double eta = std::max(10.0, std::sqrt(n));
    eta = std::max(eta, 1.0 + fro({C[k]}));
    X[k] = xi * RMatrix::Identity(d.dims[k], d.dims[k]);
    Z[k] = eta * RMatrix::Identity(d.dims[k], d.dims[k]);
  }

  auto finish = [&](SdpStatus st, int it, const std::string& detail) {
    sol.status = st;
    sol.iterations = it;
    sol.detail = detail;
    sol.blocks = X;
    sol.y.resize(m);
    for (int i = 0; i < m; ++i) sol.y(i) = cscale * y(i) / row_scale(i);
    sol.dual_slack.clear();
    for (const auto& z : Z) sol.dual_slack.push_back(cscale * z);
    const double pobj = cscale * inner(C, X);
    const double dobj = cscale * d.b.dot(y);
    sol.objective = p.maximize ? -pobj : pobj;
    sol.dual_objective = p.maximize ? -dobj : dobj;
    sol.gap = std::abs(pobj - dobj) / (cscale + std::abs(pobj) + std::abs(dobj));
  };

  SchurSolver schur;
  for (int it = 0; it < opts.max_iter; ++it) {
    const RVector ax = d.apply(X);
    const RVector rp = d.b - ax;
    const Blocks aty = d.adjoint(y);
    Blocks rd = d.zeros();
    for (std::size_t k = 0; k < rd.size(); ++k) rd[k] = C[k] - Z[k] - aty[k];
    const double pobj = inner(C, X);
    const double dobj = d.b.dot(y);
    const double mu = inner(X, Z) / ntot;
    const double pinf = rp.norm() / (1.0 + bnorm);
    const double dinf = fro(rd) / (1.0 + cnorm);
    const double gap = std::abs(pobj - dobj) / (1.0 + std::abs(pobj) + std::abs(dobj));
    sol.primal_residual = pinf;
    sol.dual_residual = dinf;
    if (opts.verbosity > 1) {
      std::fprintf(stderr, "it %3d pobj %+.10e dobj %+.10e pinf %.2e dinf %.2e gap %.2e mu %.2e\n", it, pobj, dobj,
                   pinf, dinf, gap, mu);
    }
    if (pinf <= opts.tol && dinf <= opts.tol && gap <= opts.tol) {
      finish(SdpStatus::Optimal, it, "");
      const CertificateCheck cert = check_certificate(p, sol);
      if (!cert.passed) {
        sol.status = SdpStatus::NumericalFailure;
        sol.detail = "certificate recheck failed on original data";
      }
      return sol;
    }
    // Primal infeasibility: b^T y > 0 with A^*(y) + Z = C - Rd small relative to it.
    if (dobj > 0.0) {
      Blocks ayz = d.zeros();
      for (std::size_t k = 0; k < ayz.size(); ++k) ayz[k] = aty[k] + Z[k];
      if (fro(ayz) / dobj < opts.tol) {
        finish(SdpStatus::Infeasible, it, "primal infeasibility certificate");
        return sol;
      }
    }
    if (pobj < 0.0 && ax.norm() / -pobj < opts.tol) {
      finish(SdpStatus::NumericalFailure, it, "dual infeasible: objective unbounded");
      return sol;
    }

    bool ok = true;
    Blocks zinv = d.zeros();
    for (std::size_t k = 0; k < Z.size(); ++k) {
      zinv[k] = chol_inverse(Z[k], ok);
      if (!ok) break;
    }
    if (!ok) {
      finish(SdpStatus::NumericalFailure, it, "dual slack lost definiteness");
      return sol;
    }

    // Schur complement M_ij = sum_b <A_ib, X_b A_jb Z_b^-1>.
    RMatrix M = RMatrix::Zero(m, m);
    std::vector<std::vector<std::pair<int, const Coef*>>> by_block(d.dims.size());
    for (int i = 0; i < m; ++i) {
      for (const auto& part : d.rows[static_cast<std::size_t>(i)]) by_block[static_cast<std::size_t>(part.block)].push_back({i, &part});
    }
    for (std::size_t k = 0; k < by_block.size(); ++k) {
      for (const auto& [j, aj] : by_block[k]) {
        const RMatrix w = aj->sandwich(X[k], zinv[k]);
        for (const auto& [i, ai] : by_block[k]) {
          if (i < j) continue;
          const double v = ai->inner(w);
          M(i, j) += v;
        }
      }
    }
    M = M.selfadjointView<Eigen::Lower>();
    if (!schur.factor(M)) {
      finish(SdpStatus::NumericalFailure, it, "Schur complement factorization failed");
      return sol;
    }

    auto direction = [&](double sigma_mu, const Blocks* corr, Blocks& dx, RVector& dy, Blocks& dz) {
      Blocks g = d.zeros();
      for (std::size_t k = 0; k < g.size(); ++k) {
        g[k] = sigma_mu * zinv[k] - X[k] - X[k] * rd[k] * zinv[k];
        if (corr) g[k] -= (*corr)[k];
      }
      dy = schur.solve(rp - d.apply(g));
      const Blocks ady = d.adjoint(dy);
      dz = d.zeros();
      dx = d.zeros();
      for (std::size_t k = 0; k < g.size(); ++k) {
        dz[k] = rd[k] - ady[k];
        dx[k] = sym(g[k] + X[k] * ady[k] * zinv[k]);
      }
    };

    Blocks dxa, dza;
    RVector dya;
    direction(0.0, nullptr, dxa, dya, dza);
    bool okp = true, okd = true;
    const double ap_aff = std::min(1.0, max_step(X, dxa, okp));
    const double ad_aff = std::min(1.0, max_step(Z, dza, okd));
    if (!okp || !okd) {
      finish(SdpStatus::NumericalFailure, it, "iterate lost definiteness");
      return sol;
    }
    double mu_aff = 0.0;
    for (std::size_t k = 0; k < X.size(); ++k) {
      mu_aff += ((X[k] + ap_aff * dxa[k]).array() * (Z[k] + ad_aff * dza[k]).array()).sum();
    }
    mu_aff /= ntot;
    const double sigma = std::clamp(std::pow(std::max(mu_aff, 0.0) / mu, 3.0), 0.0, 1.0);

    Blocks corr = d.zeros();
    for (std::size_t k = 0; k < corr.size(); ++k) corr[k] = dxa[k] * dza[k] * zinv[k];
    Blocks dx, dz;
    RVector dy;
    direction(sigma * mu, &corr, dx, dy, dz);

    const double tau = 0.98;
    const double ap = std::min(1.0, tau * max_step(X, dx, okp));
    const double ad = std::min(1.0, tau * max_step(Z, dz, okd));
    if (!okp || !okd || !(ap > 0.0) || !(ad > 0.0)) {
      finish(SdpStatus::NumericalFailure, it, "step length collapsed");
      return sol;
    }
    for (std::size_t k = 0; k < X.size(); ++k) {
      X[k] = sym(X[k] + ap * dx[k]);
      Z[k] = sym(Z[k] + ad * dz[k]);
    }
    y += ad * dy;
    if (!X[0].allFinite() || !y.allFinite()) {
      finish(SdpStatus::NumericalFailure, it, "non-finite iterate");
      return sol;
    }
  }
  finish(SdpStatus::MaxIter, opts.max_iter, "iteration limit reached");
  return sol;
}

RMatrix realify(const CMatrix& h) {
  if (h.rows() != h.cols()) throw Error(ErrorCode::DimensionMismatch, "realify needs a square matrix");
  if ((h - h.adjoint()).norm() > 1e-12 * (1.0 + h.norm())) {
    throw Error(ErrorCode::NonHermitian, "realify needs a Hermitian matrix");
  }
  const auto n = h.rows();
  RMatrix out(2 * n, 2 * n);
  out.topLeftCorner(n, n) = h.real();
  out.topRightCorner(n, n) = -h.imag();
  out.bottomLeftCorner(n, n) = h.imag();
  out.bottomRightCorner(n, n) = h.real();
  return out;
}

CMatrix complexify(const RMatrix& x) {
  if (x.rows() != x.cols() || x.rows() % 2 != 0) {
    throw Error(ErrorCode::DimensionMismatch, "complexify needs an even square matrix");
  }
  const auto n = x.rows() / 2;
  const RMatrix a = 0.5 * (x.topLeftCorner(n, n) + x.bottomRightCorner(n, n));
  const RMatrix b = 0.5 * (x.bottomLeftCorner(n, n) - x.topRightCorner(n, n));
  CMatrix h(n, n);
  h.real() = a;
  h.imag() = b;
  return hermitian_part(h);
}

int ComplexSdpBuilder::add_block(int n) {
  if (n <= 0) throw Error(ErrorCode::InvalidArgument, "block size must be positive");
  dims_.push_back(n);
  problem_.block_dims.push_back(2 * n);
  return static_cast<int>(dims_.size()) - 1;
}

LinearForm ComplexSdpBuilder::to_form(int block, const CMatrix& a) const {
  const int n = block_dim(block);
  if (a.rows() != n || a.cols() != n) throw Error(ErrorCode::DimensionMismatch, "coefficient size differs from block");
  // Re Tr(A H) = Tr(herm(A) H) = 1/2 <realify(herm(A)), realify(H)>
  const RMatrix r = 0.5 * realify(hermitian_part(a));
  BlockCoefficient bc;
  bc.block = block;
  const auto nnz = (r.array() != 0.0).count();
  if (nnz * 4 > r.size()) {
    bc.dense = r;
  } else {
    for (int j = 0; j < r.cols(); ++j) {
      for (int i = 0; i <= j; ++i) {
        if (r(i, j) != 0.0) bc.entries.push_back({i, j, r(i, j)});
      }
    }
  }
  return {bc};
}

void ComplexSdpBuilder::add_objective(int block, const CMatrix& a) {
  const LinearForm f = to_form(block, a);
  problem_.objective.insert(problem_.objective.end(), f.begin(), f.end());
}

void ComplexSdpBuilder::add_equality(const std::vector<Term>& terms, double rhs) {
  SdpEquality eq;
  eq.rhs = rhs;
  for (const auto& [block, a] : terms) {
    const LinearForm f = to_form(block, a);
    eq.lhs.insert(eq.lhs.end(), f.begin(), f.end());
  }
  problem_.equalities.push_back(std::move(eq));
}

void ComplexSdpBuilder::fix_real_entry(int block, int p, int q, double value) {
  const int n = block_dim(block);
  CMatrix e = CMatrix::Zero(n, n);
  e(q, p) = 1.0;  // Tr(E_qp H) = H_pq
  add_equality({{block, e}}, value);
}

void ComplexSdpBuilder::fix_imag_entry(int block, int p, int q, double value) {
  const int n = block_dim(block);
  CMatrix e = CMatrix::Zero(n, n);
  e(q, p) = Complex(0.0, -1.0);  // Re(-j H_pq) = Im H_pq
  add_equality({{block, e}}, value);
}

CMatrix ComplexSdpBuilder::block_value(const SdpSolution& sol, int block) const {
  return complexify(sol.blocks.at(static_cast<std::size_t>(block)));
}

int add_lmi_as_block(ComplexSdpBuilder& builder, int q_block, const CMatrix& chi1, const CMatrix& chi2, double r1) {
  const auto m = chi1.rows();
  if (chi2.rows() != m || chi1.cols() != chi2.cols() || chi1.cols() != builder.block_dim(q_block)) {
    throw Error(ErrorCode::DimensionMismatch, "LMI operands are inconsistent");
  }
  const double kappa = std::max(chi1.squaredNorm() + (1.0 + r1) * chi2.squaredNorm(), 1e-300);
  const int s = builder.add_block(static_cast<int>(m));
  // Re Tr(E S) = Re Tr(L^*(E) Q) / kappa for a basis of Hermitian E.
  auto constrain = [&](const CMatrix& e) {
    const CMatrix adj = (chi1.adjoint() * e * chi1 - (1.0 + r1) * (chi2.adjoint() * e * chi2)) / kappa;
    builder.add_equality({{s, e}, {q_block, -adj}}, 0.0);
  };
  for (Eigen::Index p = 0; p < m; ++p) {
    for (Eigen::Index q = p; q < m; ++q) {
      CMatrix e = CMatrix::Zero(m, m);
      if (p == q) {
        e(p, p) = 1.0;
        constrain(e);
        continue;
      }
      e(p, q) = 0.5;
      e(q, p) = 0.5;
      constrain(e);
      e(p, q) = Complex(0.0, 0.5);
      e(q, p) = Complex(0.0, -0.5);
      constrain(e);
    }
  }
  return s;
}

PhaseVector phases_from_lifted(const CVector& v) {
  const auto n = v.size() - 1;
  if (n < 0) throw Error(ErrorCode::DimensionMismatch, "lifted vector is empty");
  RVector theta(n);
  const Complex ref = v(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Complex ratio = ref == Complex(0.0) ? v(i) : v(i) / ref;
    // [v; 1] carries e^{-j theta}
    theta(i) = ratio == Complex(0.0) ? 0.0 : -std::arg(ratio);
  }
  return PhaseVector(theta);
}

ExtractionResult extract_rank_one(const CMatrix& Q, const PhasePredicate& accept, const PhaseScore& score,
                                  const SolverOptions& opts, const Tolerances& tol) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitian_part(Q));
  if (es.info() != Eigen::Success) throw Error(ErrorCode::EigenFailure, "eigendecomposition of Q failed");
  const RVector lam = es.eigenvalues().cwiseMax(0.0);
  const auto n = lam.size();
  const double lmax = lam(n - 1);
  ExtractionResult best;
  best.score = kInf;
  best.rank_one = n < 2 || lam(n - 2) <= tol.rank_one_ratio * lmax;
  bool found = false;
  auto consider = [&](const CVector& v) {
    const PhaseVector theta = phases_from_lifted(v);
    if (!accept(theta)) return;
    ++best.accepted;
    const double s = score(theta);
    if (!found || s < best.score) {
      best.theta = theta;
      best.score = s;
      found = true;
    }
  };
  consider(es.eigenvectors().col(n - 1));
  if (!best.rank_one) {
    const CMatrix factor = es.eigenvectors() * lam.cwiseSqrt().asDiagonal();
    for (int draw = 0; draw < opts.randomization_count; ++draw) {
      auto eng = make_engine(opts.seed, 0x52414E44ULL, static_cast<std::uint64_t>(draw));
      CVector r(n);
      for (Eigen::Index i = 0; i < n; ++i) r(i) = complex_normal(eng);
      consider(factor * r);
    }
  }
  if (!found) throw Error(ErrorCode::NoFeasibleCandidate, "no randomized candidate passed the acceptance test");
  return best;
}

}  // namespace irsnoma
