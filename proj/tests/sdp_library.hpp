#pragma once

// Small SDPs with optima known in closed form or by construction.

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "irsnoma/sdp_solver.hpp"

namespace irsnoma::testlib {

struct KnownSdp {
  std::string name;
  SdpProblem problem;
  double optimum = 0.0;
};

inline BlockCoefficient dense_coef(int block, const RMatrix& a) {
  BlockCoefficient bc;
  bc.block = block;
  bc.dense = a;
  return bc;
}

inline SdpProblem unit_diagonal_problem(const RMatrix& c) {
  SdpProblem p;
  const int n = static_cast<int>(c.rows());
  p.block_dims = {n};
  p.maximize = true;
  p.objective = {dense_coef(0, c)};
  for (int i = 0; i < n; ++i) {
    BlockCoefficient bc;
    bc.block = 0;
    bc.entries = {{i, i, 1.0}};
    p.equalities.push_back({{bc}, 1.0});
  }
  return p;
}

inline RMatrix random_orthogonal(int n, std::mt19937_64& eng) {
  std::normal_distribution<double> nd;
  RMatrix g(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) g(i, j) = nd(eng);
  Eigen::HouseholderQR<RMatrix> qr(g);
  return qr.householderQ();
}

/// Complementary X*, Z* with random constraints: optimum b^T y* = <C, X*>.
inline KnownSdp random_pair(std::uint64_t seed, std::vector<int> dims, int m) {
  std::mt19937_64 eng(seed);
  std::normal_distribution<double> nd;
  std::uniform_real_distribution<double> ud(0.5, 2.0);
  KnownSdp k;
  k.name = "random_pair_" + std::to_string(seed);
  k.problem.block_dims = dims;
  std::vector<RMatrix> xs, zs;
  for (int n : dims) {
    const RMatrix u = random_orthogonal(n, eng);
    const int rank = std::max(1, n / 2);
    RVector lx = RVector::Zero(n), lz = RVector::Zero(n);
    for (int i = 0; i < n; ++i) (i < rank ? lx(i) : lz(i)) = ud(eng);
    xs.push_back(u * lx.asDiagonal() * u.transpose());
    zs.push_back(u * lz.asDiagonal() * u.transpose());
  }
  RVector y(m);
  for (int i = 0; i < m; ++i) y(i) = nd(eng);
  std::vector<RMatrix> c;
  for (std::size_t b = 0; b < dims.size(); ++b) c.push_back(zs[b]);
  double value = 0.0;
  for (int i = 0; i < m; ++i) {
    SdpEquality eq;
    for (std::size_t b = 0; b < dims.size(); ++b) {
      RMatrix a(dims[b], dims[b]);
      for (int r = 0; r < dims[b]; ++r)
        for (int s = 0; s < dims[b]; ++s) a(r, s) = nd(eng);
      a = 0.5 * (a + a.transpose()).eval();
      eq.rhs += (a.array() * xs[b].array()).sum();
      c[b] += y(i) * a;
      eq.lhs.push_back(dense_coef(static_cast<int>(b), a));
    }
    value += y(i) * eq.rhs;
    k.problem.equalities.push_back(eq);
  }
  for (std::size_t b = 0; b < dims.size(); ++b) k.problem.objective.push_back(dense_coef(static_cast<int>(b), c[b]));
  k.problem.maximize = false;
  k.optimum = value;
  return k;
}

inline std::vector<KnownSdp> known_library() {
  std::vector<KnownSdp> lib;
  for (int n : {2, 3, 5}) {
    lib.push_back({"trace_pinned_" + std::to_string(n), unit_diagonal_problem(RMatrix::Identity(n, n)), double(n)});
  }
  {
    RMatrix c(2, 2);
    c << 0, 1, 1, 0;
    lib.push_back({"offdiag_2x2", unit_diagonal_problem(c), 2.0});
    c << 1.5, -0.7, -0.7, -0.25;
    lib.push_back({"general_2x2", unit_diagonal_problem(c), 1.5 - 0.25 + 1.4});
  }
  {
    // max Re Tr(u u^H H), diag(H) = 1: optimum (sum |u_i|)^2.
    for (int n : {3, 4}) {
      std::mt19937_64 eng(41 + n);
      CVector u(n);
      double s = 0.0;
      for (int i = 0; i < n; ++i) {
        u(i) = complex_normal(eng);
        s += std::abs(u(i));
      }
      ComplexSdpBuilder b;
      const int h = b.add_block(n);
      b.set_maximize(true);
      b.add_objective(h, u * u.adjoint());
      for (int i = 0; i < n; ++i) b.fix_real_entry(h, i, i, 1.0);
      lib.push_back({"complex_rank_one_" + std::to_string(n), b.problem(), s * s});
    }
  }
  const std::vector<std::vector<int>> shapes = {{3}, {4}, {6}, {2, 3}, {5, 2}, {8}, {4, 4}, {3, 3, 2}, {10}, {6, 1}, {7, 3}, {12}, {5, 5, 5}};
  std::uint64_t seed = 1000;
  for (const auto& s : shapes) {
    int total = 0;
    for (int n : s) total += n;
    lib.push_back(random_pair(seed++, s, std::max(1, total / 2 + 1)));
  }
  return lib;
}

}  // namespace irsnoma::testlib
