#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "irsnoma/channel_model.hpp"

namespace irsnoma {

/// A(row, col) = A(col, row) = value. Off-diagonal entries therefore count
/// twice in the trace inner product.
struct SymEntry {
  int row = 0;
  int col = 0;
  double value = 0.0;
};

/// Coefficient of one linear form on one cone block. `dense` wins when it is
/// non-empty; otherwise `entries` is used.
struct BlockCoefficient {
  int block = 0;
  std::vector<SymEntry> entries;
  RMatrix dense;
};

using LinearForm = std::vector<BlockCoefficient>;

struct SdpEquality {
  LinearForm lhs;
  double rhs = 0.0;
};

/// Optimize sum_b <C_b, X_b> subject to sum_b <A_ib, X_b> = b_i and every
/// X_b symmetric positive semidefinite.
struct SdpProblem {
  std::vector<int> block_dims;
  LinearForm objective;
  std::vector<SdpEquality> equalities;
  bool maximize = false;

  /// Throws DimensionMismatch / InvalidArgument on inconsistent data.
  void validate() const;
};

enum class SdpStatus { Optimal, Infeasible, MaxIter, NumericalFailure };

const char* to_string(SdpStatus s);

struct SdpSolution {
  SdpStatus status = SdpStatus::NumericalFailure;
  std::vector<RMatrix> blocks;      // primal X
  std::vector<RMatrix> dual_slack;  // Z = C - A^*(y), in minimization sense
  RVector y;
  double objective = 0.0;           // in the caller's sense (max or min)
  double dual_objective = 0.0;
  double gap = 0.0;                 // duality gap relative to ||C|| + |p| + |d|
  double primal_residual = 0.0;     // max_i |<A_i,X> - b_i| / ||A_i||
  double dual_residual = 0.0;
  int iterations = 0;
  std::string detail;
};

struct SolverOptions {
  int max_iter = 200;
  double tol = 1e-8;
  int randomization_count = 1000;
  int verbosity = 0;
  std::uint64_t seed = 1;
};

/// Recomputes the optimality certificate of `sol` on the unscaled data:
/// PSD blocks, equality residuals, dual slack and relative gap. Dual slack
/// and gap are taken relative to the objective's Frobenius norm.
struct CertificateCheck {
  bool passed = false;
  double min_primal_eig = 0.0;
  double min_dual_eig = 0.0;
  double max_residual = 0.0;
  double rel_gap = 0.0;
};

CertificateCheck check_certificate(const SdpProblem& p, const SdpSolution& sol);

/// Dense infeasible-start primal-dual interior-point method (HKM direction,
/// Mehrotra predictor-corrector). Optimal status is only reported after the
/// certificate passes on the original data.
SdpSolution solve(const SdpProblem& p, const SolverOptions& opts = {});

/// [[Re H, -Im H], [Im H, Re H]]; throws NonHermitian.
RMatrix realify(const CMatrix& h);
/// Inverse of realify, projecting an arbitrary symmetric 2n x 2n matrix onto
/// the complex-structured subspace first.
CMatrix complexify(const RMatrix& x);

/// Builds real SDPs whose variables are complex Hermitian PSD blocks.
/// Every linear form is Re Tr(A H) summed over blocks.
class ComplexSdpBuilder {
 public:
  using Term = std::pair<int, CMatrix>;

  int add_block(int n);
  int block_dim(int block) const { return dims_.at(static_cast<std::size_t>(block)); }

  void set_maximize(bool m) { problem_.maximize = m; }
  void add_objective(int block, const CMatrix& a);
  void add_equality(const std::vector<Term>& terms, double rhs);
  /// Re H(p, q) = value
  void fix_real_entry(int block, int p, int q, double value);
  /// Im H(p, q) = value
  void fix_imag_entry(int block, int p, int q, double value);

  const SdpProblem& problem() const { return problem_; }
  CMatrix block_value(const SdpSolution& sol, int block) const;

 private:
  LinearForm to_form(int block, const CMatrix& a) const;

  SdpProblem problem_;
  std::vector<int> dims_;
};

/// Introduces a slack Hermitian block S = L(Q) / scale with
/// L(Q) = chi1 Q chi1^H - (1 + r1) chi2 Q chi2^H, so that L(Q) >= 0 becomes
/// cone membership of S. Returns the index of S.
int add_lmi_as_block(ComplexSdpBuilder& builder, int q_block, const CMatrix& chi1, const CMatrix& chi2, double r1);

struct ExtractionResult {
  PhaseVector theta;
  double score = 0.0;
  bool rank_one = false;
  int accepted = 0;  // candidates passing `accept`
};

using PhasePredicate = std::function<bool(const PhaseVector&)>;
using PhaseScore = std::function<double(const PhaseVector&)>;

/// Gaussian randomization over the eigen-factorization of Q. Scores are
/// minimized; the principal-eigenvector candidate is always evaluated first.
/// Throws NoFeasibleCandidate when nothing passes `accept`.
ExtractionResult extract_rank_one(const CMatrix& Q, const PhasePredicate& accept, const PhaseScore& score,
                                  const SolverOptions& opts, const Tolerances& tol = default_tolerances());

/// Phases of a lifted vector, gauge-fixed by its last coordinate.
PhaseVector phases_from_lifted(const CVector& v);

}  // namespace irsnoma
