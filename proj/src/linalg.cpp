#include "irsnoma/linalg.hpp"

#include "irsnoma/errors.hpp"

namespace irsnoma {

namespace {

RVector hermitian_eigenvalues(const CMatrix& h) {
  if (h.rows() != h.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "eigenvalues of a non-square matrix");
  }
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(hermitian_part(h), Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorCode::EigenFailure, "Hermitian eigensolve did not converge");
  }
  return solver.eigenvalues();
}

}  // namespace

double min_eigenvalue(const CMatrix& h) {
  if (h.size() == 0) return 0.0;
  return hermitian_eigenvalues(h).minCoeff();
}

double max_eigenvalue(const CMatrix& h) {
  if (h.size() == 0) return 0.0;
  return hermitian_eigenvalues(h).maxCoeff();
}

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::ZeroChannel: return "ZeroChannel";
    case ErrorCode::CollinearChannels: return "CollinearChannels";
    case ErrorCode::QdViolation: return "QdViolation";
    case ErrorCode::NonHermitian: return "NonHermitian";
    case ErrorCode::EigenFailure: return "EigenFailure";
    case ErrorCode::DegenerateTrace: return "DegenerateTrace";
    case ErrorCode::OrthDegenerate: return "OrthDegenerate";
    case ErrorCode::Infeasible: return "Infeasible";
    case ErrorCode::NoFeasibleCandidate: return "NoFeasibleCandidate";
    case ErrorCode::SolverFailure: return "SolverFailure";
    case ErrorCode::MaxOuterIter: return "MaxOuterIter";
    case ErrorCode::UnderEstimatorViolated: return "UnderEstimatorViolated";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::Config: return "Config";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

}  // namespace irsnoma
