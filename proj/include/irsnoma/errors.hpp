#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace irsnoma {

enum class ErrorCode {
  DimensionMismatch,
  ZeroChannel,
  CollinearChannels,
  QdViolation,
  NonHermitian,
  EigenFailure,
  DegenerateTrace,
  OrthDegenerate,
  Infeasible,
  NoFeasibleCandidate,
  SolverFailure,
  MaxOuterIter,
  UnderEstimatorViolated,
  InvalidArgument,
  Config,
  Io,
};

std::string_view to_string(ErrorCode code);

/// Exception carrying a typed error code. Every failure path in the library
/// reports through this type so callers can branch on `code()`.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace irsnoma
