#include "tsmc/core/error.hpp"

namespace tsmc {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidConfig: return "InvalidConfig";
    case ErrorKind::IoError: return "IoError";
    case ErrorKind::NonFiniteWeight: return "NonFiniteWeight";
    case ErrorKind::StageCapExceeded: return "StageCapExceeded";
    case ErrorKind::DegenerateSwarm: return "DegenerateSwarm";
    case ErrorKind::BracketFailure: return "BracketFailure";
    case ErrorKind::NonFiniteProposalDensity: return "NonFiniteProposalDensity";
    case ErrorKind::MissingCache: return "MissingCache";
    case ErrorKind::LayoutMismatch: return "LayoutMismatch";
    case ErrorKind::IncompleteRun: return "IncompleteRun";
    case ErrorKind::SingularPredictiveCovariance: return "SingularPredictiveCovariance";
    case ErrorKind::QuadratureNonConvergence: return "QuadratureNonConvergence";
    case ErrorKind::RankDeficientDummies: return "RankDeficientDummies";
    case ErrorKind::SingularSigma: return "SingularSigma";
  }
  return "Unknown";
}

}  // namespace tsmc
