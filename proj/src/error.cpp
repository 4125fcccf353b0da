#include "error.hpp"

namespace wsarma {

const char* error_code_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidInput: return "invalid-input";
    case ErrorCode::NonStationarySpec: return "non-stationary-spec";
    case ErrorCode::BoundarySolution: return "boundary-solution";
    case ErrorCode::RankDeficient: return "rank-deficient";
    case ErrorCode::DegenerateSeries: return "degenerate-series";
    case ErrorCode::NotApplicable: return "not-applicable";
    case ErrorCode::UnstableVar: return "unstable-var";
    case ErrorCode::NonPsdEstimate: return "non-psd-estimate";
    case ErrorCode::NumericalFailure: return "numerical-failure";
    case ErrorCode::DegenerateNormalizer: return "degenerate-normalizer";
    case ErrorCode::DegenerateInference: return "degenerate-inference";
    case ErrorCode::ParseError: return "parse-error";
    case ErrorCode::MissingData: return "missing-data";
    case ErrorCode::DomainError: return "domain-error";
    case ErrorCode::ExperimentIntegrity: return "experiment-integrity";
    case ErrorCode::IoError: return "io-error";
  }
  return "unknown";
}

}  // namespace wsarma
