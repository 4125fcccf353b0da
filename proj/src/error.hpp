#pragma once

#include <stdexcept>
#include <string>

namespace wsarma {

enum class ErrorCode {
  InvalidInput = 1,
  NonStationarySpec,
  BoundarySolution,
  RankDeficient,
  DegenerateSeries,
  NotApplicable,
  UnstableVar,
  NonPsdEstimate,
  NumericalFailure,
  DegenerateNormalizer,
  DegenerateInference,
  ParseError,
  MissingData,
  DomainError,
  ExperimentIntegrity,
  IoError,
};

const char* error_code_name(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

inline void require(bool cond, const std::string& what) {
  if (!cond) fail(ErrorCode::InvalidInput, what);
}

}  // namespace wsarma
