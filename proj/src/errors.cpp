#include "ugfem/errors.hpp"

namespace ugfem {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "invalid-argument";
    case ErrorCode::ParseError: return "parse-error";
    case ErrorCode::UnsupportedDegree: return "unsupported-degree";
    case ErrorCode::Incompatible: return "incompatible";
    case ErrorCode::Unsupported: return "unsupported";
    case ErrorCode::SingularFactorization: return "singular-factorization";
    case ErrorCode::NotConverged: return "not-converged";
    case ErrorCode::Instability: return "instability";
    case ErrorCode::Internal: return "internal-error";
  }
  return "unknown";
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

SingularFactorization::SingularFactorization(long index, const std::string& what)
    : Error(ErrorCode::SingularFactorization, what), index_(index) {}

void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace ugfem
