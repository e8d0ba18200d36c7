#pragma once

#include <stdexcept>
#include <string>

namespace ugfem {

enum class ErrorCode {
  InvalidArgument,
  ParseError,
  UnsupportedDegree,
  Incompatible,
  Unsupported,
  SingularFactorization,
  NotConverged,
  Instability,
  Internal,
};

const char* to_string(ErrorCode code);

/// Base exception for every failure raised by the library.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what);
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

/// Raised by the direct solver; index is the column of the smallest pivot.
class SingularFactorization : public Error {
 public:
  SingularFactorization(long index, const std::string& what);
  long pivot_index() const { return index_; }

 private:
  long index_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& what);

inline void require(bool ok, ErrorCode code, const std::string& what) {
  if (!ok) fail(code, what);
}

}  // namespace ugfem
