#pragma once

#include <string>

#include "ugfem/studies.hpp"

namespace ugfem {

/// Convergence table. CSV: `#`-prefixed metadata lines, then the header
/// `<h|rho>,<norm1>,rate1,<norm2>,rate2,...` and one line per row. Errors carry
/// 6 significant digits, rates 2 decimals; "--" marks the first row and
/// "undef" a rate touching an underflowed error.
std::string emit(const ConvergenceReport& report, OutputFormat format);
/// Beta table: one line per (h, rho) with the kernel dimension.
std::string emit(const InfSupReport& report, OutputFormat format);
/// One line per compared pair with deviation and verdict.
std::string emit(const EquivalenceReport& report, OutputFormat format);
std::string emit(const StudyResult& result, OutputFormat format);

/// "%.6g" and "%.2f" renderings used by the tables.
std::string format_error(double e);
std::string format_rate(double r);

}  // namespace ugfem
