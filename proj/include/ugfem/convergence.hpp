#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace ugfem {

/// Errors below this are treated as underflow: rates touching them are undefined.
constexpr double kRateUnderflow = 1e-13;

enum class Variable { H, Rho };
std::string to_string(Variable v);

struct ConvergenceRow {
  double value = 0.0;  // h or rho
  int elements = 0;
  std::vector<double> errors;  // one per column
};

using RateTable = std::vector<std::vector<std::optional<double>>>;

struct ConvergenceReport {
  Variable variable = Variable::H;
  std::vector<std::string> columns;
  std::vector<ConvergenceRow> rows;
  RateTable rates;  // rates[i][j] between rows i-1 and i; rates[0] is empty
  std::vector<std::pair<std::string, std::string>> metadata;

  /// Fills `rates` from the rows.
  void compute_rates();
  /// Column index by name; throws InvalidArgument when absent.
  int column(const std::string& name) const;
  /// Rate of column j over the last interval.
  std::optional<double> final_rate(int j) const;
};

/// rate_i = log(e_{i-1}/e_i) / log(v_{i-1}/v_i) per column. Needs at least two
/// rows with a strictly monotone variable and equal column counts.
RateTable convergence_rates(const std::vector<ConvergenceRow>& rows);

}  // namespace ugfem
