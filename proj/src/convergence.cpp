#include "ugfem/convergence.hpp"

#include <cmath>

#include "ugfem/errors.hpp"

namespace ugfem {

std::string to_string(Variable v) { return v == Variable::H ? "h" : "rho"; }

RateTable convergence_rates(const std::vector<ConvergenceRow>& rows) {
  require(rows.size() >= 2, ErrorCode::InvalidArgument, "convergence rates need at least two rows");
  const std::size_t ncol = rows[0].errors.size();
  const bool decreasing = rows[1].value < rows[0].value;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    require(rows[i].errors.size() == ncol, ErrorCode::InvalidArgument, "rows have different column counts");
    require(std::isfinite(rows[i].value) && rows[i].value > 0, ErrorCode::InvalidArgument,
            "the independent variable must be positive");
    if (i > 0) {
      const bool ok = decreasing ? rows[i].value < rows[i - 1].value : rows[i].value > rows[i - 1].value;
      require(ok, ErrorCode::InvalidArgument, "the independent variable must be strictly monotone");
    }
  }
  RateTable rates(rows.size(), std::vector<std::optional<double>>(ncol));
  for (std::size_t i = 1; i < rows.size(); ++i)
    for (std::size_t j = 0; j < ncol; ++j) {
      const double a = rows[i - 1].errors[j], b = rows[i].errors[j];
      if (!(a >= kRateUnderflow && b >= kRateUnderflow) || !std::isfinite(a) || !std::isfinite(b)) continue;
      rates[i][j] = std::log(a / b) / std::log(rows[i - 1].value / rows[i].value);
    }
  return rates;
}

void ConvergenceReport::compute_rates() { rates = convergence_rates(rows); }

int ConvergenceReport::column(const std::string& name) const {
  for (std::size_t j = 0; j < columns.size(); ++j)
    if (columns[j] == name) return static_cast<int>(j);
  fail(ErrorCode::InvalidArgument, "report has no column " + name);
}

std::optional<double> ConvergenceReport::final_rate(int j) const {
  if (rates.size() < 2) return std::nullopt;
  return rates.back().at(j);
}

}  // namespace ugfem
