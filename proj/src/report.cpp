#include "ugfem/report.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace ugfem {

namespace {

std::string format_value(double v) {
  // 1/n renders as a fraction, like the tables of rho and h values
  const double inv = 1.0 / v;
  if (v < 1.0 && std::abs(inv - std::round(inv)) < 1e-9 * inv) return "1/" + std::to_string(std::lround(inv));
  return format_error(v);
}

std::string rate_cell(const RateTable& rates, std::size_t i, std::size_t j) {
  if (i == 0) return "--";
  const auto& r = rates[i][j];
  return r ? format_rate(*r) : "undef";
}

void csv_metadata(std::ostringstream& s, const Metadata& md) {
  for (const auto& [k, v] : md) s << "# " << k << " = " << v << "\n";
}

void md_metadata(std::ostringstream& s, const Metadata& md) {
  s << "\n";
  for (const auto& [k, v] : md) s << "- " << k << ": " << v << "\n";
}

void md_row(std::ostringstream& s, const std::vector<std::string>& cells) {
  s << "|";
  for (const auto& c : cells) s << " " << c << " |";
  s << "\n";
}

}  // namespace

std::string format_error(double e) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", e);
  return buf;
}

std::string format_rate(double r) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", r);
  return buf;
}

std::string emit(const ConvergenceReport& rep, OutputFormat format) {
  std::ostringstream s;
  const std::string var = to_string(rep.variable);
  if (format == OutputFormat::CSV) {
    csv_metadata(s, rep.metadata);
    s << var;
    for (std::size_t j = 0; j < rep.columns.size(); ++j) s << "," << rep.columns[j] << ",rate" << j + 1;
    s << "\n";
    for (std::size_t i = 0; i < rep.rows.size(); ++i) {
      s << format_error(rep.rows[i].value);
      for (std::size_t j = 0; j < rep.columns.size(); ++j)
        s << "," << format_error(rep.rows[i].errors[j]) << "," << rate_cell(rep.rates, i, j);
      s << "\n";
    }
    return s.str();
  }
  const std::string exponent = rep.variable == Variable::H ? "h^n" : "rho^alpha";
  std::vector<std::string> head{var, "N_ele"}, rule{"---", "---"};
  for (const auto& c : rep.columns) {
    head.insert(head.end(), {c, exponent});
    rule.insert(rule.end(), {"---", "---"});
  }
  md_row(s, head);
  md_row(s, rule);
  for (std::size_t i = 0; i < rep.rows.size(); ++i) {
    std::vector<std::string> cells{format_value(rep.rows[i].value), std::to_string(rep.rows[i].elements)};
    for (std::size_t j = 0; j < rep.columns.size(); ++j)
      cells.insert(cells.end(), {format_error(rep.rows[i].errors[j]), rate_cell(rep.rates, i, j)});
    md_row(s, cells);
  }
  md_metadata(s, rep.metadata);
  return s.str();
}

std::string emit(const InfSupReport& rep, OutputFormat format) {
  std::ostringstream s;
  if (format == OutputFormat::CSV) {
    csv_metadata(s, rep.metadata);
    s << "h,elements,rho,beta,kernel_dim,size\n";
    for (std::size_t i = 0; i < rep.h.size(); ++i)
      for (std::size_t j = 0; j < rep.rho.size(); ++j) {
        const InfSupResult& r = rep.beta[i][j];
        s << format_error(rep.h[i]) << "," << rep.elements[i] << "," << format_error(rep.rho[j]) << ","
          << format_error(r.beta) << "," << r.kernel_dim << "," << r.size << "\n";
      }
    return s.str();
  }
  std::vector<std::string> head{"h \\ rho"}, rule{"---"};
  for (double rho : rep.rho) {
    head.push_back(format_value(rho));
    rule.push_back("---");
  }
  md_row(s, head);
  md_row(s, rule);
  for (std::size_t i = 0; i < rep.h.size(); ++i) {
    std::vector<std::string> cells{format_value(rep.h[i])};
    for (const auto& r : rep.beta[i])
      cells.push_back(format_error(r.beta) + (r.kernel_dim ? " (kernel " + std::to_string(r.kernel_dim) + ")" : ""));
    md_row(s, cells);
  }
  md_metadata(s, rep.metadata);
  return s.str();
}

std::string emit(const EquivalenceReport& rep, OutputFormat format) {
  std::ostringstream s;
  if (format == OutputFormat::CSV) {
    csv_metadata(s, rep.metadata);
    s << "pair,deviation,tolerance,result\n";
    for (const auto& r : rep.rows)
      s << r.name << "," << format_error(r.deviation) << "," << format_error(r.tolerance) << ","
        << (r.pass() ? "pass" : "fail") << "\n";
    return s.str();
  }
  md_row(s, {"pair", "deviation", "tolerance", "result"});
  md_row(s, {"---", "---", "---", "---"});
  for (const auto& r : rep.rows)
    md_row(s, {r.name, format_error(r.deviation), format_error(r.tolerance), r.pass() ? "pass" : "fail"});
  md_metadata(s, rep.metadata);
  return s.str();
}

std::string emit(const StudyResult& r, OutputFormat format) {
  switch (r.kind) {
    case StudyKind::InfSupUniformity: return emit(r.infsup, format);
    case StudyKind::EquivalenceCheck: return emit(r.equivalence, format);
    default: return emit(r.convergence, format);
  }
}

}  // namespace ugfem
