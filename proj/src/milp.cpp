#include "ppdispatch/milp.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

namespace ppd {

namespace {
std::string fmt17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}
}  // namespace

int MilpProblem::add_var(const std::string& name, VarKind kind, double lb,
                         double ub) {
  if (var_index_.count(name))
    throw std::invalid_argument("duplicate variable name: " + name);
  if (kind == VarKind::Binary && (lb != 0.0 || ub != 1.0))
    throw std::invalid_argument("binary variable must have bounds {0,1}: " + name);
  if (lb > ub) throw std::invalid_argument("lb > ub for variable: " + name);
  const int idx = num_vars();
  vars_.push_back(Var{name, kind, lb, ub});
  var_index_.emplace(name, idx);
  if (kind == VarKind::Binary) ++num_binaries_;
  return idx;
}

int MilpProblem::add_row(const std::string& name,
                         std::vector<std::pair<int, double>> coeffs,
                         Sense sense, double rhs) {
  for (const auto& [v, c] : coeffs) {
    (void)c;
    if (v < 0 || v >= num_vars())
      throw std::invalid_argument("row " + name + " references unknown variable");
  }
  const int idx = num_rows();
  rows_.push_back(Row{name, std::move(coeffs), sense, rhs});
  return idx;
}

void MilpProblem::set_objective(int var, double coeff) {
  if (var < 0 || var >= num_vars())
    throw std::invalid_argument("objective references unknown variable");
  obj_[var] = coeff;
}

void MilpProblem::add_objective(int var, double coeff) {
  if (var < 0 || var >= num_vars())
    throw std::invalid_argument("objective references unknown variable");
  obj_[var] += coeff;
}

Vec MilpProblem::objective_dense() const {
  Vec c = Vec::Zero(num_vars());
  for (const auto& [v, coeff] : obj_) c(v) = coeff;
  return c;
}

double MilpProblem::objective_value(const Vec& x) const {
  double v = 0.0;
  for (const auto& [i, coeff] : obj_) v += coeff * x(i);
  return v;
}

double MilpProblem::infeasibility(const Vec& x) const {
  double worst = 0.0;
  for (int i = 0; i < num_vars(); ++i) {
    const auto& v = vars_[static_cast<std::size_t>(i)];
    if (std::isfinite(v.lb)) worst = std::max(worst, v.lb - x(i));
    if (std::isfinite(v.ub)) worst = std::max(worst, x(i) - v.ub);
  }
  for (const auto& r : rows_) {
    double lhs = 0.0;
    for (const auto& [v, c] : r.coeffs) lhs += c * x(v);
    switch (r.sense) {
      case Sense::LE: worst = std::max(worst, lhs - r.rhs); break;
      case Sense::GE: worst = std::max(worst, r.rhs - lhs); break;
      case Sense::EQ: worst = std::max(worst, std::abs(lhs - r.rhs)); break;
    }
  }
  return worst;
}

int MilpProblem::find_var(const std::string& name) const {
  auto it = var_index_.find(name);
  return it == var_index_.end() ? -1 : it->second;
}

void MilpProblem::write_lp(std::ostream& os) const {
  os << "\\ generated by ppdispatch\n";
  os << "Minimize\n obj:";
  bool first = true;
  for (int i = 0; i < num_vars(); ++i) {
    auto it = obj_.find(i);
    if (it == obj_.end() || it->second == 0.0) continue;
    const double c = it->second;
    os << (c < 0 ? " - " : (first ? " " : " + ")) << fmt17(std::abs(c)) << " "
       << vars_[static_cast<std::size_t>(i)].name;
    first = false;
  }
  if (first) os << " 0 " << (num_vars() ? vars_[0].name : "x");
  os << "\nSubject To\n";
  for (const auto& r : rows_) {
    os << " " << r.name << ":";
    bool f2 = true;
    for (const auto& [v, c] : r.coeffs) {
      if (c == 0.0) continue;
      os << (c < 0 ? " - " : (f2 ? " " : " + ")) << fmt17(std::abs(c)) << " "
         << vars_[static_cast<std::size_t>(v)].name;
      f2 = false;
    }
    if (f2) os << " 0 " << vars_[0].name;
    switch (r.sense) {
      case Sense::LE: os << " <= "; break;
      case Sense::GE: os << " >= "; break;
      case Sense::EQ: os << " = "; break;
    }
    os << fmt17(r.rhs) << "\n";
  }
  os << "Bounds\n";
  for (const auto& v : vars_) {
    if (v.kind == VarKind::Binary) continue;
    if (!std::isfinite(v.lb) && !std::isfinite(v.ub)) {
      os << " " << v.name << " free\n";
    } else {
      os << " " << (std::isfinite(v.lb) ? fmt17(v.lb) : "-inf") << " <= "
         << v.name << " <= " << (std::isfinite(v.ub) ? fmt17(v.ub) : "+inf")
         << "\n";
    }
  }
  bool any_bin = false;
  for (const auto& v : vars_) {
    if (v.kind == VarKind::Binary) {
      if (!any_bin) os << "Binary\n";
      any_bin = true;
      os << " " << v.name << "\n";
    }
  }
  os << "End\n";
}

void MilpProblem::write_matrix_dump(std::ostream& os) const {
  os << "row,col,coeff\n";
  for (int i = 0; i < num_rows(); ++i) {
    for (const auto& [v, c] : rows_[static_cast<std::size_t>(i)].coeffs)
      os << i << "," << v << "," << fmt17(c) << "\n";
  }
  os << "row,sense,rhs\n";
  for (int i = 0; i < num_rows(); ++i) {
    const auto& r = rows_[static_cast<std::size_t>(i)];
    const char* s = r.sense == Sense::LE ? "<=" : (r.sense == Sense::GE ? ">=" : "=");
    os << i << "," << s << "," << fmt17(r.rhs) << "\n";
  }
}

std::uint64_t MilpProblem::digest() const {
  Digest d;
  for (const auto& v : vars_) {
    d.update(v.name);
    d.update(static_cast<std::uint64_t>(v.kind));
    d.update(v.lb);
    d.update(v.ub);
  }
  for (const auto& r : rows_) {
    d.update(r.name);
    d.update(static_cast<std::uint64_t>(r.sense));
    d.update(r.rhs);
    for (const auto& [v, c] : r.coeffs) {
      d.update(static_cast<std::uint64_t>(v));
      d.update(c);
    }
  }
  for (int i = 0; i < num_vars(); ++i) {
    auto it = obj_.find(i);
    if (it != obj_.end()) {
      d.update(static_cast<std::uint64_t>(i));
      d.update(it->second);
    }
  }
  return d.value();
}

std::string to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::Unbounded: return "unbounded";
    case SolveStatus::Limit: return "limit";
    case SolveStatus::Error: return "error";
  }
  return "unknown";
}

}  // namespace ppd
