#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <memory>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "ppdispatch/linalg.hpp"

namespace ppd {

constexpr double kInf = std::numeric_limits<double>::infinity();

enum class VarKind { Continuous, Binary };
enum class Sense { LE, EQ, GE };

/// Solver-agnostic MILP: named variables with bounds, sparse rows with a
/// sense and right-hand side, sparse minimization objective.
class MilpProblem {
public:
  struct Var {
    std::string name;
    VarKind kind = VarKind::Continuous;
    double lb = 0.0;
    double ub = kInf;
  };
  struct Row {
    std::string name;
    std::vector<std::pair<int, double>> coeffs;
    Sense sense = Sense::EQ;
    double rhs = 0.0;
  };

  int add_var(const std::string& name, VarKind kind, double lb, double ub);
  int add_row(const std::string& name, std::vector<std::pair<int, double>> coeffs,
              Sense sense, double rhs);
  void set_objective(int var, double coeff);
  void add_objective(int var, double coeff);

  int num_vars() const { return static_cast<int>(vars_.size()); }
  int num_rows() const { return static_cast<int>(rows_.size()); }
  int num_binaries() const { return num_binaries_; }
  const Var& var(int i) const { return vars_[static_cast<std::size_t>(i)]; }
  Var& var(int i) { return vars_[static_cast<std::size_t>(i)]; }
  const Row& row(int i) const { return rows_[static_cast<std::size_t>(i)]; }
  const std::vector<Var>& vars() const { return vars_; }
  const std::vector<Row>& rows() const { return rows_; }
  /// Objective as a dense vector over the variable space.
  Vec objective_dense() const;
  const std::unordered_map<int, double>& objective() const { return obj_; }

  /// Objective value of a point (no feasibility check).
  double objective_value(const Vec& x) const;

  /// Max violation of rows and bounds at a point.
  double infeasibility(const Vec& x) const;

  int find_var(const std::string& name) const;  // -1 when absent

  /// CPLEX-style LP text export with deterministic ordering: variables and
  /// rows in declaration order, coefficients in stored order, %.17g values.
  void write_lp(std::ostream& os) const;

  /// Debug dump of the constraint matrix as "row,col,coeff" triplets
  /// followed by "sense,rhs" per row.
  void write_matrix_dump(std::ostream& os) const;

  std::uint64_t digest() const;

private:
  std::vector<Var> vars_;
  std::vector<Row> rows_;
  std::unordered_map<int, double> obj_;
  std::unordered_map<std::string, int> var_index_;
  int num_binaries_ = 0;
};

enum class SolveStatus { Optimal, Infeasible, Unbounded, Limit, Error };

std::string to_string(SolveStatus s);

struct SolverResult {
  SolveStatus status = SolveStatus::Error;
  double objective = 0.0;
  Vec x;
  double gap = 0.0;          // achieved relative MIP gap
  double wall_seconds = 0.0;
  std::string message;
};

struct SolveOptions {
  double rel_gap = 1e-6;
  double time_limit = 120.0;  // seconds
  std::uint64_t seed = 0;
};

/// Backend contract: load a problem, run with the given knobs, report
/// status and values. Infeasible/unbounded are statuses, not errors.
class SolverBackend {
public:
  virtual ~SolverBackend() = default;
  virtual SolverResult solve(const MilpProblem& p, const SolveOptions& opts) = 0;
  virtual std::string name() const = 0;
};

}  // namespace ppd
