#pragma once

#include "ppdispatch/linalg.hpp"
#include "ppdispatch/milp.hpp"

namespace ppd {

/// Dense LP in equality standard form after slack augmentation:
///   min c'x  s.t.  A x = b,  lb <= x <= ub  (entries may be +-inf).
struct LpProblem {
  Mat A;
  Vec b;
  Vec c;
  Vec lb;
  Vec ub;
};

struct LpResult {
  SolveStatus status = SolveStatus::Error;
  double objective = 0.0;
  Vec x;
  int iterations = 0;
};

/// Two-phase revised simplex for bounded variables with an explicit dense
/// basis inverse (product-form updates, periodic refactorization). Meant
/// for small instances; the brute-force MILP backend and the unit-test
/// oracles sit on top of it.
LpResult solve_lp(const LpProblem& p, double tol = 1e-9, int max_iter = 50000);

/// Converts a MilpProblem to slack-augmented equality form, with binaries
/// relaxed to their current bounds. Column i of the output maps to
/// variable i of the input for i < p.num_vars().
LpProblem to_standard_form(const MilpProblem& p);

}  // namespace ppd
