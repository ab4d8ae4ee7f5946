#pragma once

#include <map>
#include <string>
#include <vector>

#include "ppdispatch/grid.hpp"
#include "ppdispatch/masking.hpp"
#include "ppdispatch/milp.hpp"

namespace ppd {

enum class AssembleMode { Plaintext, Masked };

/// Assembled-problem bookkeeping on top of the grid layout.
struct ProblemLayout {
  GridLayout grid;
  AssembleMode mode = AssembleMode::Plaintext;
  struct BlaSlots {
    std::string id;
    int u = -1;        // control series base
    int x = -1;        // plaintext state base (plaintext mode)
    int x_tilde = -1;  // pseudo-state base   (masked mode)
    int w = -1;        // slack base          (masked mode)
    // Column equilibration applied to the masked block; extraction undoes
    // it so callers always see the true pseudo-state and slacks.
    Vec x_tilde_scale, w_scale;
  };
  std::vector<BlaSlots> blas;
};

struct AssembledProblem {
  MilpProblem problem;
  ProblemLayout layout;
};

/// P0: grid block + per-BLA plaintext model (R x + S u = d, box on x) +
/// the coupling rows A z + u = 0.
AssembledProblem assemble_plaintext(
    const GridBlock& grid, const CouplingMatrix& A,
    const std::vector<std::pair<std::string, CompactBla>>& blas);

/// P1: grid block + per-BLA masked system (f1 x~ + f2 u + f3 w = f4,
/// w >= 0) + the same coupling rows. Masked rows are equilibrated to unit
/// inf-norm and the x~/w columns are equilibrated as well; both are pure
/// scalings that leave the feasible set unchanged.
AssembledProblem assemble_masked(const GridBlock& grid, const CouplingMatrix& A,
                                 const std::vector<MaskedBla>& blas);

/// Named result series with the cost decomposition.
struct DispatchSolution {
  double objective = 0.0;
  double c_grid = 0.0;
  double c_om = 0.0;
  Vec p_buy, p_sell;
  std::map<std::string, Vec> battery_charge, battery_discharge, battery_energy;
  std::map<std::string, Vec> res_power;
  std::map<std::string, Vec> bla_power;     // u_k
  std::map<std::string, Vec> bla_state;     // x_k (plaintext mode)
  std::map<std::string, Vec> bla_pseudo;    // x~_k (masked mode)
  std::map<std::string, Vec> bla_slack;     // w_k (masked mode)
};

/// Unpacks a solver point into named series. Requires an optimal result.
DispatchSolution extract_dispatch(const SolverResult& r, const ProblemLayout& layout,
                                  const NetworkModel& n);

}  // namespace ppd
