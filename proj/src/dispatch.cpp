#include "ppdispatch/dispatch.hpp"

#include <stdexcept>

namespace ppd {

namespace {

std::string ts(int t) { return "[" + std::to_string(t) + "]"; }

void add_coupling_rows(MilpProblem& p, const CouplingMatrix& A,
                       const ProblemLayout& layout) {
  for (std::size_t k = 0; k < A.bla_ids.size(); ++k) {
    const auto& slots = layout.blas[k];
    if (slots.id != A.bla_ids[k])
      throw std::invalid_argument("coupling order does not match BLA payloads");
    for (int t = 0; t < A.T; ++t) {
      p.add_row("couple_" + slots.id + ts(t),
                {{A.pbla_base[k] + t, -1.0}, {slots.u + t, 1.0}}, Sense::EQ, 0.0);
    }
  }
}

}  // namespace

AssembledProblem assemble_plaintext(
    const GridBlock& grid, const CouplingMatrix& A,
    const std::vector<std::pair<std::string, CompactBla>>& blas) {
  if (A.bla_ids.size() != blas.size())
    throw std::invalid_argument("assemble: coupling and payload counts differ");

  AssembledProblem ap;
  ap.problem = grid.problem;
  ap.layout.grid = grid.layout;
  ap.layout.mode = AssembleMode::Plaintext;
  MilpProblem& p = ap.problem;
  const int T = grid.layout.T;

  for (std::size_t k = 0; k < blas.size(); ++k) {
    const auto& [id, c] = blas[k];
    if (id != A.bla_ids[k])
      throw std::invalid_argument("assemble: BLA order mismatch for " + id);
    if (c.horizon() != T)
      throw std::invalid_argument("assemble: BLA " + id + " horizon mismatch");

    ProblemLayout::BlaSlots slots;
    slots.id = id;
    for (int t = 0; t < T; ++t) {
      const int idx = p.add_var("u_" + id + ts(t), VarKind::Continuous, -kInf, kInf);
      if (t == 0) slots.u = idx;
    }
    for (int t = 0; t < T; ++t) {
      const int idx =
          p.add_var("x_" + id + ts(t), VarKind::Continuous, c.x_lo, c.x_hi);
      if (t == 0) slots.x = idx;
    }
    for (int i = 0; i < T; ++i) {
      std::vector<std::pair<int, double>> row;
      for (int j = 0; j < T; ++j) {
        if (c.R(i, j) != 0.0) row.push_back({slots.x + j, c.R(i, j)});
        if (c.S(i, j) != 0.0) row.push_back({slots.u + j, -c.S(i, j)});
      }
      p.add_row("atdm_" + id + ts(i), std::move(row), Sense::EQ, c.d(i));
    }
    ap.layout.blas.push_back(slots);
  }

  add_coupling_rows(p, A, ap.layout);
  return ap;
}

AssembledProblem assemble_masked(const GridBlock& grid, const CouplingMatrix& A,
                                 const std::vector<MaskedBla>& blas) {
  if (A.bla_ids.size() != blas.size())
    throw std::invalid_argument("assemble: coupling and payload counts differ");

  AssembledProblem ap;
  ap.problem = grid.problem;
  ap.layout.grid = grid.layout;
  ap.layout.mode = AssembleMode::Masked;
  MilpProblem& p = ap.problem;
  const int T = grid.layout.T;

  for (std::size_t k = 0; k < blas.size(); ++k) {
    const auto& m = blas[k];
    if (m.id != A.bla_ids[k])
      throw std::invalid_argument("assemble: BLA order mismatch for " + m.id);
    if (m.horizon() != T)
      throw std::invalid_argument("assemble: BLA " + m.id + " horizon mismatch");
    const int rows = static_cast<int>(m.f1.rows());

    ProblemLayout::BlaSlots slots;
    slots.id = m.id;
    for (int t = 0; t < T; ++t) {
      const int idx = p.add_var("u_" + m.id + ts(t), VarKind::Continuous, -kInf, kInf);
      if (t == 0) slots.u = idx;
    }
    for (int t = 0; t < T; ++t) {
      const int idx =
          p.add_var("xt_" + m.id + ts(t), VarKind::Continuous, -kInf, kInf);
      if (t == 0) slots.x_tilde = idx;
    }
    for (int t = 0; t < 2 * T; ++t) {
      const int idx = p.add_var("w_" + m.id + ts(t), VarKind::Continuous, 0.0, kInf);
      if (t == 0) slots.w = idx;
    }

    // Column equilibration of the BLA-private columns, then row
    // equilibration. Both are exact rescalings; the u columns stay
    // untouched because the grid shares them.
    Mat blk(rows, 4 * T);
    blk.leftCols(T) = m.f1;
    blk.middleCols(T, T) = m.f2;
    blk.rightCols(2 * T) = m.f3;
    Vec rhs = m.f4;
    slots.x_tilde_scale = Vec::Ones(T);
    slots.w_scale = Vec::Ones(2 * T);
    for (int j = 0; j < T; ++j) {
      const double c = blk.col(j).cwiseAbs().maxCoeff();
      if (c > 0.0) {
        slots.x_tilde_scale(j) = 1.0 / c;
        blk.col(j) /= c;
      }
    }
    for (int j = 0; j < 2 * T; ++j) {
      const double c = blk.col(2 * T + j).cwiseAbs().maxCoeff();
      if (c > 0.0) {
        slots.w_scale(j) = 1.0 / c;
        blk.col(2 * T + j) /= c;
      }
    }
    equilibrate_rows(blk, rhs);

    for (int i = 0; i < rows; ++i) {
      std::vector<std::pair<int, double>> row;
      row.reserve(static_cast<std::size_t>(4 * T));
      for (int j = 0; j < T; ++j)
        if (blk(i, j) != 0.0) row.push_back({slots.x_tilde + j, blk(i, j)});
      for (int j = 0; j < T; ++j)
        if (blk(i, T + j) != 0.0) row.push_back({slots.u + j, blk(i, T + j)});
      for (int j = 0; j < 2 * T; ++j)
        if (blk(i, 2 * T + j) != 0.0) row.push_back({slots.w + j, blk(i, 2 * T + j)});
      p.add_row("masked_" + m.id + ts(i), std::move(row), Sense::EQ, rhs(i));
    }
    ap.layout.blas.push_back(slots);
  }

  add_coupling_rows(p, A, ap.layout);
  return ap;
}

DispatchSolution extract_dispatch(const SolverResult& r, const ProblemLayout& layout,
                                  const NetworkModel& n) {
  if (r.status != SolveStatus::Optimal)
    throw std::runtime_error("extract_dispatch: no optimal solution available (" +
                             to_string(r.status) + ")");

  const int T = layout.grid.T;
  const double dt = layout.grid.dt;
  DispatchSolution s;
  s.objective = r.objective;

  auto take = [&](int base) {
    Vec v(T);
    for (int t = 0; t < T; ++t) v(t) = r.x(base + t);
    return v;
  };

  s.p_buy = take(layout.grid.pb);
  s.p_sell = take(layout.grid.ps);
  for (int t = 0; t < T; ++t)
    s.c_grid += (n.tie.price_buy(t) * s.p_buy(t) - n.tie.price_sell(t) * s.p_sell(t)) * dt;

  for (std::size_t bi = 0; bi < layout.grid.batteries.size(); ++bi) {
    const auto& slots = layout.grid.batteries[bi];
    const auto& bat = n.batteries[bi];
    const std::string key = std::to_string(slots.bus);
    s.battery_charge[key] = take(slots.pchr);
    s.battery_discharge[key] = take(slots.pdis);
    s.battery_energy[key] = take(slots.ebt);
    for (int t = 0; t < T; ++t)
      s.c_om += bat.cost * (s.battery_charge[key](t) + s.battery_discharge[key](t)) * dt;
  }
  for (std::size_t ri = 0; ri < layout.grid.renewables.size(); ++ri) {
    const auto& slots = layout.grid.renewables[ri];
    const auto& res = n.renewables[ri];
    const std::string key = std::to_string(slots.bus);
    s.res_power[key] = take(slots.pres);
    for (int t = 0; t < T; ++t) s.c_om += res.cost * s.res_power[key](t) * dt;
  }

  for (const auto& slots : layout.blas) {
    s.bla_power[slots.id] = take(slots.u);
    if (layout.mode == AssembleMode::Plaintext) {
      s.bla_state[slots.id] = take(slots.x);
    } else {
      s.bla_pseudo[slots.id] = take(slots.x_tilde).cwiseProduct(slots.x_tilde_scale);
      Vec w(2 * T);
      for (int t = 0; t < 2 * T; ++t) w(t) = r.x(slots.w + t) * slots.w_scale(t);
      s.bla_slack[slots.id] = w;
    }
  }
  return s;
}

}  // namespace ppd
