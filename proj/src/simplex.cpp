#include "ppdispatch/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace ppd {

namespace {

enum class VarState { Basic, AtLower, AtUpper, FreeZero };

struct Tableau {
  // Problem with artificials appended.
  Mat A;
  Vec b, c, lb, ub;
  int n_real = 0;   // columns excluding artificials
  int m = 0;

  std::vector<VarState> state;
  std::vector<int> basis;          // basis[r] = column basic in row r
  Mat b_inv;
  Vec x;                           // current values, all columns

  double tol;

  void refactor() {
    Mat B(m, m);
    for (int r = 0; r < m; ++r) B.col(r) = A.col(basis[static_cast<std::size_t>(r)]);
    b_inv = B.partialPivLu().inverse();
    recompute_basics();
  }

  void recompute_basics() {
    Vec rhs = b;
    for (int j = 0; j < A.cols(); ++j) {
      if (state[static_cast<std::size_t>(j)] == VarState::Basic) continue;
      if (x(j) != 0.0) rhs -= A.col(j) * x(j);
    }
    Vec xb = b_inv * rhs;
    for (int r = 0; r < m; ++r) x(basis[static_cast<std::size_t>(r)]) = xb(r);
  }

  double nonbasic_value(int j) const {
    switch (state[static_cast<std::size_t>(j)]) {
      case VarState::AtLower: return lb(j);
      case VarState::AtUpper: return ub(j);
      default: return 0.0;
    }
  }
};

struct PivotChoice {
  int entering = -1;
  double direction = 0.0;  // +1 entering increases, -1 decreases
};

PivotChoice price(const Tableau& t, const Vec& y, const Vec& cost, bool bland) {
  PivotChoice best;
  double best_score = t.tol;
  for (int j = 0; j < t.A.cols(); ++j) {
    const auto st = t.state[static_cast<std::size_t>(j)];
    if (st == VarState::Basic) continue;
    if (t.lb(j) == t.ub(j) && st != VarState::FreeZero) continue;  // fixed
    const double d = cost(j) - y.dot(t.A.col(j));
    double score = 0.0;
    double dir = 0.0;
    if (st == VarState::AtLower && d < -t.tol) {
      score = -d;
      dir = 1.0;
    } else if (st == VarState::AtUpper && d > t.tol) {
      score = d;
      dir = -1.0;
    } else if (st == VarState::FreeZero && std::abs(d) > t.tol) {
      score = std::abs(d);
      dir = d < 0 ? 1.0 : -1.0;
    } else {
      continue;
    }
    if (bland) return {j, dir};  // first eligible index
    if (score > best_score) {
      best_score = score;
      best = {j, dir};
    }
  }
  return best;
}

LpResult run_simplex(Tableau& t, const Vec& cost, int max_iter, int& iters,
                     bool phase1) {
  LpResult res;
  int since_refactor = 0;
  int stall = 0;
  double last_obj = std::numeric_limits<double>::infinity();
  const int bland_after = 4 * (t.m + static_cast<int>(t.A.cols()));

  while (iters < max_iter) {
    ++iters;
    Vec cb(t.m);
    for (int r = 0; r < t.m; ++r) cb(r) = cost(t.basis[static_cast<std::size_t>(r)]);
    Vec y = t.b_inv.transpose() * cb;

    const bool bland = stall > bland_after;
    PivotChoice pc = price(t, y, cost, bland);
    if (pc.entering < 0) {
      res.status = SolveStatus::Optimal;
      break;
    }
    const int j = pc.entering;
    Vec w = t.b_inv * t.A.col(j);

    // Ratio test: how far can x_j move in `direction` before a basic
    // variable or x_j's own opposite bound blocks.
    double t_max = kInf;
    int leave_row = -1;
    bool leave_at_upper = false;
    if (std::isfinite(t.ub(j)) && std::isfinite(t.lb(j)))
      t_max = t.ub(j) - t.lb(j);  // bound flip distance

    for (int r = 0; r < t.m; ++r) {
      const double g = pc.direction * w(r);
      if (std::abs(g) < 1e-10) continue;
      const int bj = t.basis[static_cast<std::size_t>(r)];
      double limit;
      bool hits_upper;
      if (g > 0) {  // basic decreases toward its lower bound
        if (!std::isfinite(t.lb(bj))) continue;
        limit = (t.x(bj) - t.lb(bj)) / g;
        hits_upper = false;
      } else {  // basic increases toward its upper bound
        if (!std::isfinite(t.ub(bj))) continue;
        limit = (t.x(bj) - t.ub(bj)) / g;
        hits_upper = true;
      }
      limit = std::max(limit, 0.0);
      if (limit < t_max - 1e-12 ||
          (limit < t_max + 1e-12 && leave_row >= 0 &&
           std::abs(w(r)) > std::abs(w(leave_row)))) {
        t_max = limit;
        leave_row = r;
        leave_at_upper = hits_upper;
      }
    }

    if (!std::isfinite(t_max)) {
      res.status = phase1 ? SolveStatus::Error : SolveStatus::Unbounded;
      return res;
    }

    const double step = pc.direction * t_max;
    if (t_max <= 1e-12) ++stall; else stall = 0;

    // Move entering and adjust basics.
    const double xj_new = t.x(j) + step;
    for (int r = 0; r < t.m; ++r)
      t.x(t.basis[static_cast<std::size_t>(r)]) -= w(r) * step;
    t.x(j) = xj_new;

    if (leave_row < 0) {
      // Bound flip: entering runs to its opposite bound, basis unchanged.
      t.state[static_cast<std::size_t>(j)] =
          pc.direction > 0 ? VarState::AtUpper : VarState::AtLower;
      continue;
    }

    const int leaving = t.basis[static_cast<std::size_t>(leave_row)];
    t.state[static_cast<std::size_t>(leaving)] =
        leave_at_upper ? VarState::AtUpper : VarState::AtLower;
    if (!std::isfinite(leave_at_upper ? t.ub(leaving) : t.lb(leaving)))
      t.state[static_cast<std::size_t>(leaving)] = VarState::FreeZero;
    t.x(leaving) = t.nonbasic_value(leaving);
    t.state[static_cast<std::size_t>(j)] = VarState::Basic;
    t.basis[static_cast<std::size_t>(leave_row)] = j;

    // Product-form update of the explicit inverse.
    const double piv = w(leave_row);
    Eigen::RowVectorXd pivot_row = t.b_inv.row(leave_row) / piv;
    for (int r = 0; r < t.m; ++r) {
      if (r == leave_row) continue;
      t.b_inv.row(r) -= w(r) * pivot_row;
    }
    t.b_inv.row(leave_row) = pivot_row;

    if (++since_refactor >= 64) {
      t.refactor();
      since_refactor = 0;
    }

    double obj = 0.0;
    for (int k = 0; k < t.A.cols(); ++k) obj += cost(k) * t.x(k);
    if (obj < last_obj - t.tol) stall = 0;
    last_obj = obj;
  }

  if (res.status != SolveStatus::Optimal && iters >= max_iter)
    res.status = SolveStatus::Limit;
  return res;
}

}  // namespace

LpResult solve_lp(const LpProblem& p, double tol, int max_iter) {
  const int m = static_cast<int>(p.A.rows());
  const int n = static_cast<int>(p.A.cols());

  Tableau t;
  t.m = m;
  t.n_real = n;
  t.tol = tol;
  t.A.resize(m, n + m);
  t.A.leftCols(n) = p.A;
  t.A.rightCols(m) = Mat::Identity(m, m);  // artificial columns, signs below
  t.b = p.b;
  t.lb.resize(n + m);
  t.ub.resize(n + m);
  t.lb.head(n) = p.lb;
  t.ub.head(n) = p.ub;
  t.c = Vec::Zero(n + m);
  t.c.head(n) = p.c;
  t.x = Vec::Zero(n + m);
  t.state.assign(static_cast<std::size_t>(n + m), VarState::AtLower);

  // Start every structural variable at its bound nearest zero (or zero when
  // free); artificials absorb the row residuals.
  for (int j = 0; j < n; ++j) {
    if (std::isfinite(t.lb(j)) && (t.lb(j) >= 0.0 || !std::isfinite(t.ub(j)))) {
      t.state[static_cast<std::size_t>(j)] = VarState::AtLower;
      t.x(j) = t.lb(j);
    } else if (std::isfinite(t.ub(j)) && t.ub(j) <= 0.0) {
      t.state[static_cast<std::size_t>(j)] = VarState::AtUpper;
      t.x(j) = t.ub(j);
    } else if (std::isfinite(t.lb(j)) && std::isfinite(t.ub(j))) {
      const bool lower = std::abs(t.lb(j)) <= std::abs(t.ub(j));
      t.state[static_cast<std::size_t>(j)] = lower ? VarState::AtLower : VarState::AtUpper;
      t.x(j) = lower ? t.lb(j) : t.ub(j);
    } else {
      t.state[static_cast<std::size_t>(j)] = VarState::FreeZero;
      t.x(j) = 0.0;
    }
  }

  Vec resid = t.b - t.A.leftCols(n) * t.x.head(n);
  Vec phase1_cost = Vec::Zero(n + m);
  t.basis.resize(static_cast<std::size_t>(m));
  t.b_inv = Mat::Identity(m, m);
  for (int r = 0; r < m; ++r) {
    const int aj = n + r;
    if (resid(r) < 0) {
      t.A(r, aj) = -1.0;
      t.b_inv(r, r) = -1.0;  // basis starts as diag of artificial signs
    }
    t.lb(aj) = 0.0;
    t.ub(aj) = kInf;
    t.x(aj) = std::abs(resid(r));
    t.state[static_cast<std::size_t>(aj)] = VarState::Basic;
    t.basis[static_cast<std::size_t>(r)] = aj;
    phase1_cost(aj) = 1.0;
  }

  LpResult res;
  int iters = 0;

  double art_sum = t.x.tail(m).sum();
  if (art_sum > tol) {
    res = run_simplex(t, phase1_cost, max_iter, iters, true);
    if (res.status == SolveStatus::Limit || res.status == SolveStatus::Error) {
      res.iterations = iters;
      return res;
    }
    const double infeas = t.x.tail(m).cwiseAbs().sum();
    if (infeas > 1e-7) {
      res.status = SolveStatus::Infeasible;
      res.iterations = iters;
      return res;
    }
  }

  // Freeze artificials at zero for phase 2.
  for (int j = n; j < n + m; ++j) {
    t.ub(j) = 0.0;
    if (t.state[static_cast<std::size_t>(j)] != VarState::Basic) {
      t.state[static_cast<std::size_t>(j)] = VarState::AtLower;
      t.x(j) = 0.0;
    }
  }

  res = run_simplex(t, t.c, max_iter, iters, false);
  res.iterations = iters;
  if (res.status == SolveStatus::Optimal) {
    t.refactor();  // polish values before reporting
    res.x = t.x.head(n);
    res.objective = p.c.dot(res.x);
  }
  return res;
}

LpProblem to_standard_form(const MilpProblem& p) {
  const int n = p.num_vars();
  int slacks = 0;
  for (const auto& r : p.rows())
    if (r.sense != Sense::EQ) ++slacks;

  LpProblem lp;
  const int m = p.num_rows();
  lp.A = Mat::Zero(m, n + slacks);
  lp.b.resize(m);
  lp.c = Vec::Zero(n + slacks);
  lp.lb.resize(n + slacks);
  lp.ub.resize(n + slacks);

  for (int j = 0; j < n; ++j) {
    lp.lb(j) = p.var(j).lb;
    lp.ub(j) = p.var(j).ub;
  }
  const Vec c = p.objective_dense();
  lp.c.head(n) = c;

  int s = n;
  for (int i = 0; i < m; ++i) {
    const auto& r = p.row(i);
    for (const auto& [v, coef] : r.coeffs) lp.A(i, v) += coef;
    lp.b(i) = r.rhs;
    if (r.sense == Sense::LE) {
      lp.A(i, s) = 1.0;
      lp.lb(s) = 0.0;
      lp.ub(s) = kInf;
      ++s;
    } else if (r.sense == Sense::GE) {
      lp.A(i, s) = -1.0;
      lp.lb(s) = 0.0;
      lp.ub(s) = kInf;
      ++s;
    }
  }
  return lp;
}

}  // namespace ppd
