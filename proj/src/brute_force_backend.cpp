#include "ppdispatch/brute_force_backend.hpp"

#include <chrono>
#include <stdexcept>
#include <vector>

#include "ppdispatch/simplex.hpp"

namespace ppd {

SolverResult BruteForceBackend::solve(const MilpProblem& p,
                                      const SolveOptions& opts) {
  (void)opts;
  std::vector<int> bins;
  for (int i = 0; i < p.num_vars(); ++i)
    if (p.var(i).kind == VarKind::Binary) bins.push_back(i);
  if (static_cast<int>(bins.size()) > max_binaries_)
    throw std::invalid_argument("brute-force backend limited to " +
                                std::to_string(max_binaries_) + " binaries, got " +
                                std::to_string(bins.size()));

  const auto t0 = std::chrono::steady_clock::now();
  LpProblem base = to_standard_form(p);

  SolverResult best;
  best.status = SolveStatus::Infeasible;
  bool any_unbounded = false;

  const std::uint64_t patterns = 1ull << bins.size();
  for (std::uint64_t mask = 0; mask < patterns; ++mask) {
    LpProblem lp = base;
    for (std::size_t k = 0; k < bins.size(); ++k) {
      const double v = (mask >> k) & 1ull ? 1.0 : 0.0;
      lp.lb(bins[k]) = v;
      lp.ub(bins[k]) = v;
    }
    LpResult r = solve_lp(lp);
    if (r.status == SolveStatus::Unbounded) any_unbounded = true;
    if (r.status != SolveStatus::Optimal) continue;
    if (best.status != SolveStatus::Optimal || r.objective < best.objective - 1e-12) {
      best.status = SolveStatus::Optimal;
      best.objective = r.objective;
      best.x = r.x.head(p.num_vars());
    }
  }

  if (best.status != SolveStatus::Optimal && any_unbounded)
    best.status = SolveStatus::Unbounded;
  best.gap = 0.0;
  best.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  best.message = best.status == SolveStatus::Optimal
                     ? "enumerated " + std::to_string(patterns) + " patterns"
                     : "no feasible binary pattern";
  return best;
}

}  // namespace ppd
