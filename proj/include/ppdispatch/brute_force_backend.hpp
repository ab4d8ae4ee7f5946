#pragma once

#include "ppdispatch/milp.hpp"

namespace ppd {

/// Exhaustive MILP backend: enumerates every binary pattern and solves the
/// remaining LP with the dense simplex. Only accepts instances with at most
/// `max_binaries` binaries; serves as the oracle for the reference backend.
class BruteForceBackend : public SolverBackend {
public:
  explicit BruteForceBackend(int max_binaries = 16) : max_binaries_(max_binaries) {}

  SolverResult solve(const MilpProblem& p, const SolveOptions& opts) override;
  std::string name() const override { return "brute-force"; }

private:
  int max_binaries_;
};

}  // namespace ppd
