#pragma once

#include <memory>
#include <mutex>
#include <string>

#include "ppdispatch/milp.hpp"

namespace ppd {

/// Reference MILP backend bound to the HiGHS solver, reached through a
/// persistent worker process (scipy ships HiGHS; no native MILP library is
/// assumed on the host). One worker serves many solves; requests and
/// responses travel as JSON files referenced over a line protocol.
///
/// Worker discovery order: explicit path argument, PPDISPATCH_WORKER env
/// var, highs_worker.py next to the executable, then the build-time source
/// location.
class HighsProcessBackend : public SolverBackend {
public:
  explicit HighsProcessBackend(std::string worker_path = "");
  ~HighsProcessBackend() override;

  HighsProcessBackend(const HighsProcessBackend&) = delete;
  HighsProcessBackend& operator=(const HighsProcessBackend&) = delete;

  SolverResult solve(const MilpProblem& p, const SolveOptions& opts) override;
  std::string name() const override { return "highs"; }

  /// True when a worker could be started and answers PING.
  bool available();

private:
  struct Process;
  bool ensure_started();
  void shutdown();

  std::string worker_path_;
  std::string temp_dir_;
  std::unique_ptr<Process> proc_;
  std::mutex mu_;
  int request_counter_ = 0;
};

}  // namespace ppd
