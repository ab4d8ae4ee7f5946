#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ppdispatch/atdm.hpp"
#include "ppdispatch/grid.hpp"
#include "ppdispatch/masking.hpp"
#include "ppdispatch/milp.hpp"

namespace ppd {

class ScenarioError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Everything a run needs: the network, the aggregators, masking policy,
/// solver knobs and seeds. Loaded from a versioned JSON file.
struct Scenario {
  std::string name;
  int schema_version = 1;
  int horizon = 24;
  NetworkModel network;
  std::vector<BlaParams> blas;
  std::vector<std::optional<ZoneAggregation>> zones;  // parallel to blas
  KeyPolicy masking;
  SolveOptions solver;
  std::uint64_t seed = 0;

  const BlaParams& bla(const std::string& id) const;
  std::uint64_t digest() const;
};

/// Parses and validates a scenario file. Throws ScenarioError with an
/// itemized message on parse or validation failure.
Scenario load_scenario(const std::string& path);
Scenario parse_scenario(const std::string& json_text, const std::string& origin);

/// Orchestration knobs for the experiment kinds.
struct ExperimentSpec {
  enum class Kind { Accuracy, Audit, CaseSweep, BandSweep, Ppdc, Timing };
  Kind kind = Kind::Accuracy;

  // case sweep: fixed-temperature grid and participation cases
  std::vector<double> tau_const{23.5, 24.0, 24.5};

  // band sweep
  std::vector<double> band_multiplier{0.0, 1.0, 2.0, 4.0, 8.0};
  double delta_tau = 0.2;
  std::vector<double> tau_center;  // per BLA; defaults applied when empty

  // ppdc sweep
  std::vector<double> phi{0.0, 0.2, 0.4, 0.6, 0.8};
  double ppdc_rho = 0.01;
  double ppdc_noise_variance = 10.0;
  int ppdc_max_iter = 200;

  // audit
  int attack_horizon = 8;
  int attack_attempts = 20;

  // timing
  int timing_reps = 3;
};

}  // namespace ppd
