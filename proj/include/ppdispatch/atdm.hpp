#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "ppdispatch/linalg.hpp"

namespace ppd {

/// Raised when a model object violates its structural invariants.
class InvalidModel : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Aggregate thermal dynamic model of one building-load aggregator.
///
/// The state recursion over the dispatch horizon is
///   x[t] = sum_{m=1..M} alpha[m] x[t-m]
///        + sum_{m=0..M} beta[m]  u[t-m] + gamma[t],
/// with history values supplying x and u at non-positive indices.
struct BlaParams {
  std::string id;
  int horizon = 0;              // T, number of dispatch periods
  int order = 0;                // M, model order
  Vec alpha;                    // length M, coefficients alpha[1..M]
  Vec beta;                     // length M+1, coefficients beta[0..M]
  Vec gamma;                    // length T
  double temp_hi = 0.0;         // upper comfort limit (degC)
  double temp_lo = 0.0;         // lower comfort limit (degC)
  Vec hist_x;                   // length M, [x^{1-M}, ..., x^0]
  Vec hist_u;                   // length M, [u^{1-M}, ..., u^0]

  /// Shape and bound checks. Throws InvalidModel with the first offence.
  /// The privacy-side requirement T >= M+2 is deliberately not enforced
  /// here; scenario loading and the masking pipeline check it.
  void validate() const;
};

/// Matrix form of a BLA model: R x - S u = d with box bounds on x, the
/// exact vectorization of the recursion above (S collects the +beta
/// coefficients, so it enters the equality with a minus).
struct CompactBla {
  Mat R;            // T x T, unit diagonal, lower-triangular, bandwidth M
  Mat S;            // T x T, lower-triangular, bandwidth M
  Vec d;            // length T
  double x_hi = 0.0;
  double x_lo = 0.0;

  int horizon() const { return static_cast<int>(d.size()); }
  void validate() const;
};

/// Aggregation of per-zone temperatures into the characteristic state.
struct ZoneAggregation {
  Vec xi;                        // weights, sum to 1, nonnegative
  std::vector<Vec> zone_temps;   // one series per zone, equal lengths
};

/// The m-th subdiagonal shift matrix of size T x T: entry (i,j) is 1 when
/// i - j == m. m = 0 gives the identity.
Mat lambda_matrix(int m, int T);

/// Builds the compact matrix form from the recursion parameters.
CompactBla build_compact(const BlaParams& p);

/// Forward-simulates the scalar recursion for a given control series.
Vec simulate(const BlaParams& p, const Vec& u);

/// Weighted aggregate of zone temperature series.
Vec aggregate_zones(const ZoneAggregation& z);

}  // namespace ppd
