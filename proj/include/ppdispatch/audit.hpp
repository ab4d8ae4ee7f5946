#pragma once

#include <string>
#include <vector>

#include "ppdispatch/masking.hpp"

namespace ppd {

enum class Scheme { Full, NoCet, NoCrt };
enum class Verdict { UnderDetermined, OverDetermined, Square };

std::string to_string(Scheme s);
std::string to_string(Verdict v);

/// Equation/unknown accounting of the attacker's inference system for one
/// scheme variant. The full scheme counts the unknowns of the final mask V
/// alone (they already dominate); the weakened variants carry the whole
/// inventory.
struct CountReport {
  Scheme scheme = Scheme::Full;
  int T = 0;
  int M = 0;
  int duplication = 2;  // meaningful for the full scheme
  long long equations = 0;
  long long unknowns = 0;
  Verdict verdict = Verdict::Square;
  std::vector<std::pair<std::string, long long>> unknown_inventory;
};

CountReport count_inference(int T, int M, Scheme scheme, int duplication = 2);

/// Ground truth the auditor holds when measuring recovery quality.
struct AttackTruth {
  Mat R, S;
  Vec d;
};

struct AttackAttempt {
  double residual = 0.0;  // relative fit residual
  double err_R = 0.0;     // relative Frobenius distance, absolute scale
  double err_S = 0.0;     // scale-minimized relative Frobenius distance
  double err_d = 0.0;     // scale-minimized
};

struct AttackReport {
  double best_residual = 0.0;
  double err_R = 0.0, err_S = 0.0, err_d = 0.0;  // of the best-fit attempt
  int attempts = 0;
  int fit_count = 0;        // attempts with residual <= 1e-6
  int success_R_count = 0;  // fit attempts with err_R <= 1%
  int success_S_count = 0;  // fit attempts with err_S <= 1%
  bool success = false;     // any attempt recovered R, S and d within 1%
  std::vector<AttackAttempt> per_attempt;
};

/// Alternating least-squares inference against the uploaded blocks: solve
/// V * [F G H e] = [f1 f2 f3 f4] for V and the structured blocks from
/// `attempts` random initializations drawn from the protocol's published
/// masking distribution.
AttackReport empirical_attack(const MaskedBla& m, int T, int M, int duplication,
                              int attempts, std::uint64_t seed,
                              const AttackTruth& truth, int max_iters = 200);
AttackReport empirical_attack(const InsecureNoCet& m, int T, int M, int attempts,
                              std::uint64_t seed, const AttackTruth& truth,
                              int max_iters = 200);

/// Similarity metrics between an original block and its masked image.
struct MaskingDistance {
  double max_abs_correlation = 0.0;
  double orig_min = 0.0, orig_max = 0.0;
  double masked_min = 0.0, masked_max = 0.0;
};

MaskingDistance masking_distance(const Mat& original, const Mat& masked);

}  // namespace ppd
