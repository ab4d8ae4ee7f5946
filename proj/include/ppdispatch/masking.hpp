#pragma once

#include <cstdint>
#include <string>
#include <variant>

#include "ppdispatch/atdm.hpp"
#include "ppdispatch/linalg.hpp"

namespace ppd {

class KeyGenerationFailure : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Knobs for secret-key generation.
struct KeyPolicy {
  double mean = 0.1;        // Gaussian mean for W, E, V entries
  double variance = 0.1;    // Gaussian variance
  double cond_max = 1e8;    // resample W/V above this condition number
  double e_floor = 1e-3;    // lower clamp for E's diagonal
  int max_attempts = 16;    // resampling budget per matrix
  int duplication = 2;      // copies of the equality system in the extension
};

/// A BLA's secret masking material. W remaps the state, E scales the box
/// slacks, V left-multiplies the stacked system.
struct MaskingKeys {
  Mat W;            // T x T, invertible
  Vec e_diag;       // 2T strictly positive diagonal entries of E
  Mat V;            // 3qT x 3qT, invertible (q = duplication)
  std::uint64_t seed = 0;
  int duplication = 2;

  int horizon() const { return static_cast<int>(W.rows()); }
  Mat E() const { return Mat(e_diag.asDiagonal()); }
};

/// Slack-relaxed, duplicated equality system before the final masking:
///   F x~ + G u + H w = e,  w >= 0.
struct FeasibilityBlocks {
  Mat F;  // 3qT x T
  Mat G;  // 3qT x T
  Mat H;  // 3qT x 2T
  Vec e;  // 3qT
  int T = 0;
  int duplication = 2;
};

/// The four blocks a BLA uploads: V F, V G, V H, V e.
struct MaskedBla {
  std::string id;
  Mat f1;  // 3qT x T
  Mat f2;  // 3qT x T
  Mat f3;  // 3qT x 2T
  Vec f4;  // 3qT

  int horizon() const { return static_cast<int>(f1.cols()); }
};

/// Upload shape of the no-relaxation path: the box constraints stay
/// two-sided, so the second mask is forced to a positive diagonal.
struct InsecureNoCrt {
  Mat b_rw;      // T x T, V1 R W
  Mat b_s;       // T x T, V1 S
  Vec b_d;       // T,     V1 d
  Vec b_bounds;  // 2T,    V2 [x_hi 1; -x_lo 1]
  Mat b_w;       // T x T, diag(V2[0..T)) W
};

/// Upload shape of the no-extension path: single (un-duplicated) stack.
struct InsecureNoCet {
  std::string id;
  Mat f1;  // 3T x T
  Mat f2;  // 3T x T
  Mat f3;  // 3T x 2T
  Vec f4;  // 3T
};

enum class InsecureVariant { NoCrt, NoCet };

/// Draws W, E, V from the configured Gaussian, resampling any matrix whose
/// condition number exceeds policy.cond_max. Deterministic given the seed.
MaskingKeys generate_keys(int T, std::uint64_t seed, const KeyPolicy& policy = {});

/// Builds the duplicated slack system from a compact model and keys.
FeasibilityBlocks build_blocks(const CompactBla& c, const MaskingKeys& k);

/// Left-multiplies the blocks by V. Throws on a (numerically) singular V.
MaskedBla apply_te2(const FeasibilityBlocks& b, const Mat& V,
                    const std::string& id = {});

/// Full pipeline: build_blocks then apply_te2 with k.V.
MaskedBla mask(const CompactBla& c, const MaskingKeys& k,
               const std::string& id = {});

/// The two deliberately weakened pipelines kept for the necessity
/// arguments; both are flagged insecure by the audit counting.
std::variant<InsecureNoCrt, InsecureNoCet> mask_insecure(const CompactBla& c,
                                                         const MaskingKeys& k,
                                                         InsecureVariant variant);
InsecureNoCrt mask_no_crt(const CompactBla& c, const MaskingKeys& k);
InsecureNoCet mask_no_cet(const CompactBla& c, const MaskingKeys& k,
                          const std::string& id = {});

/// Maps the masked state solution back: x = W x~.
Vec recover_state(const Vec& x_tilde, const Mat& W);

/// Post-protocol feasibility check of a recovered (x, u) pair.
struct FeasibilityReport {
  double equality_residual = 0.0;  // ||R x + S u - d||_inf
  double bound_violation = 0.0;    // inf-norm of box violations
  double threshold = 0.0;          // tol * (1 + ||d||_inf)
  bool pass = false;
};
FeasibilityReport verify_recovered(const CompactBla& c, const Vec& x,
                                   const Vec& u, double tol);

}  // namespace ppd
