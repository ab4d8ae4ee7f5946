#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <random>
#include <string>

namespace ppd {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

/// Derives an independent stream seed from a base seed (splitmix64 step).
std::uint64_t mix_seed(std::uint64_t base, std::uint64_t stream);

/// Deterministic Gaussian sampler (Box-Muller over mt19937_64).
/// Not tied to the standard library's normal_distribution so that seeded
/// draws are reproducible across toolchains.
class GaussianSampler {
public:
  GaussianSampler(std::uint64_t seed, double mean, double variance);

  double operator()();
  Vec vector(int n);
  Mat matrix(int rows, int cols);

  /// Uniform draw in (0,1], from the same stream.
  double uniform01();

private:
  std::mt19937_64 rng_;
  double mean_;
  double stddev_;
  double cached_ = 0.0;
  bool has_cached_ = false;
};

/// 2-norm condition number via SVD. Returns +inf for a singular matrix.
double condition_number(const Mat& a);

/// Scales each row of [a | b] so its inf-norm is 1. Rows that are entirely
/// zero are left untouched. In-place.
void equilibrate_rows(Mat& a, Vec& b);

/// Max absolute Pearson correlation between any row of `a` and any row of
/// `b`. Rows with (numerically) zero variance are skipped. Returns 0 when
/// every pair is skipped.
double max_row_correlation(const Mat& a, const Mat& b);

/// FNV-1a 64-bit running hash; used for payload digests and replay checks.
class Digest {
public:
  void update(const void* data, std::size_t n);
  void update(const std::string& s);
  void update(double v);
  void update(std::uint64_t v);
  void update(const Mat& m);
  void update(const Vec& v);
  std::uint64_t value() const { return h_; }
  std::string hex() const;

private:
  std::uint64_t h_ = 1469598103934665603ull;
};

}  // namespace ppd
