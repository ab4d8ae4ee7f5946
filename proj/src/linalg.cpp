#include "ppdispatch/linalg.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>

namespace ppd {

std::uint64_t mix_seed(std::uint64_t base, std::uint64_t stream) {
  std::uint64_t z = base + 0x9e3779b97f4a7c15ull * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

GaussianSampler::GaussianSampler(std::uint64_t seed, double mean, double variance)
    : rng_(seed), mean_(mean), stddev_(std::sqrt(variance)) {}

double GaussianSampler::uniform01() {
  // 53-bit mantissa, shifted into (0,1].
  return (static_cast<double>(rng_() >> 11) + 1.0) * (1.0 / 9007199254740992.0);
}

double GaussianSampler::operator()() {
  if (has_cached_) {
    has_cached_ = false;
    return mean_ + stddev_ * cached_;
  }
  const double u1 = uniform01();
  const double u2 = uniform01();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double t = 2.0 * std::numbers::pi * u2;
  cached_ = r * std::sin(t);
  has_cached_ = true;
  return mean_ + stddev_ * r * std::cos(t);
}

Vec GaussianSampler::vector(int n) {
  Vec v(n);
  for (int i = 0; i < n; ++i) v(i) = (*this)();
  return v;
}

Mat GaussianSampler::matrix(int rows, int cols) {
  Mat m(rows, cols);
  // Row-major fill so a matrix draw reads like a flat stream of values.
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = (*this)();
  return m;
}

double condition_number(const Mat& a) {
  Eigen::JacobiSVD<Mat> svd(a);
  const auto& s = svd.singularValues();
  if (s.size() == 0) return std::numeric_limits<double>::infinity();
  const double smin = s(s.size() - 1);
  if (smin <= 0.0) return std::numeric_limits<double>::infinity();
  return s(0) / smin;
}

void equilibrate_rows(Mat& a, Vec& b) {
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    double scale = a.row(i).cwiseAbs().maxCoeff();
    scale = std::max(scale, std::abs(b(i)));
    if (scale > 0.0) {
      a.row(i) /= scale;
      b(i) /= scale;
    }
  }
}

namespace {
bool centered_unit(const Eigen::RowVectorXd& row, Eigen::RowVectorXd& out) {
  const double mean = row.mean();
  out = row.array() - mean;
  const double n = out.norm();
  if (n < 1e-14) return false;
  out /= n;
  return true;
}
}  // namespace

double max_row_correlation(const Mat& a, const Mat& b) {
  double best = 0.0;
  std::vector<Eigen::RowVectorXd> bn;
  bn.reserve(static_cast<std::size_t>(b.rows()));
  std::vector<bool> ok(static_cast<std::size_t>(b.rows()));
  for (Eigen::Index j = 0; j < b.rows(); ++j) {
    Eigen::RowVectorXd r;
    ok[static_cast<std::size_t>(j)] = centered_unit(b.row(j), r);
    bn.push_back(r);
  }
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    Eigen::RowVectorXd ra;
    if (!centered_unit(a.row(i), ra)) continue;
    for (Eigen::Index j = 0; j < b.rows(); ++j) {
      if (!ok[static_cast<std::size_t>(j)]) continue;
      best = std::max(best, std::abs(ra.dot(bn[static_cast<std::size_t>(j)])));
    }
  }
  return best;
}

void Digest::update(const void* data, std::size_t n) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < n; ++i) {
    h_ ^= p[i];
    h_ *= 1099511628211ull;
  }
}

void Digest::update(const std::string& s) { update(s.data(), s.size()); }

void Digest::update(double v) { update(&v, sizeof(v)); }

void Digest::update(std::uint64_t v) { update(&v, sizeof(v)); }

void Digest::update(const Mat& m) {
  const std::uint64_t r = static_cast<std::uint64_t>(m.rows());
  const std::uint64_t c = static_cast<std::uint64_t>(m.cols());
  update(r);
  update(c);
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) update(m(i, j));
}

void Digest::update(const Vec& v) {
  update(static_cast<std::uint64_t>(v.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) update(v(i));
}

std::string Digest::hex() const {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h_));
  return std::string(buf);
}

}  // namespace ppd
