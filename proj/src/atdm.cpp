#include "ppdispatch/atdm.hpp"

#include <cmath>

namespace ppd {

void BlaParams::validate() const {
  if (horizon < 1) throw InvalidModel(id + ": horizon must be >= 1");
  if (order < 1) throw InvalidModel(id + ": model order must be >= 1");
  if (alpha.size() != order)
    throw InvalidModel(id + ": alpha must have length M");
  if (beta.size() != order + 1)
    throw InvalidModel(id + ": beta must have length M+1");
  if (gamma.size() != horizon)
    throw InvalidModel(id + ": gamma must have length T");
  if (hist_x.size() != order || hist_u.size() != order)
    throw InvalidModel(id + ": history must have length M");
  if (temp_lo > temp_hi)
    throw InvalidModel(id + ": temp_lo exceeds temp_hi");
}

void CompactBla::validate() const {
  const int T = horizon();
  if (R.rows() != T || R.cols() != T || S.rows() != T || S.cols() != T)
    throw InvalidModel("compact model: dimension mismatch");
  for (int i = 0; i < T; ++i) {
    if (std::abs(R(i, i) - 1.0) > 1e-12)
      throw InvalidModel("compact model: R diagonal must be 1");
    for (int j = i + 1; j < T; ++j) {
      if (R(i, j) != 0.0 || S(i, j) != 0.0)
        throw InvalidModel("compact model: R and S must be lower-triangular");
    }
  }
  if (x_lo > x_hi) throw InvalidModel("compact model: x_lo exceeds x_hi");
}

Mat lambda_matrix(int m, int T) {
  if (T <= 0) throw std::invalid_argument("lambda_matrix: T must be positive");
  if (m < 0 || m > T)
    throw std::invalid_argument("lambda_matrix: m out of range [0, T]");
  Mat out = Mat::Zero(T, T);
  for (int i = m; i < T; ++i) out(i, i - m) = 1.0;
  return out;
}

CompactBla build_compact(const BlaParams& p) {
  p.validate();
  const int T = p.horizon;
  const int M = p.order;

  CompactBla c;
  c.R = Mat::Identity(T, T);
  c.S = Mat::Zero(T, T);
  for (int m = 1; m <= M; ++m) {
    if (m > T) break;
    c.R -= p.alpha(m - 1) * lambda_matrix(m, T);
  }
  for (int m = 0; m <= M; ++m) {
    if (m > T) break;
    c.S += p.beta(m) * lambda_matrix(m, T);
  }

  // d[t] collects the history terms spilling past t = 1 plus gamma.
  // History index j <= 0 lives at hist[j + M - 1].
  c.d = Vec::Zero(T);
  for (int t = 1; t <= T; ++t) {
    double v = p.gamma(t - 1);
    for (int m = t; m <= M; ++m) {
      const int j = t - m;  // in [1-M, 0]
      v += p.alpha(m - 1) * p.hist_x(j + M - 1);
      v += p.beta(m) * p.hist_u(j + M - 1);
    }
    c.d(t - 1) = v;
  }
  c.x_hi = p.temp_hi;
  c.x_lo = p.temp_lo;
  return c;
}

Vec simulate(const BlaParams& p, const Vec& u) {
  p.validate();
  const int T = p.horizon;
  const int M = p.order;
  if (u.size() != T)
    throw std::invalid_argument("simulate: control series must have length T");

  Vec x(T);
  auto state_at = [&](int t) {
    return t >= 1 ? x(t - 1) : p.hist_x(t + M - 1);
  };
  auto control_at = [&](int t) {
    return t >= 1 ? u(t - 1) : p.hist_u(t + M - 1);
  };
  for (int t = 1; t <= T; ++t) {
    double v = p.gamma(t - 1);
    for (int m = 1; m <= M; ++m) v += p.alpha(m - 1) * state_at(t - m);
    for (int m = 0; m <= M; ++m) v += p.beta(m) * control_at(t - m);
    x(t - 1) = v;
  }
  return x;
}

Vec aggregate_zones(const ZoneAggregation& z) {
  const auto n = static_cast<Eigen::Index>(z.zone_temps.size());
  if (z.xi.size() != n)
    throw std::invalid_argument("aggregate_zones: one weight per zone required");
  if (n == 0) throw std::invalid_argument("aggregate_zones: no zones");
  if (std::abs(z.xi.sum() - 1.0) > 1e-12)
    throw std::invalid_argument("aggregate_zones: weights must sum to 1");
  if (z.xi.minCoeff() < 0.0)
    throw std::invalid_argument("aggregate_zones: weights must be nonnegative");

  const auto T = z.zone_temps.front().size();
  Vec out = Vec::Zero(T);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (z.zone_temps[static_cast<std::size_t>(i)].size() != T)
      throw std::invalid_argument("aggregate_zones: zone series length mismatch");
    out += z.xi(i) * z.zone_temps[static_cast<std::size_t>(i)];
  }
  return out;
}

}  // namespace ppd
