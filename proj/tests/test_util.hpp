#pragma once

#include "ppdispatch/atdm.hpp"
#include "ppdispatch/linalg.hpp"

namespace ppd::testing {

/// Table-style parameters used across the suites (first aggregator row).
inline BlaParams bla1(int T) {
  BlaParams p;
  p.id = "bla1";
  p.horizon = T;
  p.order = 1;
  p.alpha = Vec::Constant(1, 0.96);
  p.beta = Vec::Zero(2);
  p.beta << 0.005, 0.003;
  p.gamma = Vec::Constant(T, 0.02);
  p.temp_hi = 27.0;
  p.temp_lo = 23.0;
  p.hist_x = Vec::Constant(1, 23.0);
  p.hist_u = Vec::Constant(1, 100.0);
  return p;
}

/// Random stable-ish model for property tests.
inline BlaParams random_bla(std::uint64_t seed, int T, int M) {
  GaussianSampler g(seed, 0.0, 1.0);
  BlaParams p;
  p.id = "rnd";
  p.horizon = T;
  p.order = M;
  p.alpha = Vec(M);
  double scale = 0.9;
  for (int m = 0; m < M; ++m) {
    p.alpha(m) = scale * g.uniform01() / M;
    (void)scale;
  }
  p.beta = Vec(M + 1);
  for (int m = 0; m <= M; ++m) p.beta(m) = 0.01 * (g.uniform01() - 0.3);
  p.gamma = Vec(T);
  for (int t = 0; t < T; ++t) p.gamma(t) = 0.1 * (g.uniform01() - 0.5);
  p.hist_x = Vec(M);
  p.hist_u = Vec(M);
  for (int m = 0; m < M; ++m) {
    p.hist_x(m) = 20.0 + 5.0 * g.uniform01();
    p.hist_u(m) = 200.0 * g.uniform01();
  }
  p.temp_hi = 1e6;
  p.temp_lo = -1e6;
  return p;
}

}  // namespace ppd::testing
