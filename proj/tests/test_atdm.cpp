#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ppdispatch/atdm.hpp"
#include "test_util.hpp"

using namespace ppd;
using ppd::testing::bla1;
using ppd::testing::random_bla;

TEST_CASE("shift matrix basics") {
  CHECK(lambda_matrix(0, 3).isApprox(Mat::Identity(3, 3)));

  Mat l1 = lambda_matrix(1, 3);
  Mat expect = Mat::Zero(3, 3);
  expect(1, 0) = 1.0;
  expect(2, 1) = 1.0;
  CHECK(l1.isApprox(expect));

  CHECK(lambda_matrix(3, 3).isZero(0.0));

  CHECK_THROWS_AS(lambda_matrix(4, 3), std::invalid_argument);
  CHECK_THROWS_AS(lambda_matrix(1, 0), std::invalid_argument);
}

TEST_CASE("shift matrix composition property") {
  for (int T : {2, 3, 5, 8}) {
    for (int a = 0; a <= T; ++a) {
      for (int b = 0; a + b <= T; ++b) {
        Mat lhs = lambda_matrix(a, T) * lambda_matrix(b, T);
        CHECK((lhs - lambda_matrix(a + b, T)).cwiseAbs().maxCoeff() == 0.0);
      }
    }
  }
}

TEST_CASE("compact form of the first table aggregator") {
  CompactBla c = build_compact(bla1(3));

  Mat r_expect(3, 3);
  r_expect << 1, 0, 0, -0.96, 1, 0, 0, -0.96, 1;
  Mat s_expect(3, 3);
  s_expect << 0.005, 0, 0, 0.003, 0.005, 0, 0, 0.003, 0.005;
  CHECK(c.R.isApprox(r_expect, 1e-15));
  CHECK(c.S.isApprox(s_expect, 1e-15));

  // d[0] = 0.96*23 + 0.003*100 + 0.02, the rest is just gamma.
  CHECK(c.d(0) == doctest::Approx(22.40).epsilon(1e-12));
  CHECK(c.d(1) == doctest::Approx(0.02).epsilon(1e-12));
  CHECK(c.d(2) == doctest::Approx(0.02).epsilon(1e-12));
  CHECK(c.x_hi == 27.0);
  CHECK(c.x_lo == 23.0);
  c.validate();
}

TEST_CASE("compact form zero case") {
  BlaParams p = bla1(4);
  p.alpha.setZero();
  p.beta.setZero();
  p.gamma.setZero();
  CompactBla c = build_compact(p);
  CHECK(c.R.isApprox(Mat::Identity(4, 4)));
  CHECK(c.S.isZero(0.0));
  CHECK(c.d.isZero(0.0));
}

TEST_CASE("pure persistence model") {
  BlaParams p;
  p.id = "persist";
  p.horizon = 5;
  p.order = 1;
  p.alpha = Vec::Constant(1, 1.0);
  p.beta = Vec::Zero(2);
  p.gamma = Vec::Zero(5);
  p.hist_x = Vec::Constant(1, 21.5);
  p.hist_u = Vec::Zero(1);
  p.temp_hi = 100;
  p.temp_lo = -100;

  CompactBla c = build_compact(p);
  CHECK(c.d(0) == doctest::Approx(21.5));
  for (int t = 1; t < 5; ++t) CHECK(c.d(t) == 0.0);

  Vec x = c.R.triangularView<Eigen::Lower>().solve(c.d);
  for (int t = 0; t < 5; ++t) CHECK(x(t) == doctest::Approx(21.5).epsilon(1e-12));
}

TEST_CASE("simulate matches the hand recursion") {
  BlaParams p = bla1(2);
  p.hist_u(0) = 0.0;
  Vec u = Vec::Zero(2);
  Vec x = simulate(p, u);
  CHECK(x(0) == doctest::Approx(22.10).epsilon(1e-12));
  CHECK(x(1) == doctest::Approx(21.236).epsilon(1e-12));

  SUBCASE("length mismatch rejected") {
    CHECK_THROWS_AS(simulate(p, Vec::Zero(3)), std::invalid_argument);
  }
}

TEST_CASE("simulate with zero coefficients returns gamma") {
  BlaParams p = bla1(6);
  p.alpha.setZero();
  p.beta.setZero();
  for (int t = 0; t < 6; ++t) p.gamma(t) = 0.5 * t;
  Vec x = simulate(p, Vec::Ones(6));
  CHECK(x.isApprox(p.gamma));
}

TEST_CASE("simulate and compact form agree on random models") {
  int checked = 0;
  for (std::uint64_t seed = 1; seed <= 200; ++seed) {
    const int T = 2 + static_cast<int>(seed % 9);
    const int M = 1 + static_cast<int>(seed % 3);
    BlaParams p = random_bla(seed, T, M);
    GaussianSampler g(seed * 77 + 1, 0.0, 1.0);
    Vec u(T);
    for (int t = 0; t < T; ++t) u(t) = 300.0 * (g.uniform01() - 0.5);

    Vec x = simulate(p, u);
    CompactBla c = build_compact(p);
    const double resid = (c.R * x - c.S * u - c.d).cwiseAbs().maxCoeff();
    CHECK(resid <= 1e-9);
    ++checked;
  }
  CHECK(checked == 200);
}

TEST_CASE("d is linear in gamma and history") {
  BlaParams p = random_bla(42, 8, 2);
  p.hist_x.setZero();
  p.hist_u.setZero();
  CompactBla base = build_compact(p);

  BlaParams doubled = p;
  doubled.gamma *= 2.0;
  CompactBla twice = build_compact(doubled);
  CHECK((twice.d - 2.0 * base.d).cwiseAbs().maxCoeff() == 0.0);

  BlaParams hist = p;
  hist.gamma.setZero();
  hist.hist_x = Vec::Constant(2, 3.0);
  hist.hist_u = Vec::Constant(2, 7.0);
  CompactBla h1 = build_compact(hist);
  hist.hist_x *= 2.0;
  hist.hist_u *= 2.0;
  CompactBla h2 = build_compact(hist);
  CHECK((h2.d - 2.0 * h1.d).cwiseAbs().maxCoeff() <= 1e-15);
}

TEST_CASE("unit lower-triangular R is always invertible") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    BlaParams p = random_bla(seed + 1000, 10, 3);
    CompactBla c = build_compact(p);
    Vec x = c.R.triangularView<Eigen::Lower>().solve(c.d);
    CHECK((c.R * x - c.d).cwiseAbs().maxCoeff() <= 1e-9);
  }
}

TEST_CASE("invalid parameters are rejected") {
  BlaParams p = bla1(3);
  p.alpha = Vec::Zero(2);  // wrong length for M = 1
  CHECK_THROWS_AS(build_compact(p), InvalidModel);

  BlaParams q = bla1(3);
  q.temp_lo = 30.0;
  CHECK_THROWS_AS(q.validate(), InvalidModel);

  BlaParams z = bla1(3);
  z.horizon = 0;
  CHECK_THROWS_AS(z.validate(), InvalidModel);
}

TEST_CASE("zone aggregation") {
  ZoneAggregation z;
  z.xi = Vec(2);
  z.xi << 0.5, 0.5;
  z.zone_temps = {Vec::Constant(1, 22.0), Vec::Constant(1, 24.0)};
  CHECK(aggregate_zones(z)(0) == doctest::Approx(23.0));

  z.xi << 0.25, 0.75;
  z.zone_temps = {Vec::Constant(1, 20.0), Vec::Constant(1, 24.0)};
  CHECK(aggregate_zones(z)(0) == doctest::Approx(23.0));

  ZoneAggregation one;
  one.xi = Vec::Constant(1, 1.0);
  one.zone_temps = {Vec::Constant(3, 21.0)};
  CHECK(aggregate_zones(one).isApprox(Vec::Constant(3, 21.0)));

  SUBCASE("weight sum enforced") {
    ZoneAggregation bad = one;
    bad.xi(0) = 0.9;
    CHECK_THROWS_AS(aggregate_zones(bad), std::invalid_argument);
  }
  SUBCASE("negative weights rejected") {
    ZoneAggregation bad;
    bad.xi = Vec(2);
    bad.xi << 1.5, -0.5;
    bad.zone_temps = {Vec::Constant(1, 20.0), Vec::Constant(1, 24.0)};
    CHECK_THROWS_AS(aggregate_zones(bad), std::invalid_argument);
  }
}
