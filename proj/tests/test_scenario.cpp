#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <string>

#include "ppdispatch/scenario.hpp"

using namespace ppd;

namespace {
const std::string kData = PPD_DATA_DIR;
}

TEST_CASE("bundled scenario loads with the table parameters") {
  Scenario s = load_scenario(kData + "/ieee33.json");
  CHECK(s.horizon == 24);
  CHECK(s.network.buses.size() == 33);
  CHECK(s.network.branches.size() == 32);
  REQUIRE(s.blas.size() == 3);

  const BlaParams& b1 = s.bla("bla1");
  CHECK(b1.alpha(0) == doctest::Approx(0.96));
  CHECK(b1.beta(0) == doctest::Approx(0.005));
  CHECK(b1.beta(1) == doctest::Approx(0.003));
  CHECK(b1.gamma(0) == doctest::Approx(0.02));
  CHECK(b1.temp_hi == 27.0);
  CHECK(b1.temp_lo == 23.0);
  CHECK(b1.hist_x(0) == 23.0);
  CHECK(b1.hist_u(0) == 100.0);

  const BlaParams& b2 = s.bla("bla2");
  CHECK(b2.alpha(0) == doctest::Approx(0.963));
  CHECK(b2.beta(0) == doctest::Approx(0.0051));
  const BlaParams& b3 = s.bla("bla3");
  CHECK(b3.alpha(0) == doctest::Approx(0.959));
  CHECK(b3.temp_lo == 22.0);

  CHECK(s.masking.duplication == 2);
  CHECK(s.solver.rel_gap == doctest::Approx(1e-6));
  CHECK(validate_network(s.network, s.horizon).pass());

  // Deterministic digest for replay stamping.
  Scenario again = load_scenario(kData + "/ieee33.json");
  CHECK(s.digest() == again.digest());
}

TEST_CASE("toy scenario loads") {
  Scenario s = load_scenario(kData + "/toy.json");
  CHECK(s.horizon == 4);
  CHECK(s.blas.size() == 1);
  CHECK(s.network.bla_placement.at("toybla") == 3);
}

TEST_CASE("missing file produces a clear error") {
  CHECK_THROWS_AS(load_scenario("/nonexistent/nothing.json"), ScenarioError);
}

TEST_CASE("parse errors carry the origin") {
  try {
    parse_scenario("{ not valid json", "inline-test");
    FAIL("expected a throw");
  } catch (const ScenarioError& e) {
    CHECK(std::string(e.what()).find("inline-test") != std::string::npos);
  }
}

TEST_CASE("zone weight violations are itemized") {
  const std::string text = R"({
    "schema_version": 1, "name": "z", "horizon": 4,
    "network": {
      "buses": [{"id": 1, "vmin": 1.0, "vmax": 1.0}],
      "branches": [],
      "tie": {"bus": 1, "p_max": 10.0, "price_buy": 1.0, "price_sell": 0.5}
    },
    "blas": [{"id": "b", "bus": 1, "order": 1, "alpha": [0.9], "beta": [0.01, 0.0],
              "gamma": 0.0, "temp_hi": 25, "temp_lo": 22,
              "hist_x": [23], "hist_u": [0],
              "zones": {"xi": [0.5, 0.4], "temps": [[22,22,22,22],[24,24,24,24]]}}]
  })";
  try {
    parse_scenario(text, "zones-test");
    FAIL("expected a throw");
  } catch (const ScenarioError& e) {
    CHECK(std::string(e.what()).find("zone weights must sum to 1") != std::string::npos);
  }
}

TEST_CASE("the extension precondition T >= M+2 is enforced at load") {
  const std::string text = R"({
    "schema_version": 1, "name": "short", "horizon": 3,
    "network": {
      "buses": [{"id": 1, "vmin": 1.0, "vmax": 1.0}],
      "branches": [],
      "tie": {"bus": 1, "p_max": 10.0, "price_buy": 1.0, "price_sell": 0.5}
    },
    "blas": [{"id": "b", "bus": 1, "order": 2, "alpha": [0.5, 0.1],
              "beta": [0.01, 0.0, 0.0], "gamma": 0.0,
              "temp_hi": 25, "temp_lo": 22,
              "hist_x": [23, 23], "hist_u": [0, 0]}]
  })";
  try {
    parse_scenario(text, "short-test");
    FAIL("expected a throw");
  } catch (const ScenarioError& e) {
    CHECK(std::string(e.what()).find("T >= M+2") != std::string::npos);
  }
}
