#include "ppdispatch/scenario.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace ppd {

using nlohmann::json;

namespace {

Vec series_from(const json& j, int T, const std::string& what) {
  Vec v(T);
  if (j.is_number()) {
    v.setConstant(j.get<double>());
    return v;
  }
  if (!j.is_array() || static_cast<int>(j.size()) != T)
    throw ScenarioError(what + ": expected a scalar or an array of length " +
                        std::to_string(T));
  for (int t = 0; t < T; ++t) v(t) = j.at(static_cast<std::size_t>(t)).get<double>();
  return v;
}

Vec vec_from(const json& j, const std::string& what) {
  if (!j.is_array()) throw ScenarioError(what + ": expected an array");
  Vec v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i)
    v(static_cast<Eigen::Index>(i)) = j.at(i).get<double>();
  return v;
}

}  // namespace

const BlaParams& Scenario::bla(const std::string& id) const {
  for (const auto& b : blas)
    if (b.id == id) return b;
  throw ScenarioError("unknown BLA id: " + id);
}

std::uint64_t Scenario::digest() const {
  Digest d;
  d.update(name);
  d.update(static_cast<std::uint64_t>(schema_version));
  d.update(static_cast<std::uint64_t>(horizon));
  d.update(network.v0);
  d.update(network.dt);
  for (const auto& b : network.buses) {
    d.update(static_cast<std::uint64_t>(b.id));
    d.update(b.vmin);
    d.update(b.vmax);
    d.update(b.p_load);
    d.update(b.q_load);
  }
  for (const auto& br : network.branches) {
    d.update(static_cast<std::uint64_t>(br.from));
    d.update(static_cast<std::uint64_t>(br.to));
    d.update(br.r);
    d.update(br.x);
    d.update(br.p_max);
  }
  d.update(static_cast<std::uint64_t>(network.tie.bus));
  d.update(network.tie.p_max);
  d.update(network.tie.price_buy);
  d.update(network.tie.price_sell);
  for (const auto& bat : network.batteries) {
    d.update(static_cast<std::uint64_t>(bat.bus));
    d.update(bat.p_chr_max);
    d.update(bat.p_dis_max);
    d.update(bat.q_max);
    d.update(bat.eta_chr);
    d.update(bat.eta_dis);
    d.update(bat.sigma);
    d.update(bat.e_max);
    d.update(bat.e_min);
    d.update(bat.e_init);
    d.update(bat.cost);
  }
  for (const auto& res : network.renewables) {
    d.update(static_cast<std::uint64_t>(res.bus));
    d.update(res.p_max);
    d.update(res.q_max);
    d.update(res.cost);
  }
  for (const auto& b : blas) {
    d.update(b.id);
    d.update(static_cast<std::uint64_t>(b.horizon));
    d.update(static_cast<std::uint64_t>(b.order));
    d.update(b.alpha);
    d.update(b.beta);
    d.update(b.gamma);
    d.update(b.temp_hi);
    d.update(b.temp_lo);
    d.update(b.hist_x);
    d.update(b.hist_u);
  }
  d.update(masking.mean);
  d.update(masking.variance);
  d.update(masking.cond_max);
  d.update(masking.e_floor);
  d.update(static_cast<std::uint64_t>(masking.duplication));
  d.update(solver.rel_gap);
  d.update(seed);
  return d.value();
}

Scenario parse_scenario(const std::string& text, const std::string& origin) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ScenarioError(origin + ": " + e.what());
  }

  std::vector<std::string> problems;
  Scenario s;
  try {
    s.schema_version = j.value("schema_version", 1);
    if (s.schema_version != 1)
      throw ScenarioError(origin + ": unsupported schema_version " +
                          std::to_string(s.schema_version));
    s.name = j.value("name", "unnamed");
    s.horizon = j.at("horizon").get<int>();
    const int T = s.horizon;

    const json& jn = j.at("network");
    NetworkModel& n = s.network;
    n.v0 = jn.value("v0", 1.0);
    n.dt = j.value("dt_hours", 1.0);
    n.enforce_terminal_energy = jn.value("enforce_terminal_energy", true);
    for (const auto& jb : jn.at("buses")) {
      Bus b;
      b.id = jb.at("id").get<int>();
      b.vmin = jb.value("vmin", 0.95);
      b.vmax = jb.value("vmax", 1.05);
      b.p_load = series_from(jb.value("p_load", json(0.0)), T,
                             "bus " + std::to_string(b.id) + " p_load");
      b.q_load = series_from(jb.value("q_load", json(0.0)), T,
                             "bus " + std::to_string(b.id) + " q_load");
      n.buses.push_back(std::move(b));
    }
    for (const auto& jb : jn.value("branches", json::array())) {
      Branch br;
      br.from = jb.at("from").get<int>();
      br.to = jb.at("to").get<int>();
      br.r = jb.at("r").get<double>();
      br.x = jb.at("x").get<double>();
      br.p_max = jb.value("p_max", 1e6);
      n.branches.push_back(br);
    }
    const json& jt = jn.at("tie");
    n.tie.bus = jt.at("bus").get<int>();
    n.tie.p_max = series_from(jt.at("p_max"), T, "tie p_max");
    n.tie.price_buy = series_from(jt.at("price_buy"), T, "tie price_buy");
    n.tie.price_sell = series_from(jt.at("price_sell"), T, "tie price_sell");
    for (const auto& jb : jn.value("batteries", json::array())) {
      Battery bat;
      bat.bus = jb.at("bus").get<int>();
      bat.p_chr_max = jb.at("p_chr_max").get<double>();
      bat.p_dis_max = jb.at("p_dis_max").get<double>();
      bat.q_max = jb.value("q_max", 0.0);
      bat.eta_chr = jb.value("eta_chr", 0.95);
      bat.eta_dis = jb.value("eta_dis", 0.95);
      bat.sigma = jb.value("sigma", 0.001);
      bat.e_max = jb.at("e_max").get<double>();
      bat.e_min = jb.value("e_min", 0.0);
      bat.e_init = jb.value("e_init", bat.e_min);
      bat.cost = jb.value("cost", 0.0);
      n.batteries.push_back(bat);
    }
    for (const auto& jr : jn.value("renewables", json::array())) {
      Renewable res;
      res.bus = jr.at("bus").get<int>();
      res.p_max = series_from(jr.value("p_max", json(0.0)), T, "renewable p_max");
      res.q_max = series_from(jr.value("q_max", json(0.0)), T, "renewable q_max");
      res.cost = jr.value("cost", 0.0);
      n.renewables.push_back(std::move(res));
    }

    for (const auto& jb : j.at("blas")) {
      BlaParams b;
      b.id = jb.at("id").get<std::string>();
      b.horizon = T;
      b.order = jb.value("order", 1);
      b.alpha = vec_from(jb.at("alpha"), b.id + " alpha");
      b.beta = vec_from(jb.at("beta"), b.id + " beta");
      b.gamma = series_from(jb.at("gamma"), T, b.id + " gamma");
      b.temp_hi = jb.at("temp_hi").get<double>();
      b.temp_lo = jb.at("temp_lo").get<double>();
      b.hist_x = vec_from(jb.at("hist_x"), b.id + " hist_x");
      b.hist_u = vec_from(jb.at("hist_u"), b.id + " hist_u");
      n.bla_placement[b.id] = jb.at("bus").get<int>();

      std::optional<ZoneAggregation> zone;
      if (jb.contains("zones")) {
        ZoneAggregation z;
        z.xi = vec_from(jb.at("zones").at("xi"), b.id + " zone weights");
        for (const auto& jz : jb.at("zones").at("temps"))
          z.zone_temps.push_back(vec_from(jz, b.id + " zone temps"));
        zone = std::move(z);
      }
      s.blas.push_back(std::move(b));
      s.zones.push_back(std::move(zone));
    }

    if (j.contains("masking")) {
      const json& jm = j.at("masking");
      s.masking.mean = jm.value("mean", 0.1);
      s.masking.variance = jm.value("variance", 0.1);
      s.masking.cond_max = jm.value("cond_max", 1e8);
      s.masking.e_floor = jm.value("e_floor", 1e-3);
      s.masking.duplication = jm.value("duplication", 2);
    }
    if (j.contains("solver")) {
      s.solver.rel_gap = j.at("solver").value("gap", 1e-6);
      s.solver.time_limit = j.at("solver").value("time_limit", 120.0);
    }
    s.seed = j.value("seeds", json::object()).value("base", 0ull);
  } catch (const json::exception& e) {
    throw ScenarioError(origin + ": " + e.what());
  }

  // Validation: network structure, aggregator invariants, the masking
  // counting precondition, zone weights.
  ValidationReport vr = validate_network(s.network, s.horizon);
  for (const auto& issue : vr.issues) problems.push_back(issue);

  for (std::size_t i = 0; i < s.blas.size(); ++i) {
    const auto& b = s.blas[i];
    try {
      b.validate();
    } catch (const std::exception& e) {
      problems.push_back(e.what());
    }
    if (b.horizon < b.order + 2)
      problems.push_back(b.id + ": horizon " + std::to_string(b.horizon) +
                         " violates T >= M+2 (constraint-extension requirement)");
    if (s.zones[i]) {
      const auto& z = *s.zones[i];
      if (std::abs(z.xi.sum() - 1.0) > 1e-12)
        problems.push_back(b.id + ": zone weights must sum to 1");
      if (z.xi.size() > 0 && z.xi.minCoeff() < 0.0)
        problems.push_back(b.id + ": zone weights must be nonnegative");
      if (z.xi.size() != static_cast<Eigen::Index>(z.zone_temps.size()))
        problems.push_back(b.id + ": one weight per zone series required");
    }
  }

  if (!problems.empty()) {
    std::ostringstream os;
    os << origin << ": scenario validation failed:\n";
    for (const auto& p : problems) os << "  - " << p << "\n";
    throw ScenarioError(os.str());
  }
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError(path + ": cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str(), path);
}

}  // namespace ppd
