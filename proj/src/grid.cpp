#include "ppdispatch/grid.hpp"

#include <algorithm>
#include <queue>
#include <set>
#include <sstream>

#include "ppdispatch/atdm.hpp"

namespace ppd {

std::string ValidationReport::to_string() const {
  if (issues.empty()) return "ok";
  std::ostringstream os;
  for (const auto& s : issues) os << "- " << s << "\n";
  return os.str();
}

namespace {

void check_series(ValidationReport& r, const Vec& v, int T, const std::string& what,
                  bool nonneg = false) {
  if (v.size() != T) {
    r.issues.push_back(what + ": expected length " + std::to_string(T) + ", got " +
                       std::to_string(v.size()));
    return;
  }
  if (nonneg && v.size() > 0 && v.minCoeff() < 0.0)
    r.issues.push_back(what + ": negative entry");
}

}  // namespace

ValidationReport validate_network(const NetworkModel& n, int T) {
  ValidationReport r;
  if (n.buses.empty()) {
    r.issues.push_back("network has no buses");
    return r;
  }
  if (T < 1) r.issues.push_back("horizon must be >= 1");
  if (n.dt <= 0) r.issues.push_back("dt must be positive");

  std::map<int, int> pos;
  for (std::size_t i = 0; i < n.buses.size(); ++i) {
    const auto& b = n.buses[i];
    if (pos.count(b.id))
      r.issues.push_back("duplicate bus id " + std::to_string(b.id));
    pos[b.id] = static_cast<int>(i);
    if (b.vmin > b.vmax)
      r.issues.push_back("bus " + std::to_string(b.id) + ": vmin > vmax");
    check_series(r, b.p_load, T, "bus " + std::to_string(b.id) + " p_load");
    check_series(r, b.q_load, T, "bus " + std::to_string(b.id) + " q_load");
  }

  if (!pos.count(n.tie.bus))
    r.issues.push_back("tie bus " + std::to_string(n.tie.bus) + " not in network");
  check_series(r, n.tie.p_max, T, "tie p_max", true);
  check_series(r, n.tie.price_buy, T, "tie price_buy");
  check_series(r, n.tie.price_sell, T, "tie price_sell");

  for (const auto& br : n.branches) {
    if (!pos.count(br.from) || !pos.count(br.to)) {
      r.issues.push_back("branch " + std::to_string(br.from) + "->" +
                         std::to_string(br.to) + " references unknown bus");
      continue;
    }
    if (br.from == br.to)
      r.issues.push_back("branch self-loop at bus " + std::to_string(br.from));
    if (br.p_max < 0)
      r.issues.push_back("branch " + std::to_string(br.from) + "->" +
                         std::to_string(br.to) + ": negative p_max");
  }

  // Radiality: connected and exactly |V|-1 edges, with every branch
  // oriented parent -> child when rooted at the tie bus.
  if (n.branches.size() + 1 != n.buses.size()) {
    r.issues.push_back("not radial: " + std::to_string(n.branches.size()) +
                       " branches for " + std::to_string(n.buses.size()) + " buses");
  } else if (pos.count(n.tie.bus)) {
    std::map<int, std::vector<std::pair<int, bool>>> adj;  // bus -> (other, is_from_side)
    for (const auto& br : n.branches) {
      if (!pos.count(br.from) || !pos.count(br.to)) continue;
      adj[br.from].push_back({br.to, true});
      adj[br.to].push_back({br.from, false});
    }
    std::set<int> seen{n.tie.bus};
    std::queue<int> q;
    q.push(n.tie.bus);
    bool orientation_ok = true;
    while (!q.empty()) {
      const int u = q.front();
      q.pop();
      for (const auto& [w, from_side] : adj[u]) {
        if (seen.count(w)) continue;
        seen.insert(w);
        if (!from_side) orientation_ok = false;  // child listed as `from`
        q.push(w);
      }
    }
    if (seen.size() != n.buses.size())
      r.issues.push_back("not radial: network is disconnected from the tie bus");
    else if (!orientation_ok)
      r.issues.push_back("branch orientation: every branch must point away from the tie bus");
  }

  for (const auto& b : n.batteries) {
    const std::string tag = "battery at bus " + std::to_string(b.bus);
    if (!pos.count(b.bus)) r.issues.push_back(tag + ": unknown bus");
    if (!(b.eta_chr > 0.0 && b.eta_chr <= 1.0))
      r.issues.push_back(tag + ": eta_chr out of (0,1]");
    if (!(b.eta_dis > 0.0 && b.eta_dis <= 1.0))
      r.issues.push_back(tag + ": eta_dis out of (0,1]");
    if (!(b.sigma >= 0.0 && b.sigma < 1.0))
      r.issues.push_back(tag + ": sigma out of [0,1)");
    if (b.p_chr_max < 0 || b.p_dis_max < 0 || b.q_max < 0)
      r.issues.push_back(tag + ": negative power limit");
    if (!(0.0 <= b.e_min && b.e_min <= b.e_max))
      r.issues.push_back(tag + ": energy bounds out of order");
    if (b.e_init < b.e_min || b.e_init > b.e_max)
      r.issues.push_back(tag + ": initial energy outside bounds");
  }

  for (const auto& res : n.renewables) {
    const std::string tag = "renewable at bus " + std::to_string(res.bus);
    if (!pos.count(res.bus)) r.issues.push_back(tag + ": unknown bus");
    check_series(r, res.p_max, T, tag + " p_max", true);
    check_series(r, res.q_max, T, tag + " q_max", true);
  }

  for (const auto& [id, bus] : n.bla_placement) {
    if (!pos.count(bus))
      r.issues.push_back("BLA " + id + " placed at unknown bus " + std::to_string(bus));
  }
  return r;
}

GridBlock build_grid_block(const NetworkModel& n, int T) {
  ValidationReport vr = validate_network(n, T);
  if (!vr.pass()) throw InvalidModel("invalid network:\n" + vr.to_string());

  GridBlock gb;
  MilpProblem& p = gb.problem;
  GridLayout& L = gb.layout;
  L.T = T;
  L.dt = n.dt;
  const double dt = n.dt;

  auto series = [&](const std::string& stem, VarKind kind, double lb, double ub) {
    int base = -1;
    for (int t = 0; t < T; ++t) {
      const int idx = p.add_var(stem + "[" + std::to_string(t) + "]", kind, lb, ub);
      if (t == 0) base = idx;
    }
    return base;
  };

  // Grid exchange.
  L.pb = series("Pbuy", VarKind::Continuous, 0.0, kInf);
  L.ps = series("Psell", VarKind::Continuous, 0.0, kInf);
  L.eb = series("ebuy", VarKind::Binary, 0.0, 1.0);
  L.es = series("esell", VarKind::Binary, 0.0, 1.0);

  // Batteries.
  for (std::size_t bi = 0; bi < n.batteries.size(); ++bi) {
    const auto& bat = n.batteries[bi];
    const std::string stem = "bt" + std::to_string(bat.bus) + "_";
    GridLayout::BatterySlots s{};
    s.bus = bat.bus;
    s.pchr = series(stem + "Pchr", VarKind::Continuous, 0.0, bat.p_chr_max);
    s.pdis = series(stem + "Pdis", VarKind::Continuous, 0.0, bat.p_dis_max);
    s.qbt = series(stem + "Q", VarKind::Continuous, -bat.q_max, bat.q_max);
    s.ebt = series(stem + "E", VarKind::Continuous, bat.e_min, bat.e_max);
    s.echr = series(stem + "echr", VarKind::Binary, 0.0, 1.0);
    s.edis = series(stem + "edis", VarKind::Binary, 0.0, 1.0);
    L.batteries.push_back(s);
  }

  // Renewables (per-period bounds carried on the variables).
  for (const auto& res : n.renewables) {
    const std::string stem = "res" + std::to_string(res.bus) + "_";
    GridLayout::ResSlots s{};
    s.bus = res.bus;
    for (int t = 0; t < T; ++t) {
      const int idx = p.add_var(stem + "P[" + std::to_string(t) + "]",
                                VarKind::Continuous, 0.0, res.p_max(t));
      if (t == 0) s.pres = idx;
    }
    for (int t = 0; t < T; ++t) {
      const int idx = p.add_var(stem + "Q[" + std::to_string(t) + "]",
                                VarKind::Continuous, 0.0, res.q_max(t));
      if (t == 0) s.qres = idx;
    }
    L.renewables.push_back(s);
  }

  // Per-bus voltage and injections.
  for (std::size_t i = 0; i < n.buses.size(); ++i) {
    const auto& b = n.buses[i];
    L.bus_pos[b.id] = static_cast<int>(i);
    const std::string sid = std::to_string(b.id);
    L.v.push_back(series("V" + sid, VarKind::Continuous, b.vmin, b.vmax));
    L.pinj.push_back(series("Pinj" + sid, VarKind::Continuous, -kInf, kInf));
    L.qinj.push_back(series("Qinj" + sid, VarKind::Continuous, -kInf, kInf));
  }

  // Branch flows.
  for (const auto& br : n.branches) {
    const std::string sid = std::to_string(br.from) + "_" + std::to_string(br.to);
    L.pbr.push_back(series("Pbr" + sid, VarKind::Continuous, -br.p_max, br.p_max));
    L.qbr.push_back(series("Qbr" + sid, VarKind::Continuous, -kInf, kInf));
  }

  // Reserved BLA injection slots, ordered by id.
  for (const auto& [id, bus] : n.bla_placement) {
    L.pbla[id] = series("Pbla_" + id, VarKind::Continuous, -kInf, kInf);
    L.bla_order.push_back(id);
    (void)bus;
  }

  // --- Constraints ---
  auto ts = [](int t) { return "[" + std::to_string(t) + "]"; };

  for (int t = 0; t < T; ++t) {
    p.add_row("buy_cap" + ts(t), {{L.pb + t, 1.0}, {L.eb + t, -n.tie.p_max(t)}},
              Sense::LE, 0.0);
    p.add_row("sell_cap" + ts(t), {{L.ps + t, 1.0}, {L.es + t, -n.tie.p_max(t)}},
              Sense::LE, 0.0);
    p.add_row("buy_sell_excl" + ts(t), {{L.eb + t, 1.0}, {L.es + t, 1.0}},
              Sense::LE, 1.0);
  }

  for (std::size_t bi = 0; bi < n.batteries.size(); ++bi) {
    const auto& bat = n.batteries[bi];
    const auto& s = L.batteries[bi];
    const std::string stem = "bt" + std::to_string(bat.bus) + "_";
    for (int t = 0; t < T; ++t) {
      p.add_row(stem + "chr_cap" + ts(t),
                {{s.pchr + t, 1.0}, {s.echr + t, -bat.p_chr_max}}, Sense::LE, 0.0);
      p.add_row(stem + "dis_cap" + ts(t),
                {{s.pdis + t, 1.0}, {s.edis + t, -bat.p_dis_max}}, Sense::LE, 0.0);
      p.add_row(stem + "excl" + ts(t), {{s.echr + t, 1.0}, {s.edis + t, 1.0}},
                Sense::LE, 1.0);
      // Energy balance; the previous level at t = 0 is the initial store.
      std::vector<std::pair<int, double>> row{{s.ebt + t, 1.0},
                                              {s.pchr + t, -bat.eta_chr * dt},
                                              {s.pdis + t, dt / bat.eta_dis}};
      double rhs = 0.0;
      if (t == 0) {
        rhs = (1.0 - bat.sigma) * bat.e_init;
      } else {
        row.push_back({s.ebt + t - 1, -(1.0 - bat.sigma)});
      }
      p.add_row(stem + "energy" + ts(t), std::move(row), Sense::EQ, rhs);
    }
    if (n.enforce_terminal_energy)
      p.add_row(stem + "terminal", {{s.ebt + T - 1, 1.0}}, Sense::GE, bat.e_init);
  }

  // Bus power balance; the tie bus sees the grid exchange as inflow.
  for (std::size_t i = 0; i < n.buses.size(); ++i) {
    const auto& b = n.buses[i];
    for (int t = 0; t < T; ++t) {
      std::vector<std::pair<int, double>> prow{{L.pinj[i] + t, 1.0}};
      std::vector<std::pair<int, double>> qrow{{L.qinj[i] + t, 1.0}};
      for (std::size_t j = 0; j < n.branches.size(); ++j) {
        if (n.branches[j].to == b.id) {
          prow.push_back({L.pbr[j] + t, 1.0});
          qrow.push_back({L.qbr[j] + t, 1.0});
        } else if (n.branches[j].from == b.id) {
          prow.push_back({L.pbr[j] + t, -1.0});
          qrow.push_back({L.qbr[j] + t, -1.0});
        }
      }
      if (b.id == n.tie.bus) {
        prow.push_back({L.pb + t, 1.0});
        prow.push_back({L.ps + t, -1.0});
      }
      p.add_row("pbal" + std::to_string(b.id) + ts(t), std::move(prow), Sense::EQ, 0.0);
      p.add_row("qbal" + std::to_string(b.id) + ts(t), std::move(qrow), Sense::EQ, 0.0);
    }
  }

  // Linearized voltage drop along each branch.
  for (std::size_t j = 0; j < n.branches.size(); ++j) {
    const auto& br = n.branches[j];
    const int from_pos = L.bus_pos.at(br.from);
    const int to_pos = L.bus_pos.at(br.to);
    for (int t = 0; t < T; ++t) {
      p.add_row("vdrop" + std::to_string(br.from) + "_" + std::to_string(br.to) + ts(t),
                {{L.v[static_cast<std::size_t>(to_pos)] + t, 1.0},
                 {L.v[static_cast<std::size_t>(from_pos)] + t, -1.0},
                 {L.pbr[j] + t, br.r / n.v0},
                 {L.qbr[j] + t, br.x / n.v0}},
                Sense::EQ, 0.0);
    }
  }

  // Injection definitions with the per-bus asset sums and load constants.
  for (std::size_t i = 0; i < n.buses.size(); ++i) {
    const auto& b = n.buses[i];
    for (int t = 0; t < T; ++t) {
      std::vector<std::pair<int, double>> prow{{L.pinj[i] + t, 1.0}};
      std::vector<std::pair<int, double>> qrow{{L.qinj[i] + t, 1.0}};
      for (const auto& s : L.renewables) {
        if (s.bus != b.id) continue;
        prow.push_back({s.pres + t, -1.0});
        qrow.push_back({s.qres + t, -1.0});
      }
      for (const auto& s : L.batteries) {
        if (s.bus != b.id) continue;
        prow.push_back({s.pdis + t, -1.0});
        prow.push_back({s.pchr + t, 1.0});
        qrow.push_back({s.qbt + t, -1.0});
      }
      for (const auto& [id, bus] : n.bla_placement) {
        if (bus != b.id) continue;
        prow.push_back({L.pbla.at(id) + t, 1.0});
      }
      p.add_row("pinj" + std::to_string(b.id) + ts(t), std::move(prow), Sense::EQ,
                -b.p_load(t));
      p.add_row("qinj" + std::to_string(b.id) + ts(t), std::move(qrow), Sense::EQ,
                -b.q_load(t));
    }
  }

  // Operating cost.
  for (int t = 0; t < T; ++t) {
    p.add_objective(L.pb + t, n.tie.price_buy(t) * dt);
    p.add_objective(L.ps + t, -n.tie.price_sell(t) * dt);
  }
  for (std::size_t bi = 0; bi < n.batteries.size(); ++bi) {
    const auto& bat = n.batteries[bi];
    const auto& s = L.batteries[bi];
    for (int t = 0; t < T; ++t) {
      p.add_objective(s.pchr + t, bat.cost * dt);
      p.add_objective(s.pdis + t, bat.cost * dt);
    }
  }
  for (std::size_t ri = 0; ri < n.renewables.size(); ++ri) {
    const auto& res = n.renewables[ri];
    const auto& s = L.renewables[ri];
    for (int t = 0; t < T; ++t) p.add_objective(s.pres + t, res.cost * dt);
  }

  return gb;
}

CouplingMatrix coupling_matrix(const NetworkModel& n, const GridLayout& layout) {
  CouplingMatrix A;
  A.T = layout.T;
  for (const auto& [id, bus] : n.bla_placement) {
    (void)bus;
    auto it = layout.pbla.find(id);
    if (it == layout.pbla.end())
      throw std::invalid_argument("coupling_matrix: BLA " + id +
                                  " has no reserved slot in the grid block");
    A.bla_ids.push_back(id);
    A.pbla_base.push_back(it->second);
  }
  return A;
}

}  // namespace ppd
