#pragma once

#include <map>
#include <string>
#include <vector>

#include "ppdispatch/linalg.hpp"
#include "ppdispatch/milp.hpp"

namespace ppd {

struct Bus {
  int id = 0;
  double vmin = 0.95;
  double vmax = 1.05;
  Vec p_load;  // kW, length T
  Vec q_load;  // kvar, length T
};

struct Branch {
  int from = 0;  // parent side (toward the tie bus)
  int to = 0;
  double r = 0.0;  // p.u. voltage drop per kW at V0
  double x = 0.0;  // p.u. voltage drop per kvar at V0
  double p_max = 0.0;
};

struct Battery {
  int bus = 0;
  double p_chr_max = 0.0;
  double p_dis_max = 0.0;
  double q_max = 0.0;
  double eta_chr = 1.0;
  double eta_dis = 1.0;
  double sigma = 0.001;  // self-discharge per period
  double e_max = 0.0;
  double e_min = 0.0;
  double e_init = 0.0;
  double cost = 0.0;  // per kWh of throughput
};

struct Renewable {
  int bus = 0;
  Vec p_max;  // kW, length T
  Vec q_max;  // kvar, length T
  double cost = 0.0;
};

struct TieLine {
  int bus = 0;
  Vec p_max;       // kW, length T
  Vec price_buy;   // per kWh, length T
  Vec price_sell;  // per kWh, length T
};

/// Radial distribution network with the assets of the dispatch model.
struct NetworkModel {
  double v0 = 1.0;   // reference voltage, p.u.
  double dt = 1.0;   // period length, hours
  std::vector<Bus> buses;
  std::vector<Branch> branches;
  TieLine tie;
  std::vector<Battery> batteries;
  std::vector<Renewable> renewables;
  std::map<std::string, int> bla_placement;  // BLA id -> bus id
  bool enforce_terminal_energy = true;
};

struct ValidationReport {
  std::vector<std::string> issues;
  bool pass() const { return issues.empty(); }
  std::string to_string() const;
};

/// Structural checks: tree topology rooted at the tie bus, branch
/// orientation, bound sanity, series lengths, placement references.
ValidationReport validate_network(const NetworkModel& n, int T);

/// Index bookkeeping for the emitted variable space.
struct GridLayout {
  int T = 0;
  double dt = 1.0;
  int pb = -1, ps = -1, eb = -1, es = -1;  // series base indices
  struct BatterySlots {
    int bus;
    int pchr, pdis, qbt, ebt, echr, edis;
  };
  struct ResSlots {
    int bus;
    int pres, qres;
  };
  std::vector<BatterySlots> batteries;
  std::vector<ResSlots> renewables;
  std::vector<int> v, pinj, qinj;  // per bus position, series base
  std::vector<int> pbr, qbr;       // per branch, series base
  std::map<int, int> bus_pos;      // bus id -> position in buses vector
  std::map<std::string, int> pbla;  // BLA id -> series base
  std::vector<std::string> bla_order;
};

/// The grid's share of the dispatch MILP: all network constraints, the
/// operating-cost objective, and a reserved injection slot per placed BLA.
struct GridBlock {
  MilpProblem problem;
  GridLayout layout;
};

GridBlock build_grid_block(const NetworkModel& n, int T);

/// Bus/BLA coupling: row (k, t) selects the BLA's injection slot with
/// coefficient -1, so that A z + u = 0 pins u_k to the grid-side power.
struct CouplingMatrix {
  int T = 0;
  std::vector<std::string> bla_ids;
  std::vector<int> pbla_base;  // column base per BLA

  int rows() const { return T * static_cast<int>(bla_ids.size()); }
};

CouplingMatrix coupling_matrix(const NetworkModel& n, const GridLayout& layout);

}  // namespace ppd
