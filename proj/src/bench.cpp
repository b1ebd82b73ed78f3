#include "kronopt/bench.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <set>
#include <sstream>
#include <utility>
#include <vector>

#include "kronopt/dcpf.hpp"
#include "kronopt/textio.hpp"

namespace kronopt {

namespace {

// Portable draws on top of mt19937_64; distribution objects are not
// bit-reproducible across standard libraries.
double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return lo + (hi - lo) * uniform01(rng);
}

int uniform_int(std::mt19937_64& rng, int n) {  // [0, n)
  return static_cast<int>(rng() % static_cast<uint64_t>(n));
}

// Rescale injections so the solved angle profile stays within the assignment
// feasibility region of the reduction MILP (|theta| well below pi/2).
void clamp_angle_range(std::vector<Bus>& buses, const std::vector<Branch>& branches,
                       double base_mva, double target) {
  Network net = Network::from_records(base_mva, buses, branches);
  Eigen::VectorXd theta = solve_dc(net);
  double worst = theta.cwiseAbs().maxCoeff();
  if (worst <= target) return;
  double scale = target / worst;
  for (Bus& b : buses) b.injection_pu *= scale;
}

struct Line {
  int from, to;
  double x;
};

}  // namespace

Network generate_rts96() {
  const double base = 100.0;
  static const Line area_lines[] = {
      {1, 2, 0.0139},  {1, 3, 0.2112},  {1, 5, 0.0845},  {2, 4, 0.1267},
      {2, 6, 0.1920},  {3, 9, 0.1190},  {3, 24, 0.0839}, {4, 9, 0.1037},
      {5, 10, 0.0883}, {6, 10, 0.0605}, {7, 8, 0.0614},  {8, 9, 0.1651},
      {8, 10, 0.1651}, {9, 11, 0.0839}, {9, 12, 0.0839}, {10, 11, 0.0839},
      {10, 12, 0.0839}, {11, 13, 0.0476}, {11, 14, 0.0418}, {12, 13, 0.0476},
      {12, 23, 0.0966}, {13, 23, 0.0865}, {14, 16, 0.0389}, {15, 16, 0.0173},
      {15, 21, 0.0490}, {15, 21, 0.0490}, {15, 24, 0.0519}, {16, 17, 0.0259},
      {16, 19, 0.0231}, {17, 18, 0.0144}, {17, 22, 0.1053}, {18, 21, 0.0259},
      {18, 21, 0.0259}, {19, 20, 0.0396}, {19, 20, 0.0396}, {20, 23, 0.0216},
      {20, 23, 0.0216}, {21, 22, 0.0678}};
  static const std::pair<int, double> area_loads[] = {
      {1, 108}, {2, 97},  {3, 180}, {4, 74},  {5, 71},  {6, 136},
      {7, 125}, {8, 171}, {9, 175}, {10, 195}, {13, 265}, {14, 194},
      {15, 317}, {16, 100}, {18, 333}, {19, 181}, {20, 128}};
  static const std::pair<int, double> area_gens[] = {
      {1, 172},  {2, 172},  {7, 240},  {13, 285.3}, {15, 215},
      {16, 155}, {18, 400}, {21, 400}, {22, 300},   {23, 660}};
  static const Line ties[] = {{107, 203, 0.161}, {113, 215, 0.075},
                              {123, 217, 0.074}, {207, 303, 0.161},
                              {223, 317, 0.074}, {121, 325, 0.0416},
                              {325, 318, 0.0416}};

  double load_total = 0.0, gen_total = 0.0;
  for (const auto& [b, mw] : area_loads) load_total += mw;
  for (const auto& [b, mw] : area_gens) gen_total += mw;
  const double gen_scale = load_total / gen_total;

  std::vector<Bus> buses;
  std::vector<Branch> branches;
  for (int area = 0; area < 3; ++area) {
    int off = 100 * (area + 1);
    for (int b = 1; b <= 24; ++b) buses.push_back({off + b, 0.0, off + b == 113});
    for (const Line& ln : area_lines)
      branches.push_back({off + ln.from, off + ln.to, ln.x});
    for (const auto& [b, mw] : area_loads) {
      for (Bus& bus : buses)
        if (bus.id == off + b) bus.injection_pu -= mw / base;
    }
    for (const auto& [b, mw] : area_gens) {
      for (Bus& bus : buses)
        if (bus.id == off + b) bus.injection_pu += mw * gen_scale / base;
    }
  }
  buses.push_back({325, 0.0, false});
  for (const Line& ln : ties) branches.push_back({ln.from, ln.to, ln.x});

  clamp_angle_range(buses, branches, base, 1.1);
  return Network::from_records(base, std::move(buses), std::move(branches));
}

Network generate_synth2383(uint64_t seed) {
  const double base = 100.0;
  std::mt19937_64 rng(seed);

  std::vector<int> sizes = {132, 126, 121, 116, 111};
  for (int i = 0; i < 13; ++i) sizes.push_back(85);
  for (int i = 0; i < 8; ++i) sizes.push_back(84);
  const int n_regions = static_cast<int>(sizes.size());

  std::vector<int> first(n_regions + 1, 0);
  for (int r = 0; r < n_regions; ++r) first[r + 1] = first[r] + sizes[r];

  std::vector<Bus> buses;
  std::vector<Branch> branches;
  std::set<std::pair<int, int>> used;
  auto add_line = [&](int a, int b, double x) {
    if (a == b) return false;
    auto key = std::minmax(a, b);
    if (!used.insert(key).second) return false;
    branches.push_back({a, b, x});
    return true;
  };

  std::vector<int> degree(first[n_regions] + 1, 0);
  for (int r = 0; r < n_regions; ++r) {
    int lo = first[r] + 1, n = sizes[r];
    for (int b = lo; b < lo + n; ++b) buses.push_back({b, 0.0, false});
    for (int i = 1; i < n; ++i) {
      int a = lo + i, b = lo + uniform_int(rng, i);
      add_line(a, b, uniform(rng, 0.01, 0.3));
      ++degree[a];
      ++degree[b];
    }
    int extras = n / 5 + 1;
    int attempts = 0;
    while (extras > 0 && attempts < 50 * n) {
      ++attempts;
      int a = lo + uniform_int(rng, n), b = lo + uniform_int(rng, n);
      if (add_line(a, b, uniform(rng, 0.01, 0.3))) {
        --extras;
        ++degree[a];
        ++degree[b];
      }
    }
  }

  auto random_bus = [&](int region) {
    return first[region] + 1 + uniform_int(rng, sizes[region]);
  };
  for (int r = 0; r < n_regions; ++r) {
    int a = random_bus(r), b = random_bus((r + 1) % n_regions);
    while (!add_line(a, b, uniform(rng, 0.02, 0.2))) b = random_bus((r + 1) % n_regions);
  }
  int chords = 15;
  while (chords > 0) {
    int r1 = uniform_int(rng, n_regions), r2 = uniform_int(rng, n_regions);
    if (r1 == r2) continue;
    if (add_line(random_bus(r1), random_bus(r2), uniform(rng, 0.02, 0.2))) --chords;
  }

  // Loads on ~60% of buses; a handful of generators per region covering the
  // regional load with a +/-15% imbalance traded over the ties.
  double sys_load = 0.0;
  std::vector<double> region_load(n_regions, 0.0);
  for (int r = 0; r < n_regions; ++r) {
    for (int i = 0; i < sizes[r]; ++i) {
      if (uniform01(rng) < 0.6) {
        double mw = uniform(rng, 10.0, 80.0);
        buses[first[r] + i].injection_pu -= mw / base;
        region_load[r] += mw;
        sys_load += mw;
      }
    }
  }
  std::vector<std::pair<int, double>> gen_at;  // bus index, MW
  double sys_gen = 0.0;
  for (int r = 0; r < n_regions; ++r) {
    int n_gen = std::max(2, sizes[r] * 3 / 20);
    std::set<int> spots;
    while (static_cast<int>(spots.size()) < n_gen)
      spots.insert(first[r] + uniform_int(rng, sizes[r]));
    double total = region_load[r] * uniform(rng, 0.85, 1.15);
    for (int idx : spots) {
      double mw = total / n_gen;
      gen_at.push_back({idx, mw});
      sys_gen += mw;
    }
  }
  double balance = sys_load / sys_gen;
  for (const auto& [idx, mw] : gen_at) buses[idx].injection_pu += mw * balance / base;

  int slack_idx = first[0];
  for (int i = first[0]; i < first[1]; ++i)
    if (degree[buses[i].id] > degree[buses[slack_idx].id]) slack_idx = i;
  buses[slack_idx].is_slack = true;

  clamp_angle_range(buses, branches, base, 1.1);
  return Network::from_records(base, std::move(buses), std::move(branches));
}

std::string to_matpower_text(const Network& net, const std::string& name) {
  std::ostringstream out;
  out << "function mpc = " << name << "\n";
  out << "% Synthetic benchmark case for DC studies.\n";
  out << "mpc.version = '2';\n";
  out << "mpc.baseMVA = " << fmt_double(net.base_mva()) << ";\n\n";

  out << "%% bus data\n";
  out << "%\tbus_i\ttype\tPd\tQd\tGs\tBs\tarea\tVm\tVa\tbaseKV\tzone\tVmax\tVmin\n";
  out << "mpc.bus = [\n";
  for (const Bus& b : net.buses()) {
    double pd = b.injection_pu < 0 ? -b.injection_pu * net.base_mva() : 0.0;
    int type = b.is_slack ? 3 : (b.injection_pu > 0 ? 2 : 1);
    out << "\t" << b.id << "\t" << type << "\t" << fmt_double(pd)
        << "\t0\t0\t0\t1\t1\t0\t230\t1\t1.05\t0.95;\n";
  }
  out << "];\n\n";

  out << "%% generator data\n";
  out << "%\tbus\tPg\tQg\tQmax\tQmin\tVg\tmBase\tstatus\tPmax\tPmin\n";
  out << "mpc.gen = [\n";
  bool slack_has_gen = false;
  for (const Bus& b : net.buses()) {
    if (b.injection_pu > 0) {
      double pg = b.injection_pu * net.base_mva();
      if (b.is_slack) slack_has_gen = true;
      out << "\t" << b.id << "\t" << fmt_double(pg) << "\t0\t100\t-100\t1\t"
          << fmt_double(net.base_mva()) << "\t1\t" << fmt_double(pg) << "\t0;\n";
    }
  }
  if (!slack_has_gen) {
    int sid = net.buses()[net.slack_index()].id;
    out << "\t" << sid << "\t0\t0\t100\t-100\t1\t" << fmt_double(net.base_mva())
        << "\t1\t0\t0;\n";
  }
  out << "];\n\n";

  out << "%% branch data\n";
  out << "%\tfbus\ttbus\tr\tx\tb\trateA\trateB\trateC\tratio\tangle\tstatus\tangmin\tangmax\n";
  out << "mpc.branch = [\n";
  for (const Branch& br : net.branches()) {
    out << "\t" << br.from << "\t" << br.to << "\t0\t" << fmt_double(br.x)
        << "\t0\t0\t0\t0\t0\t0\t1\t-360\t360;\n";
  }
  out << "];\n";
  return out.str();
}

}  // namespace kronopt
