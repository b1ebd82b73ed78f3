#include "support/testnets.hpp"

#include <cstdlib>
#include <random>

#include "kronopt/dcpf.hpp"

namespace kronopt::testing {

namespace {

double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace

Network from_edges(int n, const std::vector<std::pair<int, int>>& edges,
                   const std::vector<double>& x, const Eigen::VectorXd& P,
                   int slack) {
  std::vector<Bus> buses;
  for (int i = 0; i < n; ++i) buses.push_back({i + 1, P(i), i == slack});
  std::vector<Branch> branches;
  for (size_t e = 0; e < edges.size(); ++e)
    branches.push_back({edges[e].first + 1, edges[e].second + 1, x[e]});
  return Network::from_records(100.0, std::move(buses), std::move(branches));
}

Network path3() {
  Eigen::VectorXd P(3);
  P << 1, 0, -1;
  return from_edges(3, {{0, 1}, {1, 2}}, {1.0, 1.0}, P, 1);
}

Network path3_slack_end() {
  Eigen::VectorXd P(3);
  P << 1, 0, -1;
  return from_edges(3, {{0, 1}, {1, 2}}, {1.0, 1.0}, P, 2);
}

Network star4() {
  Eigen::VectorXd P(4);
  P << -0.6, 0.1, 0.2, 0.3;
  return from_edges(4, {{0, 1}, {0, 2}, {0, 3}}, {1.0, 1.0, 1.0}, P, 0);
}

Network triangles_bridge() {
  Eigen::VectorXd P = Eigen::VectorXd::Zero(6);
  return from_edges(6,
                    {{0, 1}, {1, 2}, {0, 2}, {3, 4}, {4, 5}, {3, 5}, {2, 3}},
                    std::vector<double>(7, 1.0), P, 0);
}

Network random_connected(int n, uint64_t seed, double x_lo, double x_hi) {
  std::mt19937_64 rng(seed);
  std::vector<std::pair<int, int>> edges;
  std::vector<double> xs;
  for (int i = 1; i < n; ++i) {
    int j = static_cast<int>(rng() % static_cast<uint64_t>(i));
    edges.push_back({j, i});
    xs.push_back(x_lo + (x_hi - x_lo) * uniform01(rng));
  }
  int extras = n / 3;
  int attempts = 0;
  while (extras > 0 && attempts < 40 * n) {
    ++attempts;
    int a = static_cast<int>(rng() % static_cast<uint64_t>(n));
    int b = static_cast<int>(rng() % static_cast<uint64_t>(n));
    if (a == b) continue;
    bool dup = false;
    for (const auto& e : edges)
      if ((e.first == std::min(a, b) && e.second == std::max(a, b))) dup = true;
    if (dup) continue;
    edges.push_back({std::min(a, b), std::max(a, b)});
    xs.push_back(x_lo + (x_hi - x_lo) * uniform01(rng));
    --extras;
  }
  Eigen::VectorXd P(n);
  for (int i = 0; i < n; ++i) P(i) = 2.0 * uniform01(rng) - 1.0;
  int slack = static_cast<int>(rng() % static_cast<uint64_t>(n));
  P(slack) -= P.sum();

  Network net = from_edges(n, edges, xs, P, slack);
  Eigen::VectorXd theta = solve_dc(net);
  double worst = theta.cwiseAbs().maxCoeff();
  if (worst > 1.2) {
    P *= 1.2 / worst;
    net = from_edges(n, edges, xs, P, slack);
  }
  return net;
}

namespace {
std::string env_or(const char* var, const std::string& fallback) {
  const char* v = std::getenv(var);
  return v ? std::string(v) : fallback;
}
}  // namespace

std::string data_path(const std::string& name) {
  return env_or("KRONOPT_DATA", "data") + "/" + name;
}

std::string golden_path(const std::string& name) {
  return env_or("KRONOPT_GOLDEN", "tests/golden") + "/" + name;
}

std::string cli_path() { return env_or("KRONOPT_BIN", "./build/kronopt"); }

}  // namespace kronopt::testing
