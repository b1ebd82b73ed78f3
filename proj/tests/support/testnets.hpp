#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "kronopt/network.hpp"

namespace kronopt::testing {

// Path 1-2-3, x = 1 on both branches, P = [1, 0, -1], slack at the middle
// bus: theta = [1, 0, -1].
Network path3();

// Same path with the slack at bus 3: theta = [2, 1, 0].
Network path3_slack_end();

// Hub bus 1 with three leaves, unit reactances.
Network star4();

// Two unit-reactance triangles {1,2,3} and {4,5,6} joined by bridge 3-4.
Network triangles_bridge();

// ids 1..n; slack is `slack` (0-based index); P must sum to 0.
Network from_edges(int n, const std::vector<std::pair<int, int>>& edges,
                   const std::vector<double>& x, const Eigen::VectorXd& P,
                   int slack);

// Random connected net: spanning tree plus extra edges, reactances in
// [x_lo, x_hi], balanced injections scaled so max |theta| <= 1.2.
Network random_connected(int n, uint64_t seed, double x_lo = 0.01,
                         double x_hi = 1.0);

// $KRONOPT_DATA / $KRONOPT_GOLDEN / $KRONOPT_BIN with fallbacks.
std::string data_path(const std::string& name);
std::string golden_path(const std::string& name);
std::string cli_path();

}  // namespace kronopt::testing
