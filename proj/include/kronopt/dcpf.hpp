#pragma once

#include <Eigen/Dense>
#include <vector>

#include "kronopt/network.hpp"

namespace kronopt {

// Solve B*theta = P with theta(ref) pinned to theta_ref. Any injection
// imbalance is absorbed at ref: warn above 1e-6 pu, reject above 1e-2 pu.
Eigen::VectorXd solve_dc(const Eigen::MatrixXd& B, Eigen::VectorXd P, int ref,
                         double theta_ref = 0.0);

Eigen::VectorXd solve_dc(const Network& net);

// Per-branch flow (theta_from - theta_to)/x in pu, aligned with net.branches().
std::vector<double> branch_flows(const Network& net,
                                 const Eigen::VectorXd& theta);

}  // namespace kronopt
