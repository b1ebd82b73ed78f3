#pragma once

#include <Eigen/Dense>
#include <vector>

#include "kronopt/network.hpp"

namespace kronopt {

// cmap[i] = index of the kept node absorbing node i; kept nodes map to
// themselves. This is the parent-vector form of the aggregation matrix A.
using ClusterMap = std::vector<int>;

// Schur complement B_kk - B_kr * B_rr^{-1} * B_rk. `keep` must be strictly
// increasing, non-empty, and each eliminated block must touch a kept node
// (B_rr nonsingular).
Eigen::MatrixXd kron_reduce(const Eigen::MatrixXd& B,
                            const std::vector<int>& keep);

// Same reduction through the grounded impedance matrix: ground `ref` (must be
// in keep), invert, drop eliminated rows/cols, invert back, restore the ref
// row/col from zero-row-sum symmetry.
Eigen::MatrixXd kron_reduce_via_impedance(const Eigen::MatrixXd& B,
                                          const std::vector<int>& keep,
                                          int ref);

// P_red[k] = sum of P over the nodes mapped onto keep[k] (A*P).
Eigen::VectorXd aggregate_injections(const Eigen::VectorXd& P,
                                     const ClusterMap& cmap,
                                     const std::vector<int>& keep);

// Ward equivalent injections P_k - B_kr * B_rr^{-1} * P_r; preserves sum(P).
Eigen::VectorXd ward_injections(const Eigen::MatrixXd& B,
                                const Eigen::VectorXd& P,
                                const std::vector<int>& keep);

// Materialize a reduced model as a Network: bus ids from orig at `keep`,
// branches from off-diagonal fill with |B_ij| > fill_tol, slack at
// keep[slack_pos], injections Pred.
Network reduced_network(const Network& orig, const std::vector<int>& keep,
                        const Eigen::MatrixXd& Bred,
                        const Eigen::VectorXd& Pred, int slack_pos,
                        double fill_tol = 1e-9);

}  // namespace kronopt
