#pragma once

#include <Eigen/Dense>
#include <vector>

#include "kronopt/model.hpp"

namespace kronopt {

// One iteration's data for the DC Opti-KRON MILP over a (sub)network.
// Indices: "active" positions 0..n_s-1 are the current super-nodes;
// "original" positions 0..n_orig-1 are the nodes of the community at
// iteration 1. active[i] gives the original index of super-node i.
struct OptiKronInstance {
  std::vector<int> active;
  Eigen::MatrixXi omega_prev;  // n_s x n_orig, columns sum to 1
  Eigen::MatrixXd B_cur;       // n_s x n_s Laplacian
  Eigen::MatrixXi lambda_cur;  // n_s x n_s adjacency (zero diagonal)
  Eigen::VectorXd P_cur;       // n_s
  Eigen::VectorXd theta_hat;   // n_orig, original-network angles
  double alpha = 0.0;
  int q = 1;
  double M = 0.0;
  int ref = 0;  // position in [0, n_s)
};

// MilpModel plus the variable-role tables needed to decode a solution.
struct OptiKronModel {
  MilpModel milp;
  int n_s = 0;
  int n_orig = 0;
  std::vector<int> s_var;          // n_s
  Eigen::MatrixXi a_var;           // n_s x n_s, -1 where not emitted
  std::vector<int> psi_var;        // n_s
  std::vector<int> theta_var;      // n_s
  std::vector<int> big_theta_var;  // n_orig
  Eigen::MatrixXi phi_var;         // n_s x n_orig, -1 where not emitted
  Eigen::MatrixXi x_var;           // n_s x n_orig, -1 where not emitted
  std::vector<int> mu_var;         // n_s
  std::vector<int> parent;         // n_orig -> active position (from omega_prev)
};

struct IterationResult {
  std::vector<int> s_new;       // 0/1 per active position
  Eigen::MatrixXi A;            // n_s x n_s
  std::vector<int> keep_rows;   // active positions with s=1, ascending
  Eigen::MatrixXi omega_new;    // |keep_rows| x n_orig
  double objective = 0.0;
  std::vector<double> mu;       // n_s
};

// M = min(max(2 max|theta_hat|, pi/6), pi/2).
double choose_big_m(const Eigen::VectorXd& theta_hat);

// Assemble the Big-M linearized model: binaries s and A (adjacency-allowed
// entries only), continuous Psi/theta (active), Theta (original), phi/X on
// the candidate-parent support, mu; power balance B Psi = A P; reference
// pinning via fixed bounds; cutting plane sum(s) >= n_s - q;
// objective sum(mu) - alpha sum(1 - s).
OptiKronModel build(const OptiKronInstance& inst);

IterationResult decode(const OptiKronModel& model,
                       const std::vector<double>& x);

// Recompute the bilinear forms directly from a solution and return the max
// violation of theta = diag(s) Psi, Theta_j = theta_parent(j),
// X_ij = omega_new_ij (theta_hat_j - Theta_j).
double bigm_replay_violation(const OptiKronInstance& inst,
                             const OptiKronModel& model,
                             const std::vector<double>& x);

}  // namespace kronopt
