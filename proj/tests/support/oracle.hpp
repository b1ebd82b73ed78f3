#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "kronopt/milp.hpp"

namespace kronopt::testing {

struct OracleResult {
  bool feasible = false;
  double objective = 0.0;
  std::vector<int> s_best;
};

// Exhaustive reference solution of an OptiKronInstance: enumerate every
// keep-set s (ref kept, at most q eliminations) and every assignment of each
// eliminated node to a kept adjacent node, re-solve the DC system for Psi,
// apply the Big-M feasibility limits (|Psi| <= M, |theta_hat_j - Theta_j|
// <= M), and take the best objective sum(mu) + alpha (sum(s) - n_s).
OracleResult oracle_solve(const OptiKronInstance& inst);

// One representative edge list per isomorphism class of connected graphs on
// n labeled nodes (n <= 5 is practical).
std::vector<std::vector<std::pair<int, int>>> connected_graphs_up_to_iso(int n);

}  // namespace kronopt::testing
