#pragma once

#include <vector>

#include "kronopt/model.hpp"

namespace kronopt {

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpSolution {
  LpStatus status = LpStatus::Infeasible;
  double objective = 0.0;        // includes the model's constant offset
  std::vector<double> x;         // structural variables only
  long iterations = 0;
};

// Solves the continuous relaxation (integrality dropped).
LpSolution solve_lp(const MilpModel& model);

struct MilpOptions {
  long node_limit = 500000;
  double time_limit_s = 0.0;     // <= 0 disables the clock
  bool deterministic = false;    // also implies the clock is ignored
};

enum class MilpStatus { Optimal, Infeasible, Unbounded, NodeLimit };

struct MilpSolution {
  MilpStatus status = MilpStatus::NodeLimit;
  double objective = 0.0;        // incumbent, offset included
  double best_bound = 0.0;       // proven lower bound
  std::vector<double> x;
  long nodes = 0;
  long lp_iterations = 0;
  double wall_s = 0.0;
};

// Best-first branch and bound over the model's binary variables with
// optimality gap zero.  Deterministic for fixed inputs.
MilpSolution solve_milp(const MilpModel& model, const MilpOptions& opt = {});

}  // namespace kronopt
