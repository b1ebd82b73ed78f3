#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "kronopt/community.hpp"
#include "kronopt/kron.hpp"
#include "kronopt/network.hpp"

namespace kronopt {

struct ReduceParams {
  double alpha = 0.0;
  int q = 1;
  std::string method = "none";  // none | greedy | spectral
  bool weighted = false;
  uint64_t seed = 0;
  int max_iters = 50;
  int jobs = 1;
  int k_min = 2;                // spectral search range
  int k_max = 12;
  long node_limit = 500000;
  double time_limit_s = 0.0;
  bool deterministic = false;
};

struct IterationLog {
  int community = 0;  // subproblem index in extraction order
  int iter = 0;       // 1-based within the community
  int eliminated = 0;
  double objective = 0.0;
  double ms = 0.0;
  bool optimal = true;
};

// Outcome of the per-community loop, in community-local indexing.
struct CommunityReduction {
  std::vector<int> members;  // global positions (copied from the problem)
  std::vector<int> keep;     // local indices into members, ascending
  Eigen::MatrixXi omega;     // keep.size() x members.size()
  std::vector<IterationLog> logs;
  bool optimal = true;
};

struct ReductionResult {
  std::vector<int> keep;      // global positions, ascending
  ClusterMap cmap;            // global position -> kept global position
  Eigen::MatrixXi omega;      // keep.size() x n
  Network reduced;
  Eigen::MatrixXd B_red;
  Eigen::VectorXd P_red;
  Eigen::VectorXd theta_hat;  // full base-case angles
  Partition partition;
  std::vector<IterationLog> logs;
  bool optimal = true;
};

// Algorithm 1 inner loop on one decoupled community.
CommunityReduction reduce_community(const CommunityProblem& problem,
                                    const ReduceParams& params);

// Full pipeline: base-case angles, community detection, per-community
// reduction (worker pool), merge, full-network Kron reconstruction.
ReductionResult run(const Network& net, const ReduceParams& params);

// Rebuild the reduced network for a given keep-set and aggregation.
ReductionResult reconstruct(const Network& net, const std::vector<int>& keep,
                            const Eigen::MatrixXi& omega_final);

std::string iteration_log_csv(const std::vector<IterationLog>& logs,
                              bool deterministic);

}  // namespace kronopt
