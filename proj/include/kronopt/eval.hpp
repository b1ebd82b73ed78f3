#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "kronopt/driver.hpp"
#include "kronopt/network.hpp"

namespace kronopt {

// Per-cluster Maximum Intra-Cluster Error in radians. The reduced network is
// re-solved with its slack pinned to theta_hat at the original slack's
// representative; cluster c's error is max |theta_hat_j - Theta_c| over its
// original members j.
std::vector<double> mice(const Network& orig, const Network& reduced,
                         const Eigen::MatrixXi& omega_final,
                         const Eigen::VectorXd& theta_hat);

struct BaselineResult {
  Network reduced;
  Eigen::MatrixXi omega;      // k x n
  std::vector<int> centers;   // global positions, ascending
  Partition partition;
};

// CD baseline: communities collapse onto central nodes, inter-community
// branches survive (parallel ties between a community pair merged by
// susceptance summation).
BaselineResult baseline_cd(const Network& net, int K, bool weighted,
                           uint64_t seed);

// CD + Kron baseline: same centers, network = Kron reduction onto them.
BaselineResult baseline_cd_kron(const Network& net, int K, bool weighted,
                                uint64_t seed);

struct ReductionReport {
  std::string method;
  double level = 0.0;              // 1 - K/n
  std::string scenario;            // load multiplier, formatted
  std::vector<int> cluster_ids;    // external bus id of each super-node
  std::vector<double> mice_rad;
  std::vector<bool> outlier;       // > 3x the report's median
  double wall_s = 0.0;
};

struct CompareParams {
  std::vector<double> alphas;           // one Opti-KRON run per alpha
  std::vector<double> multipliers{1.0};  // loading scenarios
  ReduceParams reduce;                   // q, method, weighted, seed, ...
};

// Full study: per scenario re-solve the base case, run Opti-KRON per alpha,
// then both baselines at the same super-node count.
std::vector<ReductionReport> compare(const Network& net,
                                     const CompareParams& params);

ReductionReport make_report(const std::string& method, double level,
                            const std::string& scenario,
                            std::vector<int> cluster_ids,
                            std::vector<double> mice_rad, double wall_s);

std::string report_csv(const std::vector<ReductionReport>& reports);
std::string summary_json(const std::vector<ReductionReport>& reports,
                         bool deterministic);

}  // namespace kronopt
