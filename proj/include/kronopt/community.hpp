#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "kronopt/network.hpp"

namespace kronopt {

struct Partition {
  std::vector<int> labels;  // node -> community id, dense 0..k-1
  int k = 0;
  double q = 0.0;  // modularity on the matrix it was detected on
};

// Newman modularity on a symmetric non-negative weight matrix.
double modularity(const Eigen::MatrixXd& W, const std::vector<int>& labels);
double modularity(const Eigen::MatrixXi& adj, const std::vector<int>& labels);

// Clauset-Newman-Moore agglomeration on the unweighted adjacency. Natural
// variant stops at the modularity peak; the _k variant replays the merge
// sequence until exactly K groups remain (negative-gain merges allowed,
// adjacent pairs only, so groups stay connected).
Partition detect_greedy(const Eigen::MatrixXi& adj);
Partition detect_greedy_k(const Eigen::MatrixXi& adj, int K);

// Spectral clustering on the weighted Laplacian D - W with W = |B_ij|:
// embed in the k smallest eigenvectors, k-means++ (20 restarts, 300 iters),
// split disconnected label groups, keep the k in [k_min, k_max] with the
// best modularity. The _k variant evaluates a single k.
Partition detect_spectral(const Eigen::MatrixXd& B, int k_min, int k_max,
                          uint64_t seed);
Partition detect_spectral_k(const Eigen::MatrixXd& B, int k, uint64_t seed);

// Relabel so every community is a connected component of its induced graph.
Partition split_disconnected(const Eigen::MatrixXi& adj, const Partition& p);

struct CommunityProblem {
  std::vector<int> members;   // original internal indices, ascending
  Eigen::MatrixXd B;          // interior branches only
  Eigen::MatrixXi adj;        // adjacency of local B
  Eigen::VectorXd P;          // boundary-adjusted injections (sums to 0)
  Eigen::VectorXd theta_hat;  // full-network solution restricted to members
  int ref = 0;                // local index, pinned to theta_hat(ref)
};

// Decouple one community: interior branches only; each coupling node's
// injection is shifted by its outgoing tie-line flows (from the base-case
// solution), so the local DC solve reproduces theta_hat exactly. A community
// that falls apart without its tie-lines yields one problem per component.
std::vector<CommunityProblem> extract_subproblem(const Network& net,
                                                 const Eigen::MatrixXd& B,
                                                 const Partition& part,
                                                 int community_id,
                                                 const Eigen::VectorXd& theta_hat);

}  // namespace kronopt
