#pragma once

#include <Eigen/Dense>
#include <string>
#include <unordered_map>
#include <vector>

namespace kronopt {

struct Bus {
  int id = 0;
  double injection_pu = 0.0;
  bool is_slack = false;
};

struct Branch {
  int from = 0;
  int to = 0;
  double x = 0.0;
};

// Validated transmission network. Buses are held sorted by id; all matrix-side
// code works with the dense 0-based index given by index_of().
class Network {
 public:
  Network() = default;  // empty placeholder; real instances come from factories
  static Network from_records(double base_mva, std::vector<Bus> buses,
                              std::vector<Branch> branches);
  static Network from_json_text(const std::string& text);

  double base_mva() const { return base_mva_; }
  int n() const { return static_cast<int>(buses_.size()); }
  const std::vector<Bus>& buses() const { return buses_; }
  const std::vector<Branch>& branches() const { return branches_; }
  int slack_index() const { return slack_index_; }
  int index_of(int bus_id) const;
  int id_of(int idx) const { return buses_[static_cast<size_t>(idx)].id; }

  Eigen::VectorXd injections() const;
  std::string to_json_text() const;

 private:
  double base_mva_ = 100.0;
  std::vector<Bus> buses_;
  std::vector<Branch> branches_;
  std::unordered_map<int, int> idx_;
  int slack_index_ = -1;
};

// Weighted-Laplacian susceptance matrix: B(i,i) = sum 1/x, B(i,j) = -sum 1/x
// over parallel branches i-j. Row sums are zero by construction.
Eigen::MatrixXd build_susceptance(const Network& net);

// 0/1 adjacency of the off-diagonal support of B (|B_ij| > tol), zero diagonal.
Eigen::MatrixXi adjacency_of(const Eigen::MatrixXd& B, double tol = 1e-9);

// matpower.cpp
Network parse_matpower(const std::string& text);

// Dispatch on extension: .m -> MATPOWER case, .json -> native format.
Network load_network(const std::string& path);

}  // namespace kronopt
