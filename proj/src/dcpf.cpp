#include "kronopt/dcpf.hpp"

#include <cmath>

#include "kronopt/errors.hpp"
#include "kronopt/log.hpp"

namespace kronopt {

Eigen::VectorXd solve_dc(const Eigen::MatrixXd& B, Eigen::VectorXd P, int ref,
                         double theta_ref) {
  const int n = static_cast<int>(B.rows());
  if (B.cols() != n || P.size() != n)
    throw ValidationError("solve_dc: dimension mismatch");
  if (ref < 0 || ref >= n) throw ValidationError("solve_dc: ref out of range");

  double imbalance = P.sum();
  if (std::abs(imbalance) > 1e-2)
    throw ValidationError("injection imbalance " + std::to_string(imbalance) +
                          " pu exceeds 1e-2");
  if (std::abs(imbalance) > 1e-6)
    log_warn("injection imbalance %.3e pu absorbed at reference", imbalance);
  P(ref) -= imbalance;

  if (n == 1) {
    Eigen::VectorXd theta(1);
    theta(0) = theta_ref;
    return theta;
  }

  std::vector<int> rest;
  rest.reserve(static_cast<size_t>(n) - 1);
  for (int i = 0; i < n; ++i)
    if (i != ref) rest.push_back(i);

  Eigen::MatrixXd Brr(n - 1, n - 1);
  Eigen::VectorXd Pr(n - 1);
  for (int i = 0; i < n - 1; ++i) {
    Pr(i) = P(rest[static_cast<size_t>(i)]);
    for (int j = 0; j < n - 1; ++j)
      Brr(i, j) = B(rest[static_cast<size_t>(i)], rest[static_cast<size_t>(j)]);
  }
  // theta_r solves Brr*theta_r = Pr - B(rest,ref)*theta_ref
  if (theta_ref != 0.0)
    for (int i = 0; i < n - 1; ++i)
      Pr(i) -= B(rest[static_cast<size_t>(i)], ref) * theta_ref;

  Eigen::PartialPivLU<Eigen::MatrixXd> lu(Brr);
  Eigen::VectorXd tr = lu.solve(Pr);
  double resid = (Brr * tr - Pr).lpNorm<Eigen::Infinity>();
  double scale = std::max(1.0, Pr.lpNorm<Eigen::Infinity>());
  if (!tr.allFinite() || resid > 1e-6 * scale)
    throw SolveError("singular susceptance system (residual " +
                     std::to_string(resid) + ")");

  Eigen::VectorXd theta(n);
  theta(ref) = theta_ref;
  for (int i = 0; i < n - 1; ++i) theta(rest[static_cast<size_t>(i)]) = tr(i);
  return theta;
}

Eigen::VectorXd solve_dc(const Network& net) {
  return solve_dc(build_susceptance(net), net.injections(), net.slack_index(),
                  0.0);
}

std::vector<double> branch_flows(const Network& net,
                                 const Eigen::VectorXd& theta) {
  if (theta.size() != net.n())
    throw ValidationError("branch_flows: theta size mismatch");
  std::vector<double> flows;
  flows.reserve(net.branches().size());
  for (const Branch& br : net.branches()) {
    int a = net.index_of(br.from), b = net.index_of(br.to);
    flows.push_back((theta(a) - theta(b)) / br.x);
  }
  return flows;
}

}  // namespace kronopt
