#include "kronopt/driver.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "kronopt/dcpf.hpp"
#include "kronopt/errors.hpp"
#include "kronopt/kron.hpp"
#include "kronopt/log.hpp"
#include "kronopt/milp.hpp"
#include "kronopt/solver.hpp"
#include "kronopt/textio.hpp"

namespace kronopt {

CommunityReduction reduce_community(const CommunityProblem& problem,
                                    const ReduceParams& params) {
  const int n_loc = static_cast<int>(problem.members.size());
  if (params.q < 1) throw ValidationError("q must be >= 1");

  CommunityReduction out;
  out.members = problem.members;

  std::vector<int> active(static_cast<size_t>(n_loc));
  for (int i = 0; i < n_loc; ++i) active[static_cast<size_t>(i)] = i;
  Eigen::MatrixXi omega = Eigen::MatrixXi::Identity(n_loc, n_loc);
  Eigen::MatrixXd B_cur = problem.B;
  Eigen::MatrixXi lambda = problem.adj;
  Eigen::VectorXd P_cur = problem.P;
  int ref = problem.ref;  // position within `active`
  const double M = choose_big_m(problem.theta_hat);

  MilpOptions mopt;
  mopt.node_limit = params.node_limit;
  mopt.time_limit_s = params.time_limit_s;
  mopt.deterministic = params.deterministic;

  for (int iter = 1; iter <= params.max_iters; ++iter) {
    OptiKronInstance inst;
    inst.active = active;
    inst.omega_prev = omega;
    inst.B_cur = B_cur;
    inst.lambda_cur = lambda;
    inst.P_cur = P_cur;
    inst.theta_hat = problem.theta_hat;
    inst.alpha = params.alpha;
    inst.q = std::min(params.q, static_cast<int>(active.size()));
    inst.ref = ref;
    inst.M = M;

    OptiKronModel om = build(inst);
    MilpSolution sol = solve_milp(om.milp, mopt);
    if (sol.status == MilpStatus::Infeasible ||
        sol.status == MilpStatus::Unbounded)
      throw SolveError("community MILP infeasible at iteration " +
                       std::to_string(iter));
    if (sol.status == MilpStatus::NodeLimit && sol.x.empty()) {
      out.optimal = false;
      log_warn("node limit hit with no incumbent; keeping current state");
      break;
    }

    IterationResult res = decode(om, sol.x);
    int eliminated = static_cast<int>(active.size() - res.keep_rows.size());
    out.logs.push_back({0, iter, eliminated, res.objective, sol.wall_s * 1e3,
                        sol.status == MilpStatus::Optimal});
    if (sol.status != MilpStatus::Optimal) {
      out.optimal = false;
      log_warn("node limit hit; community result flagged non-optimal");
      break;
    }
    if (eliminated == 0) break;

    std::vector<int> next_active;
    for (int r : res.keep_rows)
      next_active.push_back(active[static_cast<size_t>(r)]);
    Eigen::VectorXd P_next(static_cast<int>(res.keep_rows.size()));
    for (size_t r = 0; r < res.keep_rows.size(); ++r) {
      double s = 0.0;
      for (int j = 0; j < static_cast<int>(active.size()); ++j)
        if (res.A(res.keep_rows[r], j)) s += P_cur(j);
      P_next(static_cast<int>(r)) = s;
    }
    B_cur = kron_reduce(B_cur, res.keep_rows);
    lambda = adjacency_of(B_cur);
    omega = res.omega_new;
    int new_ref = -1;
    for (size_t r = 0; r < res.keep_rows.size(); ++r)
      if (res.keep_rows[r] == ref) new_ref = static_cast<int>(r);
    if (new_ref < 0) throw SolveError("reference eliminated");  // cannot happen
    ref = new_ref;
    active = std::move(next_active);
    P_cur = std::move(P_next);
    if (iter == params.max_iters)
      log_warn("max_iters reached before a zero-elimination iteration");
  }

  out.keep = active;
  out.omega = omega;
  return out;
}

namespace {

ReductionResult assemble(const Network& net, const Eigen::MatrixXd& B,
                         const Eigen::VectorXd& theta_hat, ClusterMap cmap) {
  const int n = net.n();
  ReductionResult out;
  out.theta_hat = theta_hat;
  out.cmap = std::move(cmap);
  for (int j = 0; j < n; ++j)
    if (out.cmap[static_cast<size_t>(j)] == j) out.keep.push_back(j);
  out.omega = Eigen::MatrixXi::Zero(static_cast<int>(out.keep.size()), n);
  for (int j = 0; j < n; ++j) {
    auto it = std::lower_bound(out.keep.begin(), out.keep.end(),
                               out.cmap[static_cast<size_t>(j)]);
    if (it == out.keep.end() || *it != out.cmap[static_cast<size_t>(j)])
      throw ValidationError("aggregation maps onto an eliminated node");
    out.omega(static_cast<int>(it - out.keep.begin()), j) = 1;
  }
  out.B_red = kron_reduce(B, out.keep);
  out.P_red = aggregate_injections(net.injections(), out.cmap, out.keep);
  int slack_rep = out.cmap[static_cast<size_t>(net.slack_index())];
  auto it = std::lower_bound(out.keep.begin(), out.keep.end(), slack_rep);
  out.reduced = reduced_network(net, out.keep, out.B_red, out.P_red,
                                static_cast<int>(it - out.keep.begin()));
  return out;
}

}  // namespace

ReductionResult run(const Network& net_in, const ReduceParams& params) {
  // Fold any net injection imbalance into the slack up front (the same
  // adjustment solve_dc applies), so community subproblems balance exactly.
  Network net = net_in;
  double imbalance = net_in.injections().sum();
  if (std::abs(imbalance) > 1e-12) {
    std::vector<Bus> buses = net_in.buses();
    buses[static_cast<size_t>(net_in.slack_index())].injection_pu -= imbalance;
    net = Network::from_records(net_in.base_mva(), std::move(buses), net_in.branches());
  }

  const int n = net.n();
  Eigen::MatrixXd B = build_susceptance(net);
  Eigen::VectorXd theta_hat = solve_dc(net);

  Partition part;
  if (params.method == "none") {
    part.labels.assign(static_cast<size_t>(n), 0);
    part.k = 1;
  } else if (params.method == "greedy") {
    part = detect_greedy(adjacency_of(B));
  } else if (params.method == "spectral") {
    part = detect_spectral(B, params.k_min, params.k_max, params.seed);
  } else {
    throw ValidationError("unknown method '" + params.method + "'");
  }

  std::vector<CommunityProblem> problems;
  for (int c = 0; c < part.k; ++c) {
    auto sub = extract_subproblem(net, B, part, c, theta_hat);
    for (auto& p : sub) problems.push_back(std::move(p));
  }
  // the slack's community must use the slack itself as its reference
  int slack = net.slack_index();
  for (auto& p : problems)
    for (size_t i = 0; i < p.members.size(); ++i)
      if (p.members[i] == slack) p.ref = static_cast<int>(i);

  std::vector<CommunityReduction> results(problems.size());
  std::vector<std::string> failures(problems.size());
  int jobs = std::max(1, params.jobs);
  if (jobs == 1) {
    for (size_t i = 0; i < problems.size(); ++i) {
      try {
        results[i] = reduce_community(problems[i], params);
      } catch (const std::exception& e) {
        failures[i] = e.what();
      }
    }
  } else {
    std::atomic<size_t> next{0};
    auto worker = [&]() {
      for (;;) {
        size_t i = next.fetch_add(1);
        if (i >= problems.size()) return;
        try {
          results[i] = reduce_community(problems[i], params);
        } catch (const std::exception& e) {
          failures[i] = e.what();
        }
      }
    };
    std::vector<std::thread> pool;
    size_t nthreads = std::min(static_cast<size_t>(jobs), problems.size());
    for (size_t t = 0; t < nthreads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (size_t i = 0; i < problems.size(); ++i)
    if (!failures[i].empty())
      throw SolveError("community " + std::to_string(i) + ": " + failures[i]);

  ClusterMap cmap(static_cast<size_t>(n), -1);
  std::vector<IterationLog> logs;
  bool optimal = true;
  for (size_t i = 0; i < results.size(); ++i) {
    const CommunityReduction& r = results[i];
    optimal = optimal && r.optimal;
    for (int col = 0; col < r.omega.cols(); ++col) {
      int row = -1;
      for (int k = 0; k < r.omega.rows(); ++k)
        if (r.omega(k, col)) row = k;
      cmap[static_cast<size_t>(r.members[static_cast<size_t>(col)])] =
          r.members[static_cast<size_t>(r.keep[static_cast<size_t>(row)])];
    }
    for (IterationLog l : r.logs) {
      l.community = static_cast<int>(i);
      logs.push_back(l);
    }
  }

  ReductionResult out = assemble(net, B, theta_hat, std::move(cmap));
  out.partition = std::move(part);
  out.logs = std::move(logs);
  out.optimal = optimal;
  return out;
}

ReductionResult reconstruct(const Network& net, const std::vector<int>& keep,
                            const Eigen::MatrixXi& omega_final) {
  const int n = net.n();
  if (keep.empty()) throw ValidationError("empty keep-set");
  if (omega_final.rows() != static_cast<int>(keep.size()) ||
      omega_final.cols() != n)
    throw ValidationError("omega dimensions inconsistent with keep-set");
  ClusterMap cmap(static_cast<size_t>(n), -1);
  for (int j = 0; j < n; ++j) {
    int cnt = 0;
    for (int r = 0; r < omega_final.rows(); ++r)
      if (omega_final(r, j)) {
        cmap[static_cast<size_t>(j)] = keep[static_cast<size_t>(r)];
        ++cnt;
      }
    if (cnt != 1)
      throw ValidationError("omega column " + std::to_string(j) +
                            " does not sum to 1");
  }
  for (int r = 0; r < static_cast<int>(keep.size()); ++r)
    if (cmap[static_cast<size_t>(keep[static_cast<size_t>(r)])] !=
        keep[static_cast<size_t>(r)])
      throw ValidationError("kept node is not its own super-node");
  Eigen::MatrixXd B = build_susceptance(net);
  Eigen::VectorXd theta_hat = solve_dc(net);
  return assemble(net, B, theta_hat, std::move(cmap));
}

std::string iteration_log_csv(const std::vector<IterationLog>& logs,
                              bool deterministic) {
  std::string out = "community,iter,eliminated,objective,ms\n";
  for (const IterationLog& l : logs) {
    out += std::to_string(l.community) + "," + std::to_string(l.iter) + "," +
           std::to_string(l.eliminated) + "," + fmt_double(l.objective) + "," +
           fmt_double(deterministic ? 0.0 : l.ms) + "\n";
  }
  return out;
}

}  // namespace kronopt
