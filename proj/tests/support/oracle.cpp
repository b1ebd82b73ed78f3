#include "support/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

#include "kronopt/dcpf.hpp"
#include "kronopt/errors.hpp"

namespace kronopt::testing {

namespace {

constexpr double kTol = 1e-9;

// Objective of one fully specified (s, assign) support, or +inf if it
// violates a Big-M limit. assign[j] is the kept active position absorbing
// eliminated j (or j itself when kept).
double support_objective(const OptiKronInstance& inst,
                         const std::vector<int>& s,
                         const std::vector<int>& assign,
                         const std::vector<int>& parent) {
  const int n_s = static_cast<int>(inst.active.size());
  const int n_orig = static_cast<int>(inst.omega_prev.cols());

  Eigen::VectorXd P_agg = Eigen::VectorXd::Zero(n_s);
  for (int j = 0; j < n_s; ++j) P_agg(assign[j]) += inst.P_cur(j);

  Eigen::VectorXd psi =
      solve_dc(inst.B_cur, P_agg, inst.ref, inst.theta_hat(inst.active[inst.ref]));
  if (psi.cwiseAbs().maxCoeff() > inst.M + kTol)
    return std::numeric_limits<double>::infinity();

  std::vector<double> mu(static_cast<size_t>(n_s), 0.0);
  for (int j = 0; j < n_orig; ++j) {
    int rep = assign[parent[j]];  // kept node whose angle stands in for j
    double err = std::abs(inst.theta_hat(j) - psi(rep));
    if (err > inst.M + kTol) return std::numeric_limits<double>::infinity();
    mu[static_cast<size_t>(rep)] = std::max(mu[static_cast<size_t>(rep)], err);
  }

  double obj = std::accumulate(mu.begin(), mu.end(), 0.0);
  for (int i = 0; i < n_s; ++i) obj += inst.alpha * s[static_cast<size_t>(i)];
  return obj - inst.alpha * n_s;
}

void search_assignments(const OptiKronInstance& inst, const std::vector<int>& s,
                        const std::vector<std::vector<int>>& options,
                        const std::vector<int>& elim, size_t pos,
                        std::vector<int>& assign, const std::vector<int>& parent,
                        double& best, bool& any) {
  if (pos == elim.size()) {
    double obj = support_objective(inst, s, assign, parent);
    if (std::isfinite(obj)) {
      any = true;
      best = std::min(best, obj);
    }
    return;
  }
  int j = elim[pos];
  for (int i : options[static_cast<size_t>(j)]) {
    assign[static_cast<size_t>(j)] = i;
    search_assignments(inst, s, options, elim, pos + 1, assign, parent, best, any);
  }
}

}  // namespace

OracleResult oracle_solve(const OptiKronInstance& inst) {
  const int n_s = static_cast<int>(inst.active.size());
  const int n_orig = static_cast<int>(inst.omega_prev.cols());

  std::vector<int> parent(static_cast<size_t>(n_orig), -1);
  for (int j = 0; j < n_orig; ++j)
    for (int i = 0; i < n_s; ++i)
      if (inst.omega_prev(i, j) == 1) parent[static_cast<size_t>(j)] = i;

  OracleResult out;
  double best_all = std::numeric_limits<double>::infinity();

  for (unsigned mask = 0; mask < (1u << n_s); ++mask) {
    std::vector<int> s(static_cast<size_t>(n_s));
    int kept = 0;
    for (int i = 0; i < n_s; ++i) {
      s[static_cast<size_t>(i)] = (mask >> i) & 1u;
      kept += s[static_cast<size_t>(i)];
    }
    if (!s[static_cast<size_t>(inst.ref)]) continue;
    if (n_s - kept > inst.q) continue;

    std::vector<std::vector<int>> options(static_cast<size_t>(n_s));
    std::vector<int> elim;
    std::vector<int> assign(static_cast<size_t>(n_s));
    bool stuck = false;
    for (int j = 0; j < n_s; ++j) {
      if (s[static_cast<size_t>(j)]) {
        assign[static_cast<size_t>(j)] = j;
        continue;
      }
      elim.push_back(j);
      for (int i = 0; i < n_s; ++i)
        if (s[static_cast<size_t>(i)] && inst.lambda_cur(i, j) == 1)
          options[static_cast<size_t>(j)].push_back(i);
      if (options[static_cast<size_t>(j)].empty()) stuck = true;
    }
    if (stuck) continue;

    double best_here = std::numeric_limits<double>::infinity();
    bool any = false;
    search_assignments(inst, s, options, elim, 0, assign, parent, best_here, any);
    if (any && best_here < best_all - 1e-15) {
      best_all = best_here;
      out.s_best = s;
    }
  }

  out.feasible = std::isfinite(best_all);
  out.objective = out.feasible ? best_all : 0.0;
  return out;
}

std::vector<std::vector<std::pair<int, int>>> connected_graphs_up_to_iso(int n) {
  std::vector<std::pair<int, int>> slots;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) slots.push_back({i, j});
  const int ne = static_cast<int>(slots.size());

  std::vector<int> perm(static_cast<size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<std::vector<int>> perms;
  do {
    perms.push_back(perm);
  } while (std::next_permutation(perm.begin(), perm.end()));

  // slot index lookup for the canonical-form relabeling
  std::vector<std::vector<int>> slot_of(static_cast<size_t>(n),
                                        std::vector<int>(static_cast<size_t>(n), -1));
  for (int e = 0; e < ne; ++e) {
    slot_of[static_cast<size_t>(slots[static_cast<size_t>(e)].first)]
           [static_cast<size_t>(slots[static_cast<size_t>(e)].second)] = e;
    slot_of[static_cast<size_t>(slots[static_cast<size_t>(e)].second)]
           [static_cast<size_t>(slots[static_cast<size_t>(e)].first)] = e;
  }

  std::set<unsigned> seen;
  std::vector<std::vector<std::pair<int, int>>> out;
  for (unsigned mask = 0; mask < (1u << ne); ++mask) {
    // connectivity
    std::vector<std::vector<int>> nbr(static_cast<size_t>(n));
    for (int e = 0; e < ne; ++e)
      if ((mask >> e) & 1u) {
        nbr[static_cast<size_t>(slots[static_cast<size_t>(e)].first)].push_back(
            slots[static_cast<size_t>(e)].second);
        nbr[static_cast<size_t>(slots[static_cast<size_t>(e)].second)].push_back(
            slots[static_cast<size_t>(e)].first);
      }
    std::vector<bool> vis(static_cast<size_t>(n), false);
    std::vector<int> stack = {0};
    vis[0] = true;
    int cnt = 1;
    while (!stack.empty()) {
      int u = stack.back();
      stack.pop_back();
      for (int v : nbr[static_cast<size_t>(u)])
        if (!vis[static_cast<size_t>(v)]) {
          vis[static_cast<size_t>(v)] = true;
          ++cnt;
          stack.push_back(v);
        }
    }
    if (cnt != n) continue;

    unsigned canon = mask;
    for (const auto& p : perms) {
      unsigned m2 = 0;
      for (int e = 0; e < ne; ++e)
        if ((mask >> e) & 1u) {
          int a = p[static_cast<size_t>(slots[static_cast<size_t>(e)].first)];
          int b = p[static_cast<size_t>(slots[static_cast<size_t>(e)].second)];
          m2 |= 1u << slot_of[static_cast<size_t>(a)][static_cast<size_t>(b)];
        }
      canon = std::min(canon, m2);
    }
    if (!seen.insert(canon).second) continue;

    std::vector<std::pair<int, int>> edges;
    for (int e = 0; e < ne; ++e)
      if ((canon >> e) & 1u) edges.push_back(slots[static_cast<size_t>(e)]);
    out.push_back(edges);
  }
  return out;
}

}  // namespace kronopt::testing
