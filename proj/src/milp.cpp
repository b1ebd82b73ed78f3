#include "kronopt/milp.hpp"

#include <cmath>
#include <string>

#include "kronopt/errors.hpp"

namespace kronopt {

namespace {

constexpr double kPi = 3.14159265358979323846;

std::string nm(const char* base, int i) { return std::string(base) + "_" + std::to_string(i); }
std::string nm(const char* base, int i, int j) {
  return std::string(base) + "_" + std::to_string(i) + "_" + std::to_string(j);
}

void validate(const OptiKronInstance& inst) {
  const int ns = static_cast<int>(inst.active.size());
  const int no = static_cast<int>(inst.theta_hat.size());
  if (ns < 1) throw ValidationError("instance has no active nodes");
  if (inst.omega_prev.rows() != ns || inst.omega_prev.cols() != no)
    throw ValidationError("omega_prev dimension mismatch");
  if (inst.B_cur.rows() != ns || inst.B_cur.cols() != ns)
    throw ValidationError("B_cur dimension mismatch");
  if (inst.lambda_cur.rows() != ns || inst.lambda_cur.cols() != ns)
    throw ValidationError("lambda_cur dimension mismatch");
  if (inst.P_cur.size() != ns) throw ValidationError("P_cur dimension mismatch");
  if (inst.ref < 0 || inst.ref >= ns)
    throw ValidationError("reference position out of range");
  if (inst.q < 1) throw ValidationError("q must be a positive integer");
  if (inst.alpha < 0.0) throw ValidationError("alpha must be non-negative");
  if (!(inst.M >= kPi / 6 - 1e-12 && inst.M <= kPi / 2 + 1e-12))
    throw ValidationError("M outside [pi/6, pi/2]");
  for (int j = 0; j < no; ++j) {
    int sum = 0;
    for (int i = 0; i < ns; ++i) {
      int v = inst.omega_prev(i, j);
      if (v != 0 && v != 1) throw ValidationError("omega_prev must be binary");
      sum += v;
    }
    if (sum != 1)
      throw ValidationError("omega_prev column " + std::to_string(j) +
                            " does not sum to 1");
  }
  for (int i = 0; i < ns; ++i) {
    int a = inst.active[static_cast<size_t>(i)];
    if (a < 0 || a >= no)
      throw ValidationError("active index out of original range");
    if (inst.omega_prev(i, a) != 1)
      throw ValidationError("active node " + std::to_string(a) +
                            " is not its own super-node in omega_prev");
  }
}

}  // namespace

double choose_big_m(const Eigen::VectorXd& theta_hat) {
  double mx = theta_hat.size() ? theta_hat.cwiseAbs().maxCoeff() : 0.0;
  if (!std::isfinite(mx)) throw ValidationError("theta_hat is not finite");
  return std::min(std::max(2.0 * mx, kPi / 6), kPi / 2);
}

OptiKronModel build(const OptiKronInstance& inst) {
  validate(inst);
  const int ns = static_cast<int>(inst.active.size());
  const int no = static_cast<int>(inst.theta_hat.size());
  const double M = inst.M;

  OptiKronModel om;
  om.n_s = ns;
  om.n_orig = no;
  om.parent.assign(static_cast<size_t>(no), -1);
  for (int j = 0; j < no; ++j)
    for (int i = 0; i < ns; ++i)
      if (inst.omega_prev(i, j)) om.parent[static_cast<size_t>(j)] = i;

  MilpModel& mm = om.milp;
  mm.obj_offset = -inst.alpha * ns;

  om.s_var.resize(static_cast<size_t>(ns));
  for (int i = 0; i < ns; ++i) {
    double lo = (i == inst.ref) ? 1.0 : 0.0;
    om.s_var[static_cast<size_t>(i)] =
        mm.add_var(nm("s", i), VarKind::Binary, lo, 1.0, inst.alpha);
  }
  om.a_var = Eigen::MatrixXi::Constant(ns, ns, -1);
  for (int i = 0; i < ns; ++i)
    for (int j = 0; j < ns; ++j)
      if (i == j || inst.lambda_cur(i, j))
        om.a_var(i, j) = mm.add_var(nm("A", i, j), VarKind::Binary, 0.0, 1.0);

  om.psi_var.resize(static_cast<size_t>(ns));
  double pin = inst.theta_hat(inst.active[static_cast<size_t>(inst.ref)]);
  for (int i = 0; i < ns; ++i) {
    double lo = -kInf, hi = kInf;
    if (i == inst.ref) lo = hi = pin;
    om.psi_var[static_cast<size_t>(i)] =
        mm.add_var(nm("psi", i), VarKind::Continuous, lo, hi);
  }
  om.theta_var.resize(static_cast<size_t>(ns));
  for (int i = 0; i < ns; ++i)
    om.theta_var[static_cast<size_t>(i)] =
        mm.add_var(nm("theta", i), VarKind::Continuous, -M, M);
  om.big_theta_var.resize(static_cast<size_t>(no));
  for (int j = 0; j < no; ++j)
    om.big_theta_var[static_cast<size_t>(j)] =
        mm.add_var(nm("Theta", j), VarKind::Continuous, -M, M);

  // candidate parents of original node j: its current super-node p(j) and
  // the super-nodes adjacent to p(j); phi/X live on this support only
  om.phi_var = Eigen::MatrixXi::Constant(ns, no, -1);
  om.x_var = Eigen::MatrixXi::Constant(ns, no, -1);
  for (int j = 0; j < no; ++j) {
    int p = om.parent[static_cast<size_t>(j)];
    for (int i = 0; i < ns; ++i)
      if (i == p || inst.lambda_cur(i, p))
        om.phi_var(i, j) = mm.add_var(nm("phi", i, j), VarKind::Continuous, -M, M);
  }
  for (int j = 0; j < no; ++j) {
    int p = om.parent[static_cast<size_t>(j)];
    for (int i = 0; i < ns; ++i)
      if (i == p || inst.lambda_cur(i, p))
        om.x_var(i, j) = mm.add_var(nm("X", i, j), VarKind::Continuous, -M, M);
  }
  om.mu_var.resize(static_cast<size_t>(ns));
  for (int i = 0; i < ns; ++i)
    om.mu_var[static_cast<size_t>(i)] =
        mm.add_var(nm("mu", i), VarKind::Continuous, 0.0, kInf, 1.0);

  // branch on the selection variables before the aggregation ones
  mm.branch_priority.assign(static_cast<size_t>(mm.ncols()), 0);
  for (int i = 0; i < ns; ++i) mm.branch_priority[static_cast<size_t>(om.s_var[static_cast<size_t>(i)])] = 1;

  // theta_i = s_i * psi_i, Big-M
  for (int i = 0; i < ns; ++i) {
    int th = om.theta_var[static_cast<size_t>(i)];
    int ps = om.psi_var[static_cast<size_t>(i)];
    int sv = om.s_var[static_cast<size_t>(i)];
    mm.add_row(nm("thub1", i), {{th, 1.0}, {ps, -1.0}, {sv, M}}, Sense::LE, M);
    mm.add_row(nm("thub2", i), {{th, 1.0}, {sv, -M}}, Sense::LE, 0.0);
    mm.add_row(nm("thlb1", i), {{th, 1.0}, {ps, -1.0}, {sv, -M}}, Sense::GE, -M);
    mm.add_row(nm("thlb2", i), {{th, 1.0}, {sv, M}}, Sense::GE, 0.0);
  }
  // B psi = A P
  for (int i = 0; i < ns; ++i) {
    std::vector<LinTerm> t;
    for (int k = 0; k < ns; ++k)
      if (inst.B_cur(i, k) != 0.0)
        t.push_back({om.psi_var[static_cast<size_t>(k)], inst.B_cur(i, k)});
    for (int j = 0; j < ns; ++j)
      if (om.a_var(i, j) >= 0 && inst.P_cur(j) != 0.0)
        t.push_back({om.a_var(i, j), -inst.P_cur(j)});
    mm.add_row(nm("bal", i), std::move(t), Sense::EQ, 0.0);
  }
  // each previously-active column assigned exactly once
  for (int j = 0; j < ns; ++j) {
    std::vector<LinTerm> t;
    for (int i = 0; i < ns; ++i)
      if (om.a_var(i, j) >= 0) t.push_back({om.a_var(i, j), 1.0});
    mm.add_row(nm("asum", j), std::move(t), Sense::EQ, 1.0);
  }
  for (int i = 0; i < ns; ++i)
    mm.add_row(nm("adiag", i),
               {{om.a_var(i, i), 1.0}, {om.s_var[static_cast<size_t>(i)], -1.0}},
               Sense::EQ, 0.0);
  for (int i = 0; i < ns; ++i)
    for (int j = 0; j < ns; ++j)
      if (i != j && om.a_var(i, j) >= 0)
        mm.add_row(nm("alink", i, j),
                   {{om.a_var(i, j), 1.0}, {om.s_var[static_cast<size_t>(i)], -1.0}},
                   Sense::LE, 0.0);

  // phi_ij = omega_ij * theta_i with omega_ij == A_{i, p(j)}
  for (int j = 0; j < no; ++j) {
    int p = om.parent[static_cast<size_t>(j)];
    for (int i = 0; i < ns; ++i) {
      int ph = om.phi_var(i, j);
      if (ph < 0) continue;
      int w = om.a_var(i, p);
      int th = om.theta_var[static_cast<size_t>(i)];
      mm.add_row(nm("phub1", i, j), {{ph, 1.0}, {th, -1.0}, {w, M}}, Sense::LE, M);
      mm.add_row(nm("phub2", i, j), {{ph, 1.0}, {w, -M}}, Sense::LE, 0.0);
      mm.add_row(nm("phlb1", i, j), {{ph, 1.0}, {th, -1.0}, {w, -M}}, Sense::GE, -M);
      mm.add_row(nm("phlb2", i, j), {{ph, 1.0}, {w, M}}, Sense::GE, 0.0);
    }
  }
  // Theta_j = sum_i phi_ij
  for (int j = 0; j < no; ++j) {
    std::vector<LinTerm> t{{om.big_theta_var[static_cast<size_t>(j)], 1.0}};
    for (int i = 0; i < ns; ++i)
      if (om.phi_var(i, j) >= 0) t.push_back({om.phi_var(i, j), -1.0});
    mm.add_row(nm("Th", j), std::move(t), Sense::EQ, 0.0);
  }
  // X_ij = omega_ij * (theta_hat_j - Theta_j)
  for (int j = 0; j < no; ++j) {
    int p = om.parent[static_cast<size_t>(j)];
    double th_hat = inst.theta_hat(j);
    int Th = om.big_theta_var[static_cast<size_t>(j)];
    for (int i = 0; i < ns; ++i) {
      int xv = om.x_var(i, j);
      if (xv < 0) continue;
      int w = om.a_var(i, p);
      mm.add_row(nm("xub1", i, j), {{xv, 1.0}, {Th, 1.0}, {w, M}}, Sense::LE,
                 M + th_hat);
      mm.add_row(nm("xub2", i, j), {{xv, 1.0}, {w, -M}}, Sense::LE, 0.0);
      mm.add_row(nm("xlb1", i, j), {{xv, 1.0}, {Th, 1.0}, {w, -M}}, Sense::GE,
                 -M + th_hat);
      mm.add_row(nm("xlb2", i, j), {{xv, 1.0}, {w, M}}, Sense::GE, 0.0);
    }
  }
  // -mu_i <= X_ij <= mu_i
  for (int j = 0; j < no; ++j)
    for (int i = 0; i < ns; ++i) {
      int xv = om.x_var(i, j);
      if (xv < 0) continue;
      int mu = om.mu_var[static_cast<size_t>(i)];
      mm.add_row(nm("muub", i, j), {{xv, 1.0}, {mu, -1.0}}, Sense::LE, 0.0);
      mm.add_row(nm("mulb", i, j), {{xv, 1.0}, {mu, 1.0}}, Sense::GE, 0.0);
    }
  // cutting plane
  {
    std::vector<LinTerm> t;
    for (int i = 0; i < ns; ++i) t.push_back({om.s_var[static_cast<size_t>(i)], 1.0});
    mm.add_row("cut", std::move(t), Sense::GE, static_cast<double>(ns - inst.q));
  }
  return om;
}

IterationResult decode(const OptiKronModel& model, const std::vector<double>& x) {
  const int ns = model.n_s;
  const int no = model.n_orig;
  if (static_cast<int>(x.size()) != model.milp.ncols())
    throw SolveError("decode: assignment size mismatch");

  auto bin = [&](int col) {
    double v = x[static_cast<size_t>(col)];
    if (v < -1e-6 || v > 1.0 + 1e-6)
      throw SolveError("decode: binary variable out of range");
    return v > 0.5 ? 1 : 0;
  };

  IterationResult res;
  res.s_new.resize(static_cast<size_t>(ns));
  for (int i = 0; i < ns; ++i)
    res.s_new[static_cast<size_t>(i)] = bin(model.s_var[static_cast<size_t>(i)]);
  res.A = Eigen::MatrixXi::Zero(ns, ns);
  for (int i = 0; i < ns; ++i)
    for (int j = 0; j < ns; ++j)
      if (model.a_var(i, j) >= 0) res.A(i, j) = bin(model.a_var(i, j));

  for (int i = 0; i < ns; ++i) {
    if (res.A(i, i) != res.s_new[static_cast<size_t>(i)])
      throw SolveError("decode: A diagonal disagrees with s");
    for (int j = 0; j < ns; ++j)
      if (res.A(i, j) > res.s_new[static_cast<size_t>(i)])
        throw SolveError("decode: assignment to an eliminated node");
  }
  for (int j = 0; j < ns; ++j) {
    int sum = 0;
    for (int i = 0; i < ns; ++i) sum += res.A(i, j);
    if (sum != 1) throw SolveError("decode: column " + std::to_string(j) +
                                   " not assigned exactly once");
  }

  for (int i = 0; i < ns; ++i)
    if (res.s_new[static_cast<size_t>(i)]) res.keep_rows.push_back(i);
  if (res.keep_rows.empty()) throw SolveError("decode: every node eliminated");

  res.omega_new = Eigen::MatrixXi::Zero(static_cast<int>(res.keep_rows.size()), no);
  for (size_t r = 0; r < res.keep_rows.size(); ++r) {
    int i = res.keep_rows[r];
    for (int j = 0; j < no; ++j)
      res.omega_new(static_cast<int>(r), j) = res.A(i, model.parent[static_cast<size_t>(j)]);
  }
  for (int j = 0; j < no; ++j) {
    int sum = 0;
    for (int r = 0; r < res.omega_new.rows(); ++r) sum += res.omega_new(r, j);
    if (sum != 1)
      throw SolveError("decode: omega column " + std::to_string(j) +
                       " not assigned exactly once");
  }

  res.objective = model.milp.obj_offset;
  for (int c = 0; c < model.milp.ncols(); ++c)
    res.objective += model.milp.obj[static_cast<size_t>(c)] * x[static_cast<size_t>(c)];
  res.mu.resize(static_cast<size_t>(ns));
  for (int i = 0; i < ns; ++i)
    res.mu[static_cast<size_t>(i)] = x[static_cast<size_t>(model.mu_var[static_cast<size_t>(i)])];
  return res;
}

double bigm_replay_violation(const OptiKronInstance& inst,
                             const OptiKronModel& model,
                             const std::vector<double>& x) {
  IterationResult r = decode(model, x);
  const int ns = model.n_s;
  const int no = model.n_orig;
  double viol = 0.0;
  for (int i = 0; i < ns; ++i) {
    double psi = x[static_cast<size_t>(model.psi_var[static_cast<size_t>(i)])];
    double th = x[static_cast<size_t>(model.theta_var[static_cast<size_t>(i)])];
    viol = std::max(viol, std::abs(th - r.s_new[static_cast<size_t>(i)] * psi));
  }
  for (int j = 0; j < no; ++j) {
    int p = model.parent[static_cast<size_t>(j)];
    int pnew = -1;
    for (int i = 0; i < ns; ++i)
      if (r.A(i, p)) pnew = i;
    if (pnew < 0) throw SolveError("replay: unassigned super-node");
    double Th = x[static_cast<size_t>(model.big_theta_var[static_cast<size_t>(j)])];
    double th_p = x[static_cast<size_t>(model.theta_var[static_cast<size_t>(pnew)])];
    viol = std::max(viol, std::abs(Th - th_p));
    for (int i = 0; i < ns; ++i) {
      int xv = model.x_var(i, j);
      if (xv < 0) continue;
      double omega_new = (i == pnew) ? 1.0 : 0.0;
      double want = omega_new * (inst.theta_hat(j) - Th);
      viol = std::max(viol, std::abs(x[static_cast<size_t>(xv)] - want));
    }
  }
  return viol;
}

}  // namespace kronopt
