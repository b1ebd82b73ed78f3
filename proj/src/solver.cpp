#include "kronopt/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <memory>
#include <queue>

#include "kronopt/errors.hpp"
#include "kronopt/log.hpp"
#include "kronopt/simplex.hpp"

namespace kronopt {

namespace {

constexpr double kIntTol = 1e-6;
constexpr double kPruneGap = 1e-9;

lp::Problem to_lp(const MilpModel& model) {
  const int n = model.ncols();
  const int m = model.nrows();
  lp::Problem p;
  p.n = n;
  p.m = m;
  p.c.resize(static_cast<size_t>(n + m), 0.0);
  for (int j = 0; j < n; ++j) p.c[static_cast<size_t>(j)] = model.obj[static_cast<size_t>(j)];
  p.lo.resize(static_cast<size_t>(n + m));
  p.hi.resize(static_cast<size_t>(n + m));
  for (int j = 0; j < n; ++j) {
    p.lo[static_cast<size_t>(j)] = model.vars[static_cast<size_t>(j)].lo;
    p.hi[static_cast<size_t>(j)] = model.vars[static_cast<size_t>(j)].hi;
  }
  for (int i = 0; i < m; ++i) {
    const Row& r = model.rows[static_cast<size_t>(i)];
    double lo, hi;
    switch (r.sense) {
      case Sense::LE: lo = -kInf; hi = r.rhs; break;
      case Sense::GE: lo = r.rhs; hi = kInf; break;
      default:        lo = r.rhs; hi = r.rhs; break;
    }
    p.lo[static_cast<size_t>(n + i)] = lo;
    p.hi[static_cast<size_t>(n + i)] = hi;
  }
  // gather row-major terms into compressed columns, summing duplicates
  std::vector<int> count(static_cast<size_t>(n), 0);
  for (const Row& r : model.rows)
    for (const LinTerm& t : r.terms) ++count[static_cast<size_t>(t.col)];
  p.col_start.resize(static_cast<size_t>(n) + 1, 0);
  for (int j = 0; j < n; ++j)
    p.col_start[static_cast<size_t>(j) + 1] = p.col_start[static_cast<size_t>(j)] + count[static_cast<size_t>(j)];
  p.row_idx.resize(static_cast<size_t>(p.col_start[static_cast<size_t>(n)]));
  p.val.resize(p.row_idx.size());
  std::vector<int> fill(p.col_start.begin(), p.col_start.end() - 1);
  for (int i = 0; i < m; ++i)
    for (const LinTerm& t : model.rows[static_cast<size_t>(i)].terms) {
      int k = fill[static_cast<size_t>(t.col)]++;
      p.row_idx[static_cast<size_t>(k)] = i;
      p.val[static_cast<size_t>(k)] = t.coef;
    }
  return p;
}

struct Node {
  double bound;
  long seq;
  int branch_var;   // -1 at the root
  double blo, bhi;
  std::shared_ptr<const lp::Basis> basis;
  std::shared_ptr<const Node> parent;
};

struct NodeOrder {
  bool operator()(const std::shared_ptr<const Node>& a,
                  const std::shared_ptr<const Node>& b) const {
    if (a->bound != b->bound) return a->bound > b->bound;
    return a->seq > b->seq;
  }
};

}  // namespace

LpSolution solve_lp(const MilpModel& model) {
  lp::Problem p = to_lp(model);
  lp::Simplex spx(p);
  lp::Result r = spx.solve();
  LpSolution out;
  out.iterations = r.iters;
  switch (r.stat) {
    case lp::SolveStat::Optimal: out.status = LpStatus::Optimal; break;
    case lp::SolveStat::Infeasible: out.status = LpStatus::Infeasible; break;
    case lp::SolveStat::Unbounded: out.status = LpStatus::Unbounded; break;
    default: throw SolveError("LP solve failed (numerical breakdown)");
  }
  if (out.status == LpStatus::Optimal) {
    out.objective = r.obj + model.obj_offset;
    std::vector<double> v = spx.values();
    out.x.assign(v.begin(), v.begin() + model.ncols());
  }
  return out;
}

MilpSolution solve_milp(const MilpModel& model, const MilpOptions& opt) {
  auto t0 = std::chrono::steady_clock::now();
  lp::Problem p = to_lp(model);
  lp::Simplex spx(p);

  std::vector<int> ivars;
  for (int j = 0; j < model.ncols(); ++j)
    if (model.vars[static_cast<size_t>(j)].kind == VarKind::Binary) ivars.push_back(j);

  MilpSolution out;
  out.objective = kInf;
  out.best_bound = -kInf;

  std::priority_queue<std::shared_ptr<const Node>,
                      std::vector<std::shared_ptr<const Node>>, NodeOrder>
      open;
  long seq = 0;
  open.push(std::make_shared<Node>(Node{-kInf, seq++, -1, 0, 0, nullptr, nullptr}));

  // plunge stack: after each branching the nearest-rounded child is explored
  // immediately, which reaches incumbents long before best-first would
  std::vector<std::shared_ptr<const Node>> dive;

  std::vector<double> inc_x;
  double inc_obj = kInf;
  bool limit_hit = false;
  std::vector<int> touched;  // vars whose bounds were overridden last node

  while (!dive.empty() || !open.empty()) {
    std::shared_ptr<const Node> nd;
    if (!dive.empty()) {
      nd = dive.back();
      dive.pop_back();
      if (nd->bound >= inc_obj - kPruneGap && !inc_x.empty()) continue;
    } else {
      nd = open.top();
      open.pop();
      // the heap is popped in bound order, so this is the global proven bound
      if (nd->bound > out.best_bound) out.best_bound = nd->bound;
      if (nd->bound >= inc_obj - kPruneGap && !inc_x.empty()) break;
    }
    if (out.nodes >= opt.node_limit) {
      limit_hit = true;
      break;
    }
    if (!opt.deterministic && opt.time_limit_s > 0) {
      double el = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      if (el > opt.time_limit_s) {
        limit_hit = true;
        break;
      }
    }
    ++out.nodes;
    if (getenv("SPX_TRACE") && out.nodes % 200 == 0)
      fprintf(stderr, "[bb] nodes=%ld lp=%ld dive=%zu heap=%zu bnd=%.9f inc=%.9f\n",
              out.nodes, out.lp_iterations, dive.size(), open.size(), out.best_bound, inc_obj);

    for (int v : touched)
      spx.set_bound(v, model.vars[static_cast<size_t>(v)].lo,
                    model.vars[static_cast<size_t>(v)].hi);
    touched.clear();
    for (const Node* c = nd.get(); c; c = c->parent.get()) {
      if (c->branch_var < 0) continue;
      bool seen = false;
      for (int v : touched)
        if (v == c->branch_var) { seen = true; break; }
      if (seen) continue;  // nearest override wins
      spx.set_bound(c->branch_var, c->blo, c->bhi);
      touched.push_back(c->branch_var);
    }
    if (nd->basis)
      spx.set_basis(*nd->basis);
    else
      spx.reset_to_slack_basis();

    lp::Result r = spx.solve();
    out.lp_iterations += r.iters;
    if (getenv("SPX_TRACE2"))
      fprintf(stderr, "[nd] n=%ld it=%ld st=%d warm=%d var=%d\n", out.nodes, r.iters,
              static_cast<int>(r.stat), nd->basis ? 1 : 0, nd->branch_var);
    if (r.stat == lp::SolveStat::Infeasible) continue;
    if (r.stat == lp::SolveStat::Unbounded) {
      out.status = MilpStatus::Unbounded;
      out.wall_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      return out;
    }
    if (r.stat != lp::SolveStat::Optimal)
      throw SolveError("node LP failed (numerical breakdown)");

    double obj = r.obj + model.obj_offset;
    double bound = std::max(obj, nd->bound);  // keeps the frontier monotone
    if (bound >= inc_obj - kPruneGap) continue;

    int frac_var = -1;
    double frac_best = kIntTol;
    int prio_best = std::numeric_limits<int>::min();
    for (int j : ivars) {
      double v = spx.value(j);
      double f = std::min(v - std::floor(v), std::ceil(v) - v);
      if (f <= kIntTol) continue;
      int pr = model.branch_priority.empty() ? 0 : model.branch_priority[static_cast<size_t>(j)];
      if (pr > prio_best || (pr == prio_best && f > frac_best)) {
        prio_best = pr;
        frac_best = f;
        frac_var = j;
      }
    }
    if (frac_var < 0) {
      if (obj < inc_obj) {
        inc_obj = obj;
        std::vector<double> v = spx.values();
        inc_x.assign(v.begin(), v.begin() + model.ncols());
      }
      continue;
    }

    auto snap = std::make_shared<const lp::Basis>(spx.basis());
    double v = spx.value(frac_var);
    double dn = std::floor(v), up = std::ceil(v);
    auto dn_child = std::make_shared<Node>(Node{
        bound, seq++, frac_var, spx.lower(frac_var), dn, snap, nd});
    auto up_child = std::make_shared<Node>(Node{
        bound, seq++, frac_var, up, spx.upper(frac_var), snap, nd});
    if (v - dn <= up - v) {
      dive.push_back(dn_child);
      open.push(up_child);
    } else {
      dive.push_back(up_child);
      open.push(dn_child);
    }
  }

  out.wall_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (!inc_x.empty()) {
    out.objective = inc_obj;
    out.x = std::move(inc_x);
    out.status = limit_hit ? MilpStatus::NodeLimit : MilpStatus::Optimal;
    if (!limit_hit) out.best_bound = inc_obj;
  } else {
    out.status = limit_hit ? MilpStatus::NodeLimit : MilpStatus::Infeasible;
  }
  return out;
}

}  // namespace kronopt
