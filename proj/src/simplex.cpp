#include "kronopt/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "kronopt/errors.hpp"
#include "kronopt/log.hpp"

namespace kronopt::lp {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kFeasTol = 1e-7;
constexpr double kDualTol = 1e-7;
constexpr double kPivotTol = 1e-9;
constexpr double kStablePivTol = 1e-7;   // preferred minimum pivot magnitude
constexpr double kEtaPivRefactor = 1e-5; // eta pivots below this force a refactor
constexpr double kZeroTol = 1e-12;
constexpr double kDegenTol = 1e-11;
constexpr int kRefactorEvery = 64;
constexpr int kBlandAfter = 100;

double bviol(double x, double lo, double hi) {
  double scale_lo = 1.0 + std::abs(lo), scale_hi = 1.0 + std::abs(hi);
  if (x < lo - kFeasTol * scale_lo) return lo - x;
  if (x > hi + kFeasTol * scale_hi) return x - hi;
  return 0.0;
}
}  // namespace

Simplex::Simplex(const Problem& p) : prob_(p), lo_(p.lo), hi_(p.hi) {
  if (static_cast<int>(prob_.c.size()) != nv() ||
      static_cast<int>(lo_.size()) != nv() || static_cast<int>(hi_.size()) != nv())
    throw ValidationError("simplex: inconsistent problem arrays");
  reset_to_slack_basis();
}

void Simplex::column(int var, Eigen::VectorXd& out) const {
  out.setZero(prob_.m);
  if (var < prob_.n) {
    for (int k = prob_.col_start[static_cast<size_t>(var)];
         k < prob_.col_start[static_cast<size_t>(var) + 1]; ++k)
      out[prob_.row_idx[static_cast<size_t>(k)]] += prob_.val[static_cast<size_t>(k)];
  } else {
    out[var - prob_.n] = -1.0;
  }
}

double Simplex::col_dot(int var, const Eigen::VectorXd& v) const {
  if (var < prob_.n) {
    double s = 0.0;
    for (int k = prob_.col_start[static_cast<size_t>(var)];
         k < prob_.col_start[static_cast<size_t>(var) + 1]; ++k)
      s += prob_.val[static_cast<size_t>(k)] * v[prob_.row_idx[static_cast<size_t>(k)]];
    return s;
  }
  return -v[var - prob_.n];
}

void Simplex::reset_to_slack_basis() {
  const int n = prob_.n, m = prob_.m;
  basic_.resize(static_cast<size_t>(m));
  status_.assign(static_cast<size_t>(nv()), VarStatus::AtLower);
  xval_.assign(static_cast<size_t>(nv()), 0.0);
  for (int i = 0; i < m; ++i) {
    basic_[static_cast<size_t>(i)] = n + i;
    status_[static_cast<size_t>(n + i)] = VarStatus::Basic;
  }
  for (int j = 0; j < n; ++j) {
    double lo = lo_[static_cast<size_t>(j)], hi = hi_[static_cast<size_t>(j)];
    double c = prob_.c[static_cast<size_t>(j)];
    VarStatus st;
    if (lo == -kInf && hi == kInf) {
      st = VarStatus::FreeNB;
    } else if (c < 0.0) {
      st = (hi < kInf) ? VarStatus::AtUpper : VarStatus::AtLower;
    } else {
      st = (lo > -kInf) ? VarStatus::AtLower : VarStatus::AtUpper;
    }
    status_[static_cast<size_t>(j)] = st;
    xval_[static_cast<size_t>(j)] =
        st == VarStatus::AtLower ? lo : (st == VarStatus::AtUpper ? hi : 0.0);
  }
  basic_pos_.assign(static_cast<size_t>(nv()), -1);
  for (int i = 0; i < m; ++i) basic_pos_[static_cast<size_t>(basic_[static_cast<size_t>(i)])] = i;
  factor_ok_ = false;
}

void Simplex::set_basis(const Basis& b) {
  if (static_cast<int>(b.basic.size()) != prob_.m ||
      static_cast<int>(b.status.size()) != nv())
    throw ValidationError("simplex: basis size mismatch");
  bool same_cols = factor_ok_ && b.basic == basic_;
  basic_ = b.basic;
  status_ = b.status;
  basic_pos_.assign(static_cast<size_t>(nv()), -1);
  for (int i = 0; i < prob_.m; ++i) {
    int v = basic_[static_cast<size_t>(i)];
    if (v < 0 || v >= nv() || basic_pos_[static_cast<size_t>(v)] >= 0)
      throw ValidationError("simplex: malformed basis");
    basic_pos_[static_cast<size_t>(v)] = i;
    status_[static_cast<size_t>(v)] = VarStatus::Basic;
  }
  xval_.assign(static_cast<size_t>(nv()), 0.0);
  for (int j = 0; j < nv(); ++j) {
    if (basic_pos_[static_cast<size_t>(j)] >= 0) continue;
    double lo = lo_[static_cast<size_t>(j)], hi = hi_[static_cast<size_t>(j)];
    VarStatus st = status_[static_cast<size_t>(j)];
    if (st == VarStatus::Basic) st = VarStatus::AtLower;
    // nonbasic values must sit inside their box
    if (st == VarStatus::FreeNB && (lo > 0.0 || hi < 0.0))
      st = (lo > 0.0) ? VarStatus::AtLower : VarStatus::AtUpper;
    if (st == VarStatus::AtLower && lo == -kInf)
      st = (hi < kInf) ? VarStatus::AtUpper : VarStatus::FreeNB;
    if (st == VarStatus::AtUpper && hi == kInf)
      st = (lo > -kInf) ? VarStatus::AtLower : VarStatus::FreeNB;
    status_[static_cast<size_t>(j)] = st;
    xval_[static_cast<size_t>(j)] =
        st == VarStatus::AtLower ? lo : (st == VarStatus::AtUpper ? hi : 0.0);
  }
  factor_ok_ = same_cols;  // identical basic set keeps the factors
  values_dirty_ = true;
}

Basis Simplex::basis() const {
  Basis b;
  b.basic = basic_;
  b.status = status_;
  return b;
}

void Simplex::set_bound(int var, double lo, double hi) {
  lo_[static_cast<size_t>(var)] = lo;
  hi_[static_cast<size_t>(var)] = hi;
  if (status_[static_cast<size_t>(var)] == VarStatus::AtLower)
    xval_[static_cast<size_t>(var)] = lo;
  else if (status_[static_cast<size_t>(var)] == VarStatus::AtUpper)
    xval_[static_cast<size_t>(var)] = hi;
  values_dirty_ = true;  // basis factors stay valid, values do not
}

void Simplex::factorize() {
  const int m = prob_.m;
  std::vector<Eigen::Triplet<double>> trips;
  for (int i = 0; i < m; ++i) {
    int v = basic_[static_cast<size_t>(i)];
    if (v < prob_.n) {
      for (int k = prob_.col_start[static_cast<size_t>(v)];
           k < prob_.col_start[static_cast<size_t>(v) + 1]; ++k)
        trips.emplace_back(prob_.row_idx[static_cast<size_t>(k)], i,
                           prob_.val[static_cast<size_t>(k)]);
    } else {
      trips.emplace_back(v - prob_.n, i, -1.0);
    }
  }
  bmat_.resize(m, m);
  bmat_.setFromTriplets(trips.begin(), trips.end());
  bmat_.makeCompressed();
  lu_.compute(bmat_);
  etas_.clear();
  factor_ok_ = (lu_.info() == Eigen::Success);
}

void Simplex::ftran(Eigen::VectorXd& v) const {
  v = lu_.solve(v);
  for (const Eta& e : etas_) {
    double zr = v[e.r] / e.w[e.r];
    if (zr != 0.0) v -= zr * e.w;
    v[e.r] = zr;
  }
}

void Simplex::btran(Eigen::VectorXd& v) const {
  for (auto it = etas_.rbegin(); it != etas_.rend(); ++it) {
    double dot = it->w.dot(v);
    v[it->r] = (v[it->r] - (dot - it->w[it->r] * v[it->r])) / it->w[it->r];
  }
  v = const_cast<Eigen::SparseLU<Eigen::SparseMatrix<double>>&>(lu_)
          .transpose()
          .solve(v);
}

void Simplex::compute_basic_values() {
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(prob_.m);
  for (int j = 0; j < nv(); ++j) {
    if (basic_pos_[static_cast<size_t>(j)] >= 0) continue;
    double x = xval_[static_cast<size_t>(j)];
    if (x == 0.0) continue;
    if (j < prob_.n) {
      for (int k = prob_.col_start[static_cast<size_t>(j)];
           k < prob_.col_start[static_cast<size_t>(j) + 1]; ++k)
        rhs[prob_.row_idx[static_cast<size_t>(k)]] -= prob_.val[static_cast<size_t>(k)] * x;
    } else {
      rhs[j - prob_.n] += x;
    }
  }
  ftran(rhs);
  for (int i = 0; i < prob_.m; ++i)
    xval_[static_cast<size_t>(basic_[static_cast<size_t>(i)])] = rhs[i];
}

void Simplex::compute_duals() {
  Eigen::VectorXd y(prob_.m);
  for (int i = 0; i < prob_.m; ++i)
    y[i] = prob_.c[static_cast<size_t>(basic_[static_cast<size_t>(i)])];
  btran(y);
  dual_.assign(static_cast<size_t>(nv()), 0.0);
  for (int j = 0; j < nv(); ++j) {
    if (basic_pos_[static_cast<size_t>(j)] >= 0) continue;
    dual_[static_cast<size_t>(j)] = prob_.c[static_cast<size_t>(j)] - col_dot(j, y);
  }
}

double Simplex::infeas_sum() const {
  double s = 0.0;
  for (int i = 0; i < prob_.m; ++i) {
    int v = basic_[static_cast<size_t>(i)];
    s += bviol(xval_[static_cast<size_t>(v)], lo_[static_cast<size_t>(v)],
               hi_[static_cast<size_t>(v)]);
  }
  return s;
}

double Simplex::objective() const {
  double s = 0.0;
  for (int j = 0; j < nv(); ++j) s += prob_.c[static_cast<size_t>(j)] * xval_[static_cast<size_t>(j)];
  return s;
}

bool Simplex::dual_feasible_start() const {
  for (int j = 0; j < nv(); ++j) {
    if (basic_pos_[static_cast<size_t>(j)] >= 0) continue;
    double d = dual_[static_cast<size_t>(j)];
    VarStatus st = status_[static_cast<size_t>(j)];
    bool fixed = hi_[static_cast<size_t>(j)] - lo_[static_cast<size_t>(j)] <= kZeroTol;
    if (fixed) continue;
    if (st == VarStatus::AtLower && d < -10 * kDualTol) return false;
    if (st == VarStatus::AtUpper && d > 10 * kDualTol) return false;
    if (st == VarStatus::FreeNB && std::abs(d) > 10 * kDualTol) return false;
  }
  return true;
}

// Entering column choice.  dual_ must hold the reduced costs of the phase
// being priced.  Returns variable index or -1.
int Simplex::price_primal(bool /*phase1*/, bool bland, int& dir) const {
  int best = -1;
  double best_score = kDualTol;
  dir = 0;
  for (int j = 0; j < nv(); ++j) {
    if (basic_pos_[static_cast<size_t>(j)] >= 0) continue;
    if (hi_[static_cast<size_t>(j)] - lo_[static_cast<size_t>(j)] <= kZeroTol) continue;
    double d = dual_[static_cast<size_t>(j)];
    VarStatus st = status_[static_cast<size_t>(j)];
    int dj = 0;
    if ((st == VarStatus::AtLower || st == VarStatus::FreeNB) && d < -kDualTol)
      dj = 1;
    else if ((st == VarStatus::AtUpper || st == VarStatus::FreeNB) && d > kDualTol)
      dj = -1;
    if (!dj) continue;
    if (bland) {
      dir = dj;
      return j;
    }
    if (std::abs(d) > best_score) {
      best_score = std::abs(d);
      best = j;
      dir = dj;
    }
  }
  return best;
}

Result Simplex::primal_loop(long iter_limit, long& iters) {
  const int m = prob_.m;
  Eigen::VectorXd w(m), cb(m);
  int degen_streak = 0;
  // Bland's rule is sticky: degenerate macro-cycles can pass through
  // non-degenerate steps, so once engaged it stays on.
  bool bland = false;
  bool refactor_now = false;
  const long bland_iter_cap = 2000 + 20L * m;

  while (true) {
    if (!factor_ok_ || refactor_now ||
        static_cast<int>(etas_.size()) >= kRefactorEvery) {
      refactor_now = false;
      factorize();
      if (!factor_ok_) return {SolveStat::Singular, 0.0, iters};
      compute_basic_values();
    }
    if (!bland && (degen_streak > kBlandAfter || iters > bland_iter_cap)) bland = true;
    bool phase1 = infeas_sum() > kFeasTol * (1.0 + m);

    if (phase1) {
      for (int i = 0; i < m; ++i) {
        int v = basic_[static_cast<size_t>(i)];
        double x = xval_[static_cast<size_t>(v)];
        double lo = lo_[static_cast<size_t>(v)], hi = hi_[static_cast<size_t>(v)];
        cb[i] = (x < lo - kFeasTol * (1.0 + std::abs(lo)))   ? -1.0
                : (x > hi + kFeasTol * (1.0 + std::abs(hi))) ? 1.0
                                                             : 0.0;
      }
      Eigen::VectorXd y = cb;
      btran(y);
      dual_.assign(static_cast<size_t>(nv()), 0.0);
      for (int j = 0; j < nv(); ++j)
        if (basic_pos_[static_cast<size_t>(j)] < 0)
          dual_[static_cast<size_t>(j)] = -col_dot(j, y);
    } else {
      compute_duals();
    }

    int dir = 0;
    int q = price_primal(phase1, bland, dir);
    if (q < 0) {
      if (!etas_.empty()) {  // verify on a clean factorisation
        factorize();
        if (!factor_ok_) return {SolveStat::Singular, 0.0, iters};
        compute_basic_values();
        continue;
      }
      if (phase1 && infeas_sum() > kFeasTol * (1.0 + m))
        return {SolveStat::Infeasible, objective(), iters};
      return {SolveStat::Optimal, objective(), iters};
    }

    if (iters >= iter_limit) return {SolveStat::IterLimit, objective(), iters};
    ++iters;

    column(q, w);
    ftran(w);

    // ratio test: basics block at bounds lying in their direction of travel;
    // in phase 1 an infeasible basic blocks at its violated bound
    double tmax = kInf;
    int leave_pos = -1;
    double leave_piv = 0.0;
    bool leave_at_upper = false;
    for (int p = 0; p < m; ++p) {
      double g = dir * w[p];
      if (std::abs(g) <= kPivotTol) continue;
      int v = basic_[static_cast<size_t>(p)];
      double x = xval_[static_cast<size_t>(v)];
      double lo = lo_[static_cast<size_t>(v)], hi = hi_[static_cast<size_t>(v)];
      bool below = x < lo - kFeasTol * (1.0 + std::abs(lo));
      bool above = x > hi + kFeasTol * (1.0 + std::abs(hi));
      double t;
      bool at_up;
      if (g > 0.0) {  // basic decreases
        if (above) {
          t = (x - hi) / g;
          at_up = true;
        } else if (below || lo == -kInf) {
          continue;
        } else {
          t = (x - lo) / g;
          at_up = false;
        }
      } else {  // basic increases
        if (below) {
          t = (x - lo) / g;
          at_up = false;
        } else if (above || hi == kInf) {
          continue;
        } else {
          t = (x - hi) / g;
          at_up = true;
        }
      }
      if (t < 0.0) t = 0.0;
      bool better;
      if (leave_pos < 0)
        better = true;
      else if (bland)
        better = t < tmax - 1e-9 ||
                 (t < tmax + 1e-9 &&
                  basic_[static_cast<size_t>(p)] < basic_[static_cast<size_t>(leave_pos)]);
      else
        better = t < tmax - 1e-9 ||
                 (t < tmax + 1e-9 && std::abs(w[p]) > std::abs(leave_piv));
      if (better) {
        tmax = std::min(t, tmax);
        leave_pos = p;
        leave_piv = w[p];
        leave_at_upper = at_up;
      }
    }
    double range_q = hi_[static_cast<size_t>(q)] - lo_[static_cast<size_t>(q)];

    if (leave_pos < 0 && range_q == kInf) {
      if (phase1) return {SolveStat::Singular, 0.0, iters};  // cannot happen
      return {SolveStat::Unbounded, objective(), iters};
    }

    if (range_q <= tmax) {
      // entering reaches its opposite bound first: flip, no basis change
      double t = range_q;
      for (int p = 0; p < m; ++p)
        if (std::abs(w[p]) > kZeroTol)
          xval_[static_cast<size_t>(basic_[static_cast<size_t>(p)])] -= dir * t * w[p];
      xval_[static_cast<size_t>(q)] += dir * t;
      status_[static_cast<size_t>(q)] = status_[static_cast<size_t>(q)] == VarStatus::AtLower
                                            ? VarStatus::AtUpper
                                            : VarStatus::AtLower;
      degen_streak = (t <= kDegenTol) ? degen_streak + 1 : 0;
      continue;
    }

    if (std::abs(leave_piv) < kStablePivTol) {
      if (!etas_.empty()) {  // may be an artefact of stale etas
        factorize();
        if (!factor_ok_) return {SolveStat::Singular, 0.0, iters};
        compute_basic_values();
        continue;
      }
      if (std::abs(leave_piv) < kPivotTol) return {SolveStat::Singular, 0.0, iters};
      // tiny but genuine pivot on fresh factors: take it, refactor right after
    }

    double t = tmax;
    int lv = basic_[static_cast<size_t>(leave_pos)];
    for (int p = 0; p < m; ++p)
      if (p != leave_pos && std::abs(w[p]) > kZeroTol)
        xval_[static_cast<size_t>(basic_[static_cast<size_t>(p)])] -= dir * t * w[p];
    xval_[static_cast<size_t>(q)] += dir * t;
    xval_[static_cast<size_t>(lv)] =
        leave_at_upper ? hi_[static_cast<size_t>(lv)] : lo_[static_cast<size_t>(lv)];
    status_[static_cast<size_t>(lv)] =
        leave_at_upper ? VarStatus::AtUpper : VarStatus::AtLower;
    status_[static_cast<size_t>(q)] = VarStatus::Basic;
    basic_[static_cast<size_t>(leave_pos)] = q;
    basic_pos_[static_cast<size_t>(lv)] = -1;
    basic_pos_[static_cast<size_t>(q)] = leave_pos;
    etas_.push_back({leave_pos, w});
    if (std::abs(leave_piv) < kEtaPivRefactor) refactor_now = true;
    degen_streak = (t <= kDegenTol) ? degen_streak + 1 : 0;
  }
}

Result Simplex::solve_primal(long iter_limit) {
  if (!factor_ok_) {
    factorize();
    if (!factor_ok_) {
      reset_to_slack_basis();
      factorize();
      if (!factor_ok_) return {SolveStat::Singular, 0.0, 0};
    }
    compute_basic_values();
  } else if (values_dirty_) {
    compute_basic_values();
  }
  values_dirty_ = false;
  long iters = 0;
  return primal_loop(iter_limit, iters);
}

Result Simplex::solve_dual(long iter_limit) {
  const int m = prob_.m;
  if (!factor_ok_) {
    factorize();
    if (!factor_ok_) return {SolveStat::Singular, 0.0, 0};
    compute_basic_values();
  } else if (values_dirty_) {
    compute_basic_values();
  }
  values_dirty_ = false;
  Eigen::VectorXd rho(m), w(m);
  long iters = 0;
  int degen_streak = 0;
  bool bland = false;  // sticky, see primal_loop
  bool refactor_now = false;
  const long bland_iter_cap = 2000 + 20L * m;

  while (true) {
    if (refactor_now || static_cast<int>(etas_.size()) >= kRefactorEvery) {
      refactor_now = false;
      factorize();
      if (!factor_ok_) return {SolveStat::Singular, 0.0, iters};
      compute_basic_values();
    }
    if (!bland && (degen_streak > kBlandAfter || iters > bland_iter_cap)) bland = true;
    compute_duals();

    // repair boxed nonbasics whose reduced cost drifted to the wrong side;
    // a free or one-sided violation means the dual method cannot continue
    bool flipped = false;
    for (int j = 0; j < nv(); ++j) {
      if (basic_pos_[static_cast<size_t>(j)] >= 0) continue;
      if (hi_[static_cast<size_t>(j)] - lo_[static_cast<size_t>(j)] <= kZeroTol) continue;
      double d = dual_[static_cast<size_t>(j)];
      VarStatus st = status_[static_cast<size_t>(j)];
      if (st == VarStatus::AtLower && d < -kDualTol) {
        if (hi_[static_cast<size_t>(j)] == kInf) return {SolveStat::Singular, 0.0, iters};
        status_[static_cast<size_t>(j)] = VarStatus::AtUpper;
        xval_[static_cast<size_t>(j)] = hi_[static_cast<size_t>(j)];
        flipped = true;
      } else if (st == VarStatus::AtUpper && d > kDualTol) {
        if (lo_[static_cast<size_t>(j)] == -kInf) return {SolveStat::Singular, 0.0, iters};
        status_[static_cast<size_t>(j)] = VarStatus::AtLower;
        xval_[static_cast<size_t>(j)] = lo_[static_cast<size_t>(j)];
        flipped = true;
      } else if (st == VarStatus::FreeNB && std::abs(d) > kDualTol) {
        return {SolveStat::Singular, 0.0, iters};
      }
    }
    if (flipped) compute_basic_values();

    // leaving row: largest scaled bound violation (Bland: the violated row
    // whose basic variable has the smallest index)
    int r = -1;
    double worst = 0.0;
    bool leave_below = false;
    for (int p = 0; p < m; ++p) {
      int v = basic_[static_cast<size_t>(p)];
      double x = xval_[static_cast<size_t>(v)];
      double lo = lo_[static_cast<size_t>(v)], hi = hi_[static_cast<size_t>(v)];
      double viol = 0.0;
      bool below = false;
      if (x < lo - kFeasTol * (1.0 + std::abs(lo))) {
        viol = lo - x;
        below = true;
      } else if (x > hi + kFeasTol * (1.0 + std::abs(hi))) {
        viol = x - hi;
      }
      if (viol <= 0.0) continue;
      bool better;
      if (r < 0)
        better = true;
      else if (bland)
        better = v < basic_[static_cast<size_t>(r)];
      else
        better = viol > worst + kZeroTol;
      if (better) {
        worst = viol;
        r = p;
        leave_below = below;
      }
    }
    if (r < 0) {
      if (!etas_.empty()) {
        factorize();
        if (!factor_ok_) return {SolveStat::Singular, 0.0, iters};
        compute_basic_values();
        compute_duals();
        continue;
      }
      return {SolveStat::Optimal, objective(), iters};
    }

    if (iters >= iter_limit) return {SolveStat::IterLimit, objective(), iters};
    ++iters;

    rho.setZero(m);
    rho[r] = 1.0;
    btran(rho);
    double sgn = leave_below ? -1.0 : 1.0;

    // bounded dual ratio test; free nonbasics price at ratio zero.  The
    // selection runs in two classes: pivots of sound magnitude are always
    // preferred, tiny ones are a last resort on fresh factors only.
    int q = -1, q_tiny = -1;
    double best_ratio = kInf, best_alpha = 0.0;
    double tiny_ratio = kInf, tiny_alpha = 0.0;
    for (int j = 0; j < nv(); ++j) {
      if (basic_pos_[static_cast<size_t>(j)] >= 0) continue;
      if (hi_[static_cast<size_t>(j)] - lo_[static_cast<size_t>(j)] <= kZeroTol) continue;
      double alpha = col_dot(j, rho);
      double at = sgn * alpha;
      VarStatus st = status_[static_cast<size_t>(j)];
      double ratio;
      if (st == VarStatus::FreeNB) {
        if (std::abs(at) <= kPivotTol) continue;
        ratio = 0.0;
      } else if (st == VarStatus::AtLower && at > kPivotTol) {
        ratio = std::max(0.0, dual_[static_cast<size_t>(j)]) / at;
      } else if (st == VarStatus::AtUpper && at < -kPivotTol) {
        ratio = std::min(0.0, dual_[static_cast<size_t>(j)]) / at;
      } else {
        continue;
      }
      if (std::abs(alpha) < kStablePivTol) {
        if (q_tiny < 0 || ratio < tiny_ratio - 1e-12 ||
            (ratio < tiny_ratio + 1e-12 && std::abs(alpha) > std::abs(tiny_alpha))) {
          q_tiny = j;
          tiny_ratio = std::min(ratio, tiny_ratio);
          tiny_alpha = alpha;
        }
        continue;
      }
      bool better;
      if (q < 0)
        better = true;
      else if (bland)
        better = ratio < best_ratio - 1e-12 ||
                 (ratio < best_ratio + 1e-12 && j < q);
      else
        better = ratio < best_ratio - 1e-12 ||
                 (ratio < best_ratio + 1e-12 &&
                  std::abs(alpha) > std::abs(best_alpha));
      if (better) {
        q = j;
        best_ratio = std::min(ratio, best_ratio);
        best_alpha = alpha;
      }
    }
    if (q < 0 && q_tiny >= 0) {
      if (!etas_.empty()) {  // a tiny pivot may be an artefact of stale etas
        factorize();
        if (!factor_ok_) return {SolveStat::Singular, 0.0, iters};
        compute_basic_values();
        continue;
      }
      q = q_tiny;
      best_ratio = tiny_ratio;
      best_alpha = tiny_alpha;
    }
    if (q < 0) {
      if (!etas_.empty()) {
        factorize();
        if (!factor_ok_) return {SolveStat::Singular, 0.0, iters};
        compute_basic_values();
        continue;
      }
      return {SolveStat::Infeasible, objective(), iters};
    }

    column(q, w);
    ftran(w);
    if (std::abs(w[r] - best_alpha) > 1e-6 * (1.0 + std::abs(best_alpha))) {
      if (!etas_.empty()) {
        factorize();
        if (!factor_ok_) return {SolveStat::Singular, 0.0, iters};
        compute_basic_values();
        continue;
      }
      return {SolveStat::Singular, 0.0, iters};
    }
    if (std::abs(w[r]) < kPivotTol) {
      if (!etas_.empty()) {
        factorize();
        if (!factor_ok_) return {SolveStat::Singular, 0.0, iters};
        compute_basic_values();
        continue;
      }
      return {SolveStat::Singular, 0.0, iters};
    }

    int lv = basic_[static_cast<size_t>(r)];
    double target = leave_below ? lo_[static_cast<size_t>(lv)] : hi_[static_cast<size_t>(lv)];
    double delta_q = -(target - xval_[static_cast<size_t>(lv)]) / w[r];
    for (int p = 0; p < m; ++p)
      if (p != r && std::abs(w[p]) > kZeroTol)
        xval_[static_cast<size_t>(basic_[static_cast<size_t>(p)])] -= delta_q * w[p];
    xval_[static_cast<size_t>(lv)] = target;
    xval_[static_cast<size_t>(q)] += delta_q;
    status_[static_cast<size_t>(lv)] = leave_below ? VarStatus::AtLower : VarStatus::AtUpper;
    status_[static_cast<size_t>(q)] = VarStatus::Basic;
    basic_[static_cast<size_t>(r)] = q;
    basic_pos_[static_cast<size_t>(lv)] = -1;
    basic_pos_[static_cast<size_t>(q)] = r;
    etas_.push_back({r, w});
    // small-pivot etas amplify roundoff through every later ftran/btran
    if (std::abs(w[r]) < kEtaPivRefactor) refactor_now = true;
    degen_streak = (best_ratio <= kDegenTol) ? degen_streak + 1 : 0;
  }
}

Result Simplex::solve(long iter_limit) {
  if (!factor_ok_) {
    factorize();
    if (!factor_ok_) {
      reset_to_slack_basis();
      factorize();
      if (!factor_ok_) return {SolveStat::Singular, 0.0, 0};
    }
    compute_basic_values();
  } else if (values_dirty_) {
    compute_basic_values();
  }
  values_dirty_ = false;
  compute_duals();
  Result r{SolveStat::Singular, 0.0, 0};
  bool dual_bailed = false;
  if (dual_feasible_start()) {
    r = solve_dual(iter_limit);
    if (r.stat != SolveStat::Singular) return r;
    dual_bailed = true;
    log_debug("dual simplex bailed out, falling back to primal");
  }
  if (dual_bailed) {
    // the abandoned basis may be wrecked even if it still factorises
    reset_to_slack_basis();
    factorize();
    if (!factor_ok_) return {SolveStat::Singular, 0.0, r.iters};
    compute_basic_values();
    Result pr = solve_primal(iter_limit);
    pr.iters += r.iters;
    return pr;
  }
  factorize();
  if (!factor_ok_) {
    reset_to_slack_basis();
    factorize();
    if (!factor_ok_) return {SolveStat::Singular, 0.0, 0};
  }
  compute_basic_values();
  Result pr = solve_primal(iter_limit);
  if (pr.stat != SolveStat::Singular) return pr;
  // last resort: restart the primal from a clean logical basis
  log_debug("primal simplex bailed out, restarting from the slack basis");
  reset_to_slack_basis();
  factorize();
  if (!factor_ok_) return pr;
  compute_basic_values();
  Result rr = solve_primal(iter_limit);
  rr.iters += pr.iters;
  return rr;
}

}  // namespace kronopt::lp
